#include "logbm/runner.hpp"

#include "logbm/builtin.hpp"
#include "logbm/grid.hpp"
#include "logbm/parallel.hpp"
#include "logbm/rng.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <set>
#include <sstream>

namespace logbm {

namespace {

using nlohmann::json;

const std::set<std::string> check_kinds = {"log-bm",    "log-bm-2d",     "santalo",
                                           "inclusion", "log-concavity", "unconditional"};

// ---- line tracking ---------------------------------------------------------

class LineScanner {
public:
    explicit LineScanner(const std::string& text) : s_(text) {}

    std::map<std::string, int> run() {
        ws();
        value("");
        return lines_;
    }

private:
    void ws() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) {
            if (s_[i_] == '\n') ++line_;
            ++i_;
        }
    }

    std::string string() {
        std::string out;
        ++i_;  // opening quote
        while (i_ < s_.size() && s_[i_] != '"') {
            if (s_[i_] == '\\' && i_ + 1 < s_.size()) {
                out += s_[i_ + 1];
                i_ += 2;
                continue;
            }
            if (s_[i_] == '\n') ++line_;
            out += s_[i_++];
        }
        ++i_;
        return out;
    }

    static std::string escape(const std::string& key) {
        std::string out;
        for (char c : key) {
            if (c == '~') out += "~0";
            else if (c == '/') out += "~1";
            else out += c;
        }
        return out;
    }

    void value(const std::string& path) {
        if (i_ >= s_.size()) return;
        lines_[path] = line_;
        const char c = s_[i_];
        if (c == '{') {
            ++i_;
            for (;;) {
                ws();
                if (i_ >= s_.size() || s_[i_] == '}') break;
                if (s_[i_] != '"') return;
                const std::string key = string();
                ws();
                if (i_ >= s_.size() || s_[i_] != ':') return;
                ++i_;
                ws();
                value(path + "/" + escape(key));
                ws();
                if (i_ < s_.size() && s_[i_] == ',') ++i_;
            }
            ++i_;
        } else if (c == '[') {
            ++i_;
            for (int k = 0;; ++k) {
                ws();
                if (i_ >= s_.size() || s_[i_] == ']') break;
                value(path + "/" + std::to_string(k));
                ws();
                if (i_ < s_.size() && s_[i_] == ',') ++i_;
            }
            ++i_;
        } else if (c == '"') {
            string();
        } else {
            while (i_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[i_])) && s_[i_] != ',' &&
                   s_[i_] != ']' && s_[i_] != '}')
                ++i_;
        }
    }

    const std::string& s_;
    std::size_t i_ = 0;
    int line_ = 1;
    std::map<std::string, int> lines_;
};

// ---- validation ------------------------------------------------------------

class Diagnostics {
public:
    Diagnostics(std::string source, std::map<std::string, int> lines)
        : source_(std::move(source)), lines_(std::move(lines)) {}

    void error(const std::string& pointer, const std::string& what) {
        std::string p = pointer;
        int line = 0;
        for (;;) {
            auto it = lines_.find(p);
            if (it != lines_.end()) {
                line = it->second;
                break;
            }
            if (p.empty()) break;
            p = p.substr(0, p.rfind('/'));
        }
        messages_.push_back(source_ + ":" + std::to_string(line) + ": " + (pointer.empty() ? "/" : pointer) +
                            ": " + what);
    }

    void raise() const {
        if (messages_.empty()) return;
        std::string all;
        for (const std::string& m : messages_) all += m + "\n";
        all.pop_back();
        throw ConfigError(all);
    }

private:
    std::string source_;
    std::map<std::string, int> lines_;
    std::vector<std::string> messages_;
};

bool valid_id(const std::string& id) {
    if (id.empty()) return false;
    return std::all_of(id.begin(), id.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    });
}

std::uint64_t derive_seed(std::uint64_t global, const std::string& id) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : id) h = (h ^ c) * 0x100000001b3ULL;
    return rng::mix64(global ^ rng::mix64(h));
}

bool needs_lambdas(const std::string& kind) { return kind != "santalo"; }

template <class T>
bool read(const json& j, const char* key, T& out, Diagnostics& d, const std::string& at,
          const std::function<bool(const T&)>& ok, const std::string& rule) {
    if (!j.contains(key)) return false;
    try {
        T v = j.at(key).get<T>();
        if (!ok(v)) {
            d.error(at + "/" + key, rule);
            return false;
        }
        out = v;
        return true;
    } catch (const json::exception&) {
        d.error(at + "/" + key, "wrong type; " + rule);
        return false;
    }
}

void parse_interp(const json& j, InterpOptions& o, Diagnostics& d, const std::string& at) {
    if (!j.is_object()) {
        d.error(at, "interp must be an object");
        return;
    }
    const std::set<std::string> known = {"m", "sigma", "epsilon", "t_max", "t_points", "budget",
                                         "certify_intervals"};
    for (const auto& [k, v] : j.items())
        if (!known.count(k)) d.error(at + "/" + k, "unknown field");
    auto pos_i = [](const int& v) { return v >= 1; };
    auto pos_d = [](const double& v) { return v > 0.0 && std::isfinite(v); };
    read<int>(j, "m", o.m, d, at, pos_i, "must be a positive integer");
    read<double>(j, "sigma", o.sigma, d, at, pos_d, "must be positive");
    read<double>(j, "epsilon", o.epsilon, d, at, pos_d, "must be positive");
    read<double>(j, "t_max", o.t_max, d, at, pos_d, "must be positive");
    read<int>(j, "t_points", o.t_points, d, at, [](const int& v) { return v >= 3; }, "must be at least 3");
    read<int>(j, "budget", o.budget, d, at, pos_i, "must be a positive integer");
    read<int>(j, "certify_intervals", o.certify_intervals, d, at, [](const int& v) { return v >= 16; },
              "must be at least 16");
}

CheckSpec parse_check(const json& j, const std::string& at, const ExperimentConfig& cfg,
                      Diagnostics& d) {
    CheckSpec c;
    c.raw = j;
    if (!j.is_object()) {
        d.error(at, "check must be an object");
        return c;
    }
    const std::set<std::string> known = {"id",         "kind",        "bodies",     "lambdas",
                                         "seed",       "samples",     "rhs_samples", "confidence",
                                         "rel_tol",    "grid_pairs",  "probes",     "family",
                                         "interp",     "cross_check", "cross_probes", "gate_angles",
                                         "exploratory"};
    for (const auto& [k, v] : j.items())
        if (!known.count(k)) d.error(at + "/" + k, "unknown field");

    if (!j.contains("id") || !j["id"].is_string() || !valid_id(j["id"].get<std::string>()))
        d.error(at + "/id", "required: letters, digits, '-', '_' or '.'");
    else
        c.id = j["id"].get<std::string>();
    if (!j.contains("kind") || !j["kind"].is_string() || !check_kinds.count(j["kind"].get<std::string>())) {
        d.error(at + "/kind",
                "required: one of log-bm, log-bm-2d, santalo, inclusion, log-concavity, unconditional");
        return c;
    }
    c.kind = j["kind"].get<std::string>();

    if (j.contains("family")) {
        if (c.kind != "inclusion" && c.kind != "log-concavity") {
            d.error(at + "/family", "only inclusion and log-concavity checks take a family");
        } else {
            try {
                closed_family_from_json(j["family"]);
                c.family = j["family"];
            } catch (const std::exception& e) {
                d.error(at + "/family", e.what());
            }
        }
    }
    if (j.contains("bodies")) {
        const json& b = j["bodies"];
        if (!b.is_array() || b.size() != 2) {
            d.error(at + "/bodies", "must list exactly two body names");
        } else {
            for (std::size_t k = 0; k < 2; ++k) {
                if (!b[k].is_string()) {
                    d.error(at + "/bodies/" + std::to_string(k), "must be a body name");
                    continue;
                }
                const std::string name = b[k].get<std::string>();
                c.bodies.push_back(name);
                try {
                    resolve_body(cfg, name);
                } catch (const std::exception&) {
                    d.error(at + "/bodies/" + std::to_string(k), "unresolved body reference '" + name + "'");
                }
            }
        }
    } else if (!c.family) {
        d.error(at, "missing field 'bodies'");
    }

    if (j.contains("lambdas")) {
        const json& l = j["lambdas"];
        if (!l.is_array()) {
            d.error(at + "/lambdas", "must be an array of numbers in [0, 1]");
        } else {
            for (std::size_t k = 0; k < l.size(); ++k) {
                const std::string p = at + "/lambdas/" + std::to_string(k);
                if (!l[k].is_number()) {
                    d.error(p, "must be a number in [0, 1]");
                    continue;
                }
                const double v = l[k].get<double>();
                if (!(v >= 0.0 && v <= 1.0)) d.error(p, "lambda must lie in [0, 1]");
                else if (c.kind == "inclusion" && (v == 0.0 || v == 1.0))
                    d.error(p, "inclusion needs lambda strictly inside (0, 1)");
                c.lambdas.push_back(v);
            }
            if (c.kind == "log-concavity" && c.family) {
                if (c.lambdas.size() < 3) d.error(at + "/lambdas", "log-concavity needs at least three lambdas");
                for (std::size_t k = 1; k < c.lambdas.size(); ++k)
                    if (!(c.lambdas[k] > c.lambdas[k - 1]))
                        d.error(at + "/lambdas/" + std::to_string(k), "lambdas must be strictly increasing");
            }
        }
    } else if (needs_lambdas(c.kind)) {
        d.error(at, "missing field 'lambdas'");
    }

    VolumeConfig& v = c.volume;
    auto pos_ll = [](const long long& x) { return x >= 100; };
    read<long long>(j, "samples", v.samples, d, at, pos_ll, "must be an integer >= 100");
    read<long long>(j, "rhs_samples", v.rhs_samples, d, at, pos_ll, "must be an integer >= 100");
    read<double>(j, "confidence", v.confidence, d, at, [](const double& x) { return x > 0.0 && x < 1.0; },
                 "must lie in (0, 1)");
    read<double>(j, "rel_tol", v.rel_tol, d, at, [](const double& x) { return x > 0.0 && x < 0.1; },
                 "must lie in (0, 0.1)");
    read<int>(j, "gate_angles", v.gate_angles, d, at, [](const int& x) { return x >= 2; }, "must be >= 2");
    read<bool>(j, "cross_check", v.cross_check, d, at, [](const bool&) { return true; }, "must be a boolean");
    read<int>(j, "cross_probes", v.cross_probes, d, at, [](const int& x) { return x >= 1; }, "must be >= 1");
    read<int>(j, "grid_pairs", c.grid_pairs, d, at, [](const int& x) { return x >= 8; }, "must be >= 8");
    read<int>(j, "probes", c.probes, d, at, [](const int& x) { return x >= 1; }, "must be >= 1");
    bool exploratory = false;
    read<bool>(j, "exploratory", exploratory, d, at, [](const bool&) { return true; }, "must be a boolean");
    if (j.contains("interp")) parse_interp(j["interp"], v.interp, d, at + "/interp");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) d.error(at + "/seed", "must be a nonnegative integer");
        else c.seed = j["seed"].get<std::uint64_t>();
    } else {
        c.seed = derive_seed(cfg.seed, c.id);
    }
    v.seed = c.seed;
    v.jobs = 1;
    return c;
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

InequalityReport failed(const CheckSpec& c, const std::string& what) {
    InequalityReport r;
    r.id = c.kind;
    r.kind = c.kind;
    r.verdict = Verdict::inconclusive;
    r.details["error"] = what;
    return r;
}

}  // namespace

std::map<std::string, int> json_pointer_lines(const std::string& text) { return LineScanner(text).run(); }

json resolve_body(const ExperimentConfig& cfg, const std::string& name) {
    auto it = cfg.bodies.find(name);
    if (it != cfg.bodies.end()) return it->second;
    for (const ZooEntry& z : builtin_zoo())
        if (z.name == name) return z.descriptor;
    throw ConfigError("unresolved body reference '" + name + "'");
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
        const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + upto, '\n'));
        throw ConfigError(source + ":" + std::to_string(line) + ": /: invalid JSON: " + e.what());
    }
    Diagnostics d(source, json_pointer_lines(text));
    ExperimentConfig cfg;
    cfg.raw = j;
    if (!j.is_object()) {
        d.error("", "config must be a JSON object");
        d.raise();
    }
    const std::set<std::string> known = {"schema", "seed", "bodies", "checks", "output", "description"};
    for (const auto& [k, v] : j.items())
        if (!known.count(k)) d.error("/" + k, "unknown field");
    if (!j.contains("schema")) d.error("", "missing field 'schema'");
    else if (!j["schema"].is_number_integer() || j["schema"].get<int>() != config_schema)
        d.error("/schema", "unsupported schema (expected 1)");
    if (!j.contains("seed")) d.error("", "missing field 'seed' (randomness must be seeded explicitly)");
    else if (!j["seed"].is_number_unsigned()) d.error("/seed", "must be a nonnegative integer");
    else cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("output")) {
        if (!j["output"].is_string()) d.error("/output", "must be a path string");
        else cfg.output = j["output"].get<std::string>();
    }
    if (j.contains("bodies")) {
        if (!j["bodies"].is_object()) {
            d.error("/bodies", "must map names to body descriptors");
        } else {
            for (const auto& [name, desc] : j["bodies"].items()) {
                try {
                    make_builtin(desc);
                    cfg.bodies[name] = desc;
                } catch (const std::exception& e) {
                    d.error("/bodies/" + name, e.what());
                }
            }
        }
    }
    if (!j.contains("checks") || !j["checks"].is_array() || j["checks"].empty()) {
        d.error(j.contains("checks") ? "/checks" : "", "'checks' must be a nonempty array");
    } else {
        std::set<std::string> ids;
        for (std::size_t k = 0; k < j["checks"].size(); ++k) {
            const std::string at = "/checks/" + std::to_string(k);
            CheckSpec c = parse_check(j["checks"][k], at, cfg, d);
            if (!c.id.empty() && !ids.insert(c.id).second) d.error(at + "/id", "duplicate check id");
            cfg.checks.push_back(std::move(c));
        }
    }
    d.raise();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ":0: /: cannot read file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

std::vector<InequalityReport> run_check(const ExperimentConfig& cfg, const CheckSpec& c) {
    std::vector<InequalityReport> out;
    json descriptors = json::array();
    try {
        std::vector<ConvexBody> bodies;
        for (const std::string& name : c.bodies) {
            descriptors.push_back({{"name", name}, {"descriptor", resolve_body(cfg, name)}});
            bodies.push_back(make_builtin(resolve_body(cfg, name)));
        }
        std::optional<ClosedFamily> family;
        if (c.family) {
            family = closed_family_from_json(*c.family);
            if (bodies.empty()) {
                bodies.push_back(closed_body(*family, 0.0));
                bodies.push_back(closed_body(*family, 1.0));
            }
        }
        const ConvexBody& K = bodies.at(0);
        const ConvexBody& T = bodies.at(1);
        if (c.kind == "log-bm") {
            out = check_log_bm(K, T, c.lambdas, c.volume);
        } else if (c.kind == "unconditional") {
            out = check_unconditional_log_bm(K, T, c.lambdas, c.volume);
        } else if (c.kind == "log-bm-2d") {
            out = check_real_2d_log_bm(K, T, c.lambdas, c.grid_pairs);
        } else if (c.kind == "santalo") {
            out = {check_santalo(K, T, c.volume)};
        } else if (c.kind == "inclusion") {
            const DirectionGrid grid = default_grid(K.dim());
            const std::vector<Vector> probes = sphere_probes(K.dim(), c.probes, c.seed);
            for (double l : c.lambdas)
                out.push_back(check_inclusion_c_in_l(K, T, l, probes, grid, c.volume.interp, family, 1));
        } else if (c.kind == "log-concavity") {
            out = family ? check_volume_logconcavity(*family, c.lambdas)
                         : check_volume_logconcavity(K, T, c.lambdas, c.volume);
        }
    } catch (const std::exception& e) {
        out = {failed(c, e.what())};
    }
    for (InequalityReport& r : out) {
        r.id = c.id + "/" + r.id;
        if (!r.inputs.is_object()) r.inputs = json::object();
        r.inputs["check"] = c.id;
        r.inputs["seed"] = c.seed;
        r.inputs["bodies"] = descriptors;
        if (c.family) r.inputs["family"] = *c.family;
        if (c.raw.value("exploratory", false)) r.labels.push_back("exploratory");
    }
    return out;
}

std::vector<InequalityReport> run_checks(const ExperimentConfig& cfg, int jobs, std::ostream* progress) {
    std::vector<std::vector<InequalityReport>> parts(cfg.checks.size());
    std::mutex mu;
    int done = 0;
    parallel_for(static_cast<int>(cfg.checks.size()), std::max(1, jobs), [&](int i) {
        const auto t0 = std::chrono::steady_clock::now();
        parts[i] = run_check(cfg, cfg.checks[i]);
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (progress) {
            std::lock_guard<std::mutex> lock(mu);
            ++done;
            std::string verdicts;
            for (const InequalityReport& r : parts[i]) verdicts += " " + to_string(r.verdict);
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.1fs", s);
            *progress << "[" << done << "/" << cfg.checks.size() << "] " << cfg.checks[i].id << ":" << verdicts
                      << " (" << buf << ")\n";
            progress->flush();
        }
    });
    std::vector<InequalityReport> out;
    for (auto& p : parts)
        for (auto& r : p) out.push_back(std::move(r));
    return out;
}

int exit_code(const std::vector<InequalityReport>& reports) {
    bool inconclusive = false;
    for (const InequalityReport& r : reports) {
        if (r.verdict == Verdict::violated) return 2;
        if (r.verdict == Verdict::inconclusive) inconclusive = true;
    }
    return inconclusive ? 3 : 0;
}

std::vector<std::array<double, 3>> plot_rows(const CheckSpec& check,
                                             const std::vector<InequalityReport>& reports) {
    std::vector<std::array<double, 3>> rows;
    std::vector<const InequalityReport*> mine;
    for (const InequalityReport& r : reports)
        if (r.inputs.is_object() && r.inputs.value("check", std::string()) == check.id) mine.push_back(&r);
    if (check.kind == "log-concavity" && check.family) {
        // closed form: log|C_lambda| against the chord through the end values
        if (mine.empty() || !mine.front()->details.contains("log_volumes")) return rows;
        const auto lv = mine.front()->details["log_volumes"].get<std::vector<double>>();
        const std::vector<double>& l = check.lambdas;
        for (std::size_t i = 0; i < l.size(); ++i) {
            const double t = (l[i] - l.front()) / (l.back() - l.front());
            rows.push_back({l[i], lv[i], (1.0 - t) * lv.front() + t * lv.back()});
        }
        return rows;
    }
    if (check.kind != "log-bm" && check.kind != "log-bm-2d" && check.kind != "unconditional" &&
        check.kind != "log-concavity")
        return rows;
    for (const InequalityReport* r : mine)
        if (r->lambda && r->lhs > 0.0 && r->rhs > 0.0)
            rows.push_back({*r->lambda, std::log(r->lhs), std::log(r->rhs)});
    return rows;
}

void write_outputs(const ExperimentConfig& cfg, const std::vector<InequalityReport>& reports,
                   const std::string& dir, std::ostream* warn) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + dir + ": " + ec.message());
    auto open = [&](const std::string& name) {
        std::ofstream f(fs::path(dir) / name, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + (fs::path(dir) / name).string());
        return f;
    };
    {
        std::ofstream f = open("report.json");
        f << json(reports).dump(2) << "\n";
    }
    {
        std::ofstream f = open("summary.csv");
        f << "check_id,lambda,lhs,rhs,margin,budget,verdict\n";
        for (const InequalityReport& r : reports)
            f << r.id << "," << (r.lambda ? fmt(*r.lambda) : "") << "," << fmt(r.lhs) << "," << fmt(r.rhs)
              << "," << fmt(r.margin) << "," << fmt(r.budget) << "," << to_string(r.verdict) << "\n";
    }
    for (const CheckSpec& c : cfg.checks) {
        const bool plotted = c.kind == "log-bm" || c.kind == "log-bm-2d" || c.kind == "unconditional" ||
                             c.kind == "log-concavity";
        if (!plotted) continue;
        const auto rows = plot_rows(c, reports);
        if (rows.empty()) {
            if (warn) *warn << "warning: no plot data for check " << c.id << " (empty lambda list)\n";
            continue;
        }
        std::ofstream f = open("check-" + c.id + ".csv");
        f << "lambda,log_lhs,log_rhs\n";
        for (const auto& row : rows) f << fmt(row[0]) << "," << fmt(row[1]) << "," << fmt(row[2]) << "\n";
    }
}

}  // namespace logbm
