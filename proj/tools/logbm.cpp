#include "logbm/builtin.hpp"
#include "logbm/grid.hpp"
#include "logbm/interpolation.hpp"
#include "logbm/runner.hpp"
#include "logbm/volume.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

using namespace logbm;

namespace {

// zoo name or inline JSON descriptor
ConvexBody body_arg(const std::string& s) {
    if (!s.empty() && s.front() == '{') return make_builtin(nlohmann::json::parse(s));
    for (const ZooEntry& z : builtin_zoo())
        if (z.name == s) return make_builtin(z.descriptor);
    throw ConfigError("unknown body '" + s + "' (see 'logbm bodies list')");
}

Vector point_arg(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        v.push_back(std::stod(item, &used));
        if (item.find_first_not_of(" \t", used) != std::string::npos)
            throw ConfigError("bad coordinate '" + item + "'");
    }
    Vector x(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) x(i) = v[i];
    return x;
}

int verify(const std::string& path, const std::string& out, int jobs) {
    const ExperimentConfig cfg = load_config(path);
    const std::string dir = out.empty() ? cfg.output : out;
    const std::vector<InequalityReport> reports = run_checks(cfg, jobs, &std::cerr);
    write_outputs(cfg, reports, dir, &std::cerr);
    for (const InequalityReport& r : reports) {
        std::printf("%-40s %-16s margin %+.4e budget %.4e", r.id.c_str(), to_string(r.verdict).c_str(),
                    r.margin, r.budget);
        for (const std::string& l : r.labels) std::printf("  [%s]", l.c_str());
        std::printf("\n");
    }
    const int code = exit_code(reports);
    std::fprintf(stderr, "wrote %s/report.json (exit %d)\n", dir.c_str(), code);
    return code;
}

void list_bodies() {
    std::printf("%-14s %-22s %4s  %s\n", "name", "kind", "dim", "volume");
    for (const ZooEntry& z : builtin_zoo()) {
        const ConvexBody b = make_builtin(z.descriptor);
        std::string vol = "-";
        if (has_analytic_volume(b)) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.12g", volume_analytic(b).value);
            vol = buf;
        }
        std::printf("%-14s %-22s %4d  %s\n", z.name.c_str(), z.descriptor.value("kind", "").c_str(), b.dim(),
                    vol.c_str());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Log-Brunn-Minkowski experiments for complex convex bodies"};
    app.require_subcommand(1);

    auto* cmd_verify = app.add_subcommand("verify", "run a config and write report files");
    std::string config, out;
    int jobs = 1;
    cmd_verify->add_option("config", config, "experiment config (JSON, schema 1)")->required();
    cmd_verify->add_option("--out", out, "output directory (default: the config's 'output')");
    cmd_verify->add_option("--jobs", jobs, "worker threads")->check(CLI::Range(1, 256));

    auto* cmd_bodies = app.add_subcommand("bodies", "builtin bodies");
    cmd_bodies->require_subcommand(1);
    auto* cmd_list = cmd_bodies->add_subcommand("list", "print the builtin zoo");

    auto* cmd_interp = app.add_subcommand("interp", "print a norm sandwich for one point");
    std::string k, t, point;
    double lambda = 0.5;
    InterpOptions io;
    cmd_interp->add_option("--k", k, "zoo name or JSON descriptor")->required();
    cmd_interp->add_option("--t", t, "zoo name or JSON descriptor")->required();
    cmd_interp->add_option("--lambda", lambda, "interpolation parameter")->required()->check(CLI::Range(0.0, 1.0));
    cmd_interp->add_option("--point", point, "comma-separated coordinates")->required();
    cmd_interp->add_option("--m", io.m, "number of exponential modes")->check(CLI::PositiveNumber);
    cmd_interp->add_option("--budget", io.budget, "objective evaluations per level")->check(CLI::PositiveNumber);
    cmd_interp->add_option("--epsilon", io.epsilon, "Gaussian damping")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_verify->parsed()) return verify(config, out, jobs);
        if (cmd_list->parsed()) {
            list_bodies();
            return 0;
        }
        if (cmd_interp->parsed()) {
            const ConvexBody K = body_arg(k), T = body_arg(t);
            const Vector x = point_arg(point);
            if (x.size() != K.dim()) throw ConfigError("point has the wrong dimension");
            const DualBound dual(K, T, lambda, default_grid(K.dim()));
            std::cout << nlohmann::json(norm_sandwich(K, T, lambda, x, dual, io)).dump(2) << "\n";
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
