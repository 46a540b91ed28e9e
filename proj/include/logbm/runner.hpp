#pragma once

#include "logbm/verifier.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace logbm {

inline constexpr int config_schema = 1;

/// Validation failure; message lines look like "<file>:<line>: <path>: <problem>".
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CheckSpec {
    std::string id;
    std::string kind;  // log-bm, log-bm-2d, santalo, inclusion, log-concavity, unconditional
    std::vector<std::string> bodies;
    std::vector<double> lambdas;
    std::uint64_t seed = 0;  // derived from the global seed and the id unless given
    VolumeConfig volume;
    int grid_pairs = 720;    // log-bm-2d
    int probes = 200;        // inclusion
    std::optional<nlohmann::json> family;  // closed-form family descriptor
    nlohmann::json raw;
};

struct ExperimentConfig {
    std::uint64_t seed = 0;
    std::map<std::string, nlohmann::json> bodies;  // explicit descriptors; zoo names resolve too
    std::vector<CheckSpec> checks;
    std::string output = "out";
    nlohmann::json raw;
};

/// Line number (1-based) of each value in a JSON text, keyed by JSON pointer.
std::map<std::string, int> json_pointer_lines(const std::string& text);

/// Parses and validates a schema-1 config. `source` names the file in
/// diagnostics. Throws ConfigError listing every problem found.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "config");
ExperimentConfig load_config(const std::string& path);

/// Descriptor for a body reference: the config's own entry, else the zoo.
nlohmann::json resolve_body(const ExperimentConfig& cfg, const std::string& name);

/// Runs every check; checks go to a pool of `jobs` workers and the result is
/// in config order. `progress` (may be null) receives one line per check.
std::vector<InequalityReport> run_checks(const ExperimentConfig& cfg, int jobs = 1,
                                         std::ostream* progress = nullptr);

std::vector<InequalityReport> run_check(const ExperimentConfig& cfg, const CheckSpec& check);

/// 0 when every verdict is holds or holds-within-CI, 2 on any violation,
/// else 3 when something is inconclusive.
int exit_code(const std::vector<InequalityReport>& reports);

/// report.json (array), summary.csv and check-<id>.csv plot files for
/// log-bm style and log-concavity checks. Warnings (e.g. empty lambda
/// lists) go to `warn` when given.
void write_outputs(const ExperimentConfig& cfg, const std::vector<InequalityReport>& reports,
                   const std::string& dir, std::ostream* warn = nullptr);

/// (lambda, log lhs, log rhs) rows for one check, empty when not applicable.
std::vector<std::array<double, 3>> plot_rows(const CheckSpec& check,
                                             const std::vector<InequalityReport>& reports);

}  // namespace logbm
