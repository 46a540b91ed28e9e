#pragma once

#include "logbm/body.hpp"
#include "logbm/interpolation.hpp"
#include "logbm/volume.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace logbm {

enum class Verdict { holds, holds_within_ci, violated, inconclusive };

std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

inline constexpr const char* outside_hypotheses = "outside theorem hypotheses";

/// Margins are log-gaps oriented so that positive means the inequality holds
/// (log lhs - log rhs for lower bounds on lhs, the reverse for Santalo).
/// budget is the largest of the one-sided allowances: margin > budget is a
/// certified pass, margin < -budget a certified failure.
struct InequalityReport {
    std::string id;
    std::string kind;  // log-bm, log-bm-2d, santalo, inclusion, log-concavity, unconditional
    std::optional<double> lambda;
    Verdict verdict = Verdict::inconclusive;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    double budget = 0.0;
    std::map<std::string, double> breakdown;  // per-source contributions to budget
    std::vector<std::string> labels;
    std::vector<VolumeEstimate> volumes;      // in the order named by details["volumes"]
    nlohmann::json inputs = nlohmann::json::object();
    nlohmann::json details = nlohmann::json::object();
};

bool operator==(const InequalityReport& a, const InequalityReport& b);

void to_json(nlohmann::json& j, const InequalityReport& r);
void from_json(const nlohmann::json& j, InequalityReport& r);

/// holds / holds-within-CI / violated from margin and budget; inconclusive
/// is decided by the caller.
Verdict classify(double margin, double budget);

struct VolumeConfig {
    long long samples = 8000;       // radial directions for L_lambda and intersections
    long long rhs_samples = 20000;  // radial directions for bodies without closed-form volume
    double confidence = 0.999;      // per estimate
    std::uint64_t seed = 0;
    double rel_tol = 1e-6;          // radial bound tolerance for L_lambda
    int jobs = 1;
    int gate_angles = 24;           // hypothesis gate: rotation angles tested
    int gate_pairs = 400;           // hypothesis gate: grid size
    double gate_tol = 1e-6;
    bool cross_check = false;       // also bound |C_lambda| from below (interpolation proxy)
    int cross_probes = 64;
    InterpOptions interp;
};

void to_json(nlohmann::json& j, const VolumeConfig& c);

/// |L_lambda(K, T)| >= |K|^{1-lambda} |T|^lambda. The left side is radial
/// Monte Carlo on certified lower radial bounds of L_lambda (so it
/// underestimates), the right side uses closed-form volumes or radial Monte
/// Carlo with exact gauges. Bodies failing the complex-rotation test are
/// still run and labelled.
std::vector<InequalityReport> check_log_bm(const ConvexBody& K, const ConvexBody& T,
                                           const std::vector<double>& lambdas,
                                           const VolumeConfig& cfg = {});

/// Planar version with exact areas of the grid outer body and its certified
/// inner dilate. margin uses the inner body, details carry the outer margin.
std::vector<InequalityReport> check_real_2d_log_bm(const ConvexBody& K, const ConvexBody& T,
                                                   const std::vector<double>& lambdas,
                                                   int grid_pairs = 720);

/// |K cap T| |K polar cap T| <= |B cap T|^2.
InequalityReport check_santalo(const ConvexBody& K, const ConvexBody& T, const VolumeConfig& cfg = {});

/// Every certified point of C_lambda lies in the grid outer body of
/// L_lambda. Probes are scaled to x / upper(x); with a closed-form family
/// the exact norm (times 1 + 1e-12) is used instead of the numerical upper
/// bound, otherwise the analytic-family upper bound.
InequalityReport check_inclusion_c_in_l(const ConvexBody& K, const ConvexBody& T, double lambda,
                                        const std::vector<Vector>& probes,
                                        const DirectionGrid& grid, const InterpOptions& interp = {},
                                        const std::optional<ClosedFamily>& family = std::nullopt,
                                        int jobs = 1);

inline constexpr double logconcavity_tol = 1e-9;

/// Closed-form families: log|C_lambda| at each lambda, one report per
/// interior lambda comparing with the chord through its neighbours.
std::vector<InequalityReport> check_volume_logconcavity(const ClosedFamily& family,
                                                        const std::vector<double>& lambdas);

/// General pairs: |C_lambda| >= |K|^{1-lambda} |T|^lambda bounded from below
/// by the volume of conv{+-x / upper(x)} and from above by the grid outer
/// body of L_lambda. Inconclusive when neither side is decisive.
std::vector<InequalityReport> check_volume_logconcavity(const ConvexBody& K, const ConvexBody& T,
                                                        const std::vector<double>& lambdas,
                                                        const VolumeConfig& cfg = {});

/// check_log_bm gated on coordinate unconditionality instead of complex symmetry.
std::vector<InequalityReport> check_unconditional_log_bm(const ConvexBody& K, const ConvexBody& T,
                                                         const std::vector<double>& lambdas,
                                                         const VolumeConfig& cfg = {});

/// Facet normals of a planar polytope (empty for other bodies).
std::vector<Vector> planar_normals(const ConvexBody& body);

/// Points x / |x|_2 of a seeded Gaussian stream.
std::vector<Vector> sphere_probes(int dim, int count, std::uint64_t seed);

}  // namespace logbm
