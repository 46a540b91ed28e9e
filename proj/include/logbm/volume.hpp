#pragma once

#include "logbm/body.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace logbm {

enum class VolumeMethod { exact_2d, analytic, monte_carlo, radial_monte_carlo };

std::string to_string(VolumeMethod m);
VolumeMethod volume_method_from_string(const std::string& s);

struct VolumeEstimate {
    double value = 0.0;
    double half_width = 0.0;  // 0 for exact methods
    double confidence = 0.999;
    long long samples = 0;    // 0 for exact methods
    std::uint64_t seed = 0;
    VolumeMethod method = VolumeMethod::analytic;

    double lower() const { return value - half_width; }
    double upper() const { return value + half_width; }
    bool accepted() const { return value > 0.0 && lower() > 0.0; }
    bool exact() const {
        return method == VolumeMethod::exact_2d || method == VolumeMethod::analytic;
    }
};

bool operator==(const VolumeEstimate& a, const VolumeEstimate& b);

void to_json(nlohmann::json& j, const VolumeEstimate& v);
void from_json(const nlohmann::json& j, VolumeEstimate& v);

/// Volume of the Euclidean unit ball in R^d.
double unit_ball_volume(int d);

/// Shoelace area of a planar h- or v-polytope.
VolumeEstimate volume_exact_2d(const ConvexBody& body);

/// True when volume_analytic succeeds for this representation.
bool has_analytic_volume(const ConvexBody& body);

/// Closed forms: tagged cubes and cross-polytopes, lp-balls (Dirichlet
/// integral, real or complex), ellipsoids vol(B)/sqrt(det A).
VolumeEstimate volume_analytic(const ConvexBody& body);

constexpr long long min_mc_samples = 10000;
constexpr int mc_chunk = 4096;

/// Uniform rejection sampling in the axis bounding box, in chunks of 4096
/// points drawn from the counter stream (seed, chunk). Hit counts are summed
/// as integers, so the estimate does not depend on `jobs`. Clopper-Pearson
/// interval at `confidence`, scaled by the box volume.
VolumeEstimate volume_mc(const ConvexBody& body, long long samples, std::uint64_t seed,
                         double confidence = 0.999, int jobs = 1);

/// Same, for the intersection of several bodies (membership in all of them;
/// box from the smallest axis extents).
VolumeEstimate volume_mc(const std::vector<ConvexBody>& bodies, long long samples,
                         std::uint64_t seed, double confidence = 0.999, int jobs = 1);

/// Clopper-Pearson interval for k hits out of n at the given confidence.
std::pair<double, double> clopper_pearson(long long k, long long n, double confidence);

// ---- radial Monte Carlo ----------------------------------------------------

struct RadialSample {
    double lower = 0.0;  // lower bound on rho(u)
    double upper = 0.0;  // upper bound on rho(u)
};

using RadialFunction = std::function<RadialSample(const Vector& unit)>;

/// A body of known volume whose radial function is cheap; used as a control
/// variate for rho^d.
struct ControlVariate {
    std::function<double(const Vector& unit)> radial;
    double volume = 0.0;
    double inner = 0.0;  // inradius lower bound
    double outer = 0.0;  // circumradius upper bound
};

struct RadialVolume {
    VolumeEstimate lower;  // estimate and interval from the lower radial bounds
    VolumeEstimate upper;  // same from the upper radial bounds
    std::vector<double> control_coefficients;
};

/// Confidence interval for the mean of variables in [0, 1], taken in index
/// order: two one-sided betting (capital process) tests at level alpha/2
/// each, with predictable bets sqrt(2 log(2/alpha) / (n s_{i-1}^2)) capped
/// at 1/2 of the admissible range. Each capital is monotone in the tested
/// mean, so the ends are found by bisection.
struct BettingInterval {
    double mean = 0.0;
    double lower = 0.0;
    double upper = 1.0;
};

BettingInterval betting_interval(const std::vector<double>& x, double alpha);

/// |K| = vol(B_d) E[rho(u)^d] over uniform directions u. The interval is the
/// betting interval above for variables in a known range, here [r^d, R^d]
/// from the radius bounds; half_width covers the longer side. Control variates
/// with coefficients fitted on an independent pilot stream reduce the
/// variance without affecting validity. Directions come from the counter
/// stream (seed, block) in blocks of 256 and the reduction is sequential, so
/// the result does not depend on `jobs`.
RadialVolume volume_radial_mc(int dim, const RadialFunction& radial, double inner, double outer,
                              long long samples, std::uint64_t seed, double confidence = 0.999,
                              int jobs = 1, const std::vector<ControlVariate>& controls = {});

/// Radial MC for a body with exact gauge: rho = 1 / gauge.
VolumeEstimate volume_radial_mc(const ConvexBody& body, long long samples, std::uint64_t seed,
                                double confidence = 0.999, int jobs = 1);

/// ControlVariate for a body with an analytic volume.
ControlVariate control_variate(const ConvexBody& body);

/// Uniform unit direction number `index` of the radial stream for `seed`.
Vector radial_direction(int dim, std::uint64_t seed, long long index);

}  // namespace logbm
