#pragma once

#include "logbm/body.hpp"

#include <json.hpp>

#include <complex>
#include <optional>
#include <variant>
#include <vector>

namespace logbm {

/// f(z) = e^{eps (z - lambda)^2} sum_{k=-m..m} v_k e^{sigma k (z - lambda)},
/// v_k in C^n (interleaved real layout), so f(lambda) = sum_k v_k.
struct AnalyticCandidate {
    double lambda = 0.5;
    double epsilon = 0.05;
    double sigma = 1.0;
    int m = 0;
    std::vector<Vector> coeffs;  // index k + m

    Vector value(std::complex<double> z) const;
    Vector at_lambda() const;
    /// Same function with m raised (new coefficients zero).
    AnalyticCandidate widened(int new_m) const;
};

struct InterpOptions {
    int m = 3;
    double sigma = 1.0;
    double epsilon = 0.05;
    double t_max = 8.0;
    int t_points = 129;            // optimisation grid on [-t_max, t_max]
    int budget = 2000;             // objective evaluations
    int certify_intervals = 16384; // final certification grid
};

void to_json(nlohmann::json& j, const InterpOptions& o);

struct UpperBound {
    double value = 0.0;          // certified bound on ||f||_F, hence on ||x||_lambda
    double grid_value = 0.0;     // max over the optimisation grid (not certified)
    AnalyticCandidate candidate;
    int evaluations = 0;
    int sweeps = 0;
    bool low_quality = false;    // optimiser did not improve on the starting candidate
};

/// Certified sup over both boundary lines of the gauges of f: fine-grid
/// maximum plus a Lipschitz allowance per interval, and the Gaussian tail
/// beyond |t| = t_max. Requires exact gauges.
double certified_norm(const ConvexBody& K, const ConvexBody& T, const AnalyticCandidate& f,
                      double t_max, int intervals);

/// Upper bound on ||x||_lambda from the best candidate found by smoothed
/// coordinate-wise minimax descent (deterministic; v_k = 0 for k != 0 unless
/// warm-started). The result never exceeds the certified value of the
/// starting candidate or of `warm`.
UpperBound interp_norm_upper(const ConvexBody& K, const ConvexBody& T, double lambda,
                             const Vector& x, const InterpOptions& opts = {},
                             const AnalyticCandidate* warm = nullptr);

/// Precomputed h_K^{1-lambda} h_T^lambda on a grid; evaluates
/// max_theta <x, theta> / bound(theta), refined by a local search (every
/// direction gives a valid bound, so refinement only tightens it).
class DualBound {
public:
    DualBound(const ConvexBody& K, const ConvexBody& T, double lambda, const DirectionGrid& grid);

    /// Maximum over the grid only: the gauge of the finite outer body of L_lambda.
    double grid_value(const Vector& x) const;
    /// Grid maximum, then refinement around the best direction and at the
    /// polar points of x.
    double operator()(const Vector& x) const;

    double lambda() const { return lambda_; }

private:
    double bound(const Vector& theta) const;

    ConvexBody K_, T_;
    double lambda_;
    Matrix dirs_;
    Vector inv_bound_;
};

double interp_norm_lower(const ConvexBody& K, const ConvexBody& T, double lambda, const Vector& x,
                         const DirectionGrid& grid);

// ---- closed-form families (Calderon / Stein-Weiss, Hilbert geodesic) ------

struct LpPair {
    double p0 = 1.0;
    double p1 = std::numeric_limits<double>::infinity();
    Vector w0;  // weights per complex coordinate, default ones
    Vector w1;
};

struct HermitianPair {
    Matrix A0;
    Matrix A1;
};

using ClosedFamily = std::variant<LpPair, HermitianPair>;

/// Validates and fills default weights; `n` is the complex dimension.
LpPair make_lp_pair(double p0, double p1, int n);
HermitianPair make_hermitian_pair(Matrix A0, Matrix A1);

/// Parses {"family": "lp", p0, p1, n, w0?, w1?} or {"family": "hermitian", A0|diag0, A1|diag1}.
ClosedFamily closed_family_from_json(const nlohmann::json& j);

/// Bodies of the family at lambda: C_lambda, with C_0 and C_1 the endpoints.
ConvexBody closed_body(const ClosedFamily& family, double lambda);
double interp_norm_closed(const ClosedFamily& family, double lambda, const Vector& x);
/// A_0^{1/2} (A_0^{-1/2} A_1 A_0^{-1/2})^lambda A_0^{1/2}.
Matrix geodesic(const Matrix& A0, const Matrix& A1, double lambda);

// ---- sandwiches -------------------------------------------------------------

struct NormSandwich {
    double lower = 0.0;
    double upper = 0.0;
    double lambda = 0.0;
    Vector point;
    int evaluations = 0;
    int sweeps = 0;
    bool low_quality = false;
};

void to_json(nlohmann::json& j, const NormSandwich& s);

/// lower <= ||x||_lambda <= upper. At lambda in {0, 1} both are the endpoint gauge.
NormSandwich norm_sandwich(const ConvexBody& K, const ConvexBody& T, double lambda,
                           const Vector& x, const DualBound& dual, const InterpOptions& opts = {});

struct CLambdaSandwich {
    std::vector<NormSandwich> rows;
    std::optional<ConvexBody> inner;  // conv{+-x / upper(x)}, inside C_lambda (if full-dimensional)
    ConvexBody outer;                 // grid outer body of L_lambda, contains C_lambda
};

CLambdaSandwich c_lambda_sandwich(const ConvexBody& K, const ConvexBody& T, double lambda,
                                  const std::vector<Vector>& probes, const DirectionGrid& grid,
                                  const InterpOptions& opts = {}, int jobs = 1);

}  // namespace logbm
