#pragma once

#include "logbm/body.hpp"

#include <optional>

namespace logbm {

/// h_K(theta)^{1-lambda} h_T(theta)^lambda.
double log_mean_support_bound(const ConvexBody& K, const ConvexBody& T, double lambda,
                              const Vector& direction);

struct LogMeanBody {
    ConvexBody outer;  // h-polytope: one halfspace per grid direction
    ConvexBody inner;  // shrink * outer, certified inside L_lambda
    double lambda = 0.0;
    DirectionGrid grid;
    double shrink = 0.0;
    double shrink_covering = 0.0;  // mesh-based bound
    double shrink_vertex = 0.0;    // planar vertex certificate (0 when not computed)
};

/// Finite-direction outer body of L_lambda(K, T) and a certified inner
/// dilate. The covering bound for the inner dilate is
///   shrink = 1 / (e^{rho delta} + delta R_out / r_g),
///   rho = (1 - lambda) R_K / r_K + lambda R_T / r_T,
/// with delta the grid mesh, R_out >= circumradius of the outer body and
/// r_g <= min of the support bound. In the plane the outer vertices are also
/// certified one by one with the radial bounds below and the larger factor
/// is kept. Throws GeometryError when no positive factor can be certified.
LogMeanBody log_mean_outer(const ConvexBody& K, const ConvexBody& T, double lambda,
                           const DirectionGrid& grid);

struct RadialOptions {
    double rel_tol = 1e-7;    // stop when upper - lower <= rel_tol * lower
    int max_nodes = 40;
    int max_iterations = 80;  // column generation rounds per node
    int max_columns = 600;
};

struct RadialBounds {
    double lower = 0.0;
    double upper = std::numeric_limits<double>::infinity();
    int nodes = 0;
    int lp_solves = 0;
    bool converged = false;
};

/// Two-sided bounds on the radial function of L_lambda(K, T).
///
/// L_lambda is the intersection over s > 0 of (1-lambda) s^lambda K +
/// lambda s^{lambda-1} T (weighted AM-GM, with equality at s = h_T / h_K), so
///   rho_L(u) = inf_{q > 0} c q^{-lambda} phi(q),
///   c = (1-lambda)^{1-lambda} lambda^lambda,   phi(q) = rho_{K + qT}(u).
/// phi is concave and nondecreasing with phi(0) = rho_K(u) and slope at least
/// rho_T(u). Lower bounds on phi at finitely many nodes therefore give a
/// piecewise linear minorant, on which the infimum has a closed form; upper
/// bounds at the nodes give upper bounds on rho_L. Each node is solved by
/// column generation over support points: any convex combination is a point
/// of K + qT (lower bound) and the dual direction theta gives
/// phi(q) <= h_K(theta) + q h_T(theta) for <theta, u> = 1 (upper bound).
///
/// Both bodies must have exact support points (not support-sampled).
class LogMeanRadial {
public:
    LogMeanRadial(ConvexBody K, ConvexBody T, double lambda, RadialOptions opts = {});

    /// Bounds on rho_L(u / |u|).
    RadialBounds bounds(const Vector& u) const;

    double lambda() const { return lambda_; }
    const ConvexBody& K() const { return K_; }
    const ConvexBody& T() const { return T_; }
    const RadialOptions& options() const { return opts_; }

    /// Certified lower bound on the inradius of L and upper bound on its
    /// circumradius: r_K^{1-lambda} r_T^lambda and max(R_K, R_T).
    double inner_radius() const;
    double outer_radius() const;

private:
    ConvexBody K_;
    ConvexBody T_;
    double lambda_;
    RadialOptions opts_;
};

}  // namespace logbm
