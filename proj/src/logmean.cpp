#include "logbm/logmean.hpp"

#include "logbm/lp.hpp"
#include "logbm/polygon.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

namespace logbm {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// Relative rounding allowance on certified quantities.
constexpr double safety = 4e-12;

void check_lambda(double lambda) {
    require(lambda >= 0.0 && lambda <= 1.0 && !std::isnan(lambda), "lambda must lie in [0, 1]");
}

void check_pair(const ConvexBody& K, const ConvexBody& T) {
    require(K.dim() == T.dim(), "bodies must have the same dimension");
}

struct Node {
    double q = 0.0;
    double lo = 0.0;  // lower bound on phi(q)
    double hi = inf;  // upper bound on phi(q)
};

// phi(q) = rho_{K + qT}(u) for one fixed direction u. Columns (support
// points) are kept between nodes.
class RaySolver {
public:
    RaySolver(const ConvexBody& K, const ConvexBody& T, const Vector& u, const RadialOptions& opts)
        : K_(K), T_(T), u_(u), opts_(opts), d_(static_cast<int>(u.size())),
          rK_(K.radii().inner), rT_(T.radii().inner) {
        // r u lies in each body, so the ray is covered from the start.
        add(false, rK_ * u);
        add(true, rT_ * u);
        add(false, support_point(K, u));
        add(true, support_point(T, u));
        smooth_ = smooth(K) && smooth(T);
        if (smooth_) {
            // orthonormal basis of the complement of u
            Eigen::HouseholderQR<Matrix> qr(u);
            basis_ = qr.householderQ() * Matrix::Identity(d_, d_);
            basis_ = basis_.rightCols(d_ - 1).eval();
            y_ = Vector::Zero(d_ - 1);
        }
    }

    int lp_solves() const { return lp_solves_; }

    Node solve(double q) {
        Node node{q, 0.0, inf};
        const double node_tol = 0.25 * opts_.rel_tol;
        if (smooth_) {
            newton(q, node, node_tol);
            if (node.hi - node.lo <= node_tol * node.lo) return node;
        }
        for (int it = 0; it < opts_.max_iterations; ++it) {
            // Columns: t, the two slacks, then support points in insertion
            // order, so a previous basis stays addressable after growth.
            const int nK = static_cast<int>(colK_.size());
            const int nT = static_cast<int>(colT_.size());
            const int cols = nK + nT + 3;
            Matrix M = Matrix::Zero(d_ + 2, cols);
            M.col(0).head(d_) = -u_;  // t
            M(d_, 1) = 1.0;           // slack of sum alpha <= 1
            M(d_ + 1, 2) = 1.0;       // slack of sum beta <= 1
            for (int c = 0; c < nK + nT; ++c) {
                const auto [isT, idx] = order_[c];
                if (isT) {
                    M.col(3 + c).head(d_) = q * colT_[idx];
                    M(d_ + 1, 3 + c) = 1.0;
                } else {
                    M.col(3 + c).head(d_) = colK_[idx];
                    M(d_, 3 + c) = 1.0;
                }
            }
            Vector r = Vector::Zero(d_ + 2);
            r(d_) = 1.0;
            r(d_ + 1) = 1.0;
            Vector c = Vector::Zero(cols);
            c(0) = -1.0;
            lp::Options lo;
            lo.dantzig = true;
            lo.warm_basis = warm_.empty() ? nullptr : &warm_;
            const lp::Solution sol = lp::solve_standard(M, r, c, lo);
            ++lp_solves_;
            if (sol.status != lp::Status::optimal) break;
            warm_ = sol.basis;

            Vector alpha = Vector::Zero(nK), beta = Vector::Zero(nT);
            for (int c = 0; c < nK + nT; ++c) {
                const auto [isT, idx] = order_[c];
                (isT ? beta(idx) : alpha(idx)) = std::max(0.0, sol.y(3 + c));
            }

            // Certified lower bound from the explicit point of K + qT.
            if (alpha.sum() > 1.0) alpha /= alpha.sum();
            if (beta.sum() > 1.0) beta /= beta.sum();
            Vector p = Vector::Zero(d_);
            for (int i = 0; i < nK; ++i) p += alpha(i) * colK_[i];
            for (int j = 0; j < nT; ++j) p += (q * beta(j)) * colT_[j];
            node.lo = std::max(node.lo, certify(p, q));

            // Dual direction, normalised to <theta, u> = 1, for the upper bound.
            Vector theta = sol.duals.head(d_);
            const double tu = theta.dot(u_);
            if (!(tu > 0.0) || !theta.allFinite()) break;
            theta /= tu;
            const SupportWithPoint sk = support_with_point(K_, theta);
            const SupportWithPoint st = support_with_point(T_, theta);
            node.hi = std::min(node.hi, (sk.value + q * st.value) * (1.0 + safety));
            if (node.hi - node.lo <= node_tol * node.lo) break;

            double muK = -inf, muT = -inf;
            for (const Vector& k : colK_) muK = std::max(muK, theta.dot(k));
            for (const Vector& t : colT_) muT = std::max(muT, theta.dot(t));
            bool added = false;
            if (sk.value > muK + 1e-13 * std::abs(sk.value)) {
                add(false, sk.point);
                added = true;
            }
            if (st.value > muT + 1e-13 * std::abs(st.value)) {
                add(true, st.point);
                added = true;
            }
            if (!added || static_cast<int>(colK_.size() + colT_.size()) > opts_.max_columns) break;
        }
        return node;
    }

private:
    static bool smooth(const ConvexBody& b) {
        if (std::holds_alternative<HermitianEllipsoid>(b.rep())) return true;
        if (const auto* l = std::get_if<LpBall>(&b.rep())) return l->p > 1.0 && std::isfinite(l->p);
        return false;
    }

    struct Eval {
        double value;  // h_K(theta) + q h_T(theta)
        Vector point;  // x_K + q x_T, the gradient of the value in theta
    };

    Eval evaluate(const Vector& y, double q) const {
        const Vector theta = u_ + basis_ * y;
        const SupportWithPoint sk = support_with_point(K_, theta);
        const SupportWithPoint st = support_with_point(T_, theta);
        return {sk.value + q * st.value, sk.point + q * st.point};
    }

    // Damped Newton for min over <theta, u> = 1 of h_K(theta) + q h_T(theta)
    // (smooth bodies only). Every iterate yields a point of K + qT and an
    // admissible theta, so both bounds stay valid whatever the convergence.
    void newton(double q, Node& node, double node_tol) {
        const int m = d_ - 1;
        Vector y = y_;
        Eval cur = evaluate(y, q);
        for (int it = 0; it < 40; ++it) {
            node.lo = std::max(node.lo, certify(cur.point, q));
            node.hi = std::min(node.hi, cur.value * (1.0 + safety));
            if (node.hi - node.lo <= node_tol * node.lo) break;
            const Vector g = basis_.transpose() * cur.point;
            const double h = 1e-7 * (1.0 + y.norm());
            Matrix H(m, m);
            for (int j = 0; j < m; ++j) {
                Vector yj = y;
                yj(j) += h;
                H.col(j) = (basis_.transpose() * evaluate(yj, q).point - g) / h;
            }
            H = 0.5 * (H + H.transpose()).eval();
            Vector step;
            Eigen::LDLT<Matrix> ldlt(H);
            if (ldlt.info() == Eigen::Success && ldlt.isPositive() && (ldlt.vectorD().array() > 0).all())
                step = -ldlt.solve(g);
            if (step.size() == 0 || !step.allFinite() || step.dot(g) >= 0) step = -g;
            double a = 1.0;
            Eval next = evaluate(y + step, q);
            while (next.value > cur.value + 1e-4 * a * step.dot(g) && a > 1e-10) {
                a *= 0.5;
                next = evaluate(y + a * step, q);
            }
            if (!(next.value <= cur.value)) break;
            y += a * step;
            cur = std::move(next);
        }
        node.lo = std::max(node.lo, certify(cur.point, q));
        node.hi = std::min(node.hi, cur.value * (1.0 + safety));
        y_ = y;
        add(false, support_point(K_, u_ + basis_ * y));
        add(true, support_point(T_, u_ + basis_ * y));
    }

    // t u lies in conv(p, B(0, r_K + q r_T)) for the returned t.
    double certify(const Vector& p, double q) const {
        const double along = p.dot(u_);
        if (!(along > 0.0)) return 0.0;
        const double perp = (p - along * u_).norm();
        const double rin = rK_ + q * rT_;
        return along * rin / (rin + perp) * (1.0 - safety);
    }

    const ConvexBody& K_;
    const ConvexBody& T_;
    const Vector& u_;
    const RadialOptions& opts_;
    int d_;
    double rK_, rT_;
    void add(bool isT, Vector v) {
        auto& cols = isT ? colT_ : colK_;
        order_.emplace_back(isT, static_cast<int>(cols.size()));
        cols.push_back(std::move(v));
    }

    std::vector<Vector> colK_, colT_;
    std::vector<std::pair<bool, int>> order_;
    std::vector<int> warm_;  // last optimal LP basis
    int lp_solves_ = 0;
    bool smooth_ = false;
    Matrix basis_;
    Vector y_;
};

struct PieceMin {
    double value = inf;
    double q = 0.0;
};

// min over q in [a, b] of c q^{-lambda} (alpha + beta q); b may be +inf.
PieceMin piece_min(double c, double lambda, double alpha, double beta, double a, double b) {
    auto f = [&](double q) {
        if (q == 0.0) return alpha > 0 ? inf : (alpha == 0.0 && beta >= 0 ? 0.0 : -inf);
        if (std::isinf(q)) return beta > 0 ? inf : (beta == 0.0 ? (alpha > 0 ? 0.0 : -inf) : -inf);
        return c * (alpha * std::pow(q, -lambda) + beta * std::pow(q, 1.0 - lambda));
    };
    double qs;
    if (alpha > 0 && beta > 0) {
        qs = std::clamp(lambda * alpha / ((1.0 - lambda) * beta), a, b);
    } else if (alpha > 0) {
        qs = b;  // nonincreasing
    } else {
        qs = a;  // nondecreasing
    }
    PieceMin out{f(qs), qs};
    // endpoints guard against rounding in the clamp
    for (double e : {a, b}) {
        const double v = f(e);
        if (v < out.value) out = {v, e};
    }
    return out;
}

}  // namespace

double log_mean_support_bound(const ConvexBody& K, const ConvexBody& T, double lambda,
                              const Vector& theta) {
    check_lambda(lambda);
    check_pair(K, T);
    if (lambda == 0.0) return support(K, theta);
    if (lambda == 1.0) return support(T, theta);
    return std::pow(support(K, theta), 1.0 - lambda) * std::pow(support(T, theta), lambda);
}

LogMeanRadial::LogMeanRadial(ConvexBody K, ConvexBody T, double lambda, RadialOptions opts)
    : K_(std::move(K)), T_(std::move(T)), lambda_(lambda), opts_(opts) {
    check_lambda(lambda);
    check_pair(K_, T_);
    require(K_.exact() && T_.exact(), "radial bounds need bodies with exact support points");
    require(opts_.rel_tol > 0.0, "radial tolerance must be positive");
}

double LogMeanRadial::inner_radius() const {
    return std::pow(K_.radii().inner, 1.0 - lambda_) * std::pow(T_.radii().inner, lambda_);
}

// rho_L(u) <= h_K(u)^{1-lambda} h_T(u)^lambda, using the direction u itself
double LogMeanRadial::outer_radius() const {
    return std::pow(K_.radii().outer, 1.0 - lambda_) * std::pow(T_.radii().outer, lambda_) *
           (1.0 + safety);
}

RadialBounds LogMeanRadial::bounds(const Vector& direction) const {
    require(direction.size() == K_.dim(), "direction has wrong dimension");
    const double len = direction.norm();
    require(len > 0.0, "direction must be nonzero");
    const Vector u = direction / len;
    RadialBounds out;

    if (lambda_ == 0.0 || lambda_ == 1.0) {
        const double rho = 1.0 / gauge(lambda_ == 0.0 ? K_ : T_, u);
        out.lower = rho * (1.0 - safety);
        out.upper = rho * (1.0 + safety);
        out.converged = true;
        return out;
    }

    const double lam = lambda_;
    const double c = std::pow(1.0 - lam, 1.0 - lam) * std::pow(lam, lam);
    const double gk = gauge(K_, u);
    const double gt = gauge(T_, u);
    const double rhoK_lo = (1.0 / gk) * (1.0 - safety);
    const double rhoT_lo = (1.0 / gt) * (1.0 - safety);

    RaySolver ray(K_, T_, u, opts_);
    std::map<double, Node> nodes;
    auto add_node = [&](double q) { nodes.emplace(q, ray.solve(q)); };

    // AM-GM equality point for the direction u itself.
    const double q0 = lam * support(K_, u) / ((1.0 - lam) * support(T_, u));
    add_node(q0);

    double best_upper = inf, best_lower = 0.0;
    for (int round = 0;; ++round) {
        best_upper = inf;
        for (const auto& [q, n] : nodes) best_upper = std::min(best_upper, c * std::pow(q, -lam) * n.hi);

        // Lower envelope: chord and monotone bounds on each piece.
        PieceMin worst{inf, 0.0};
        double worst_a = 0.0, worst_b = 0.0;
        double prev_q = 0.0, prev_lo = rhoK_lo;
        auto consider = [&](double a, double b, double alpha, double beta, double floor_value) {
            PieceMin m = piece_min(c, lam, alpha, beta, a, b);
            const PieceMin flat = piece_min(c, lam, floor_value, 0.0, a, b);
            if (flat.value > m.value) m.value = flat.value;  // max of two valid minorants
            if (m.value < worst.value) {
                worst = m;
                worst_a = a;
                worst_b = b;
            }
        };
        for (const auto& [q, n] : nodes) {
            const double slope = (n.lo - prev_lo) / (q - prev_q);
            consider(prev_q, q, prev_lo - slope * prev_q, slope, prev_lo);
            prev_q = q;
            prev_lo = n.lo;
        }
        consider(prev_q, inf, prev_lo - rhoT_lo * prev_q, rhoT_lo, prev_lo);
        best_lower = std::max(0.0, worst.value);

        if (best_upper - best_lower <= opts_.rel_tol * best_lower) {
            out.converged = true;
            break;
        }
        if (static_cast<int>(nodes.size()) >= opts_.max_nodes) break;

        // Refine where the minorant is lowest.
        double q_new = worst.q;
        auto near_existing = [&](double q) {
            if (q <= 0.0 || std::isinf(q)) return true;
            const auto it = nodes.lower_bound(q * (1 - 1e-9));
            return it != nodes.end() && it->first <= q * (1 + 1e-9);
        };
        if (near_existing(q_new)) {
            if (worst_a == 0.0) q_new = 0.5 * worst_b;
            else if (std::isinf(worst_b)) q_new = 2.0 * worst_a;
            else q_new = std::sqrt(worst_a * worst_b);
        }
        if (near_existing(q_new)) break;
        add_node(q_new);
    }

    out.lower = best_lower * (1.0 - safety);
    out.upper = best_upper;
    out.nodes = static_cast<int>(nodes.size());
    out.lp_solves = ray.lp_solves();
    return out;
}

LogMeanBody log_mean_outer(const ConvexBody& K, const ConvexBody& T, double lambda,
                           const DirectionGrid& grid) {
    check_lambda(lambda);
    check_pair(K, T);
    require(grid.dim() == K.dim(), "grid dimension does not match the bodies");
    const auto anti = antipodal_map(grid.directions, 1e-12);
    for (int a : anti) require(a >= 0, "grid must be closed under negation");

    const int n = grid.size();
    Vector offsets(n);
    for (int i = 0; i < n; ++i) offsets(i) = log_mean_support_bound(K, T, lambda, grid.direction(i));
    ConvexBody outer = ConvexBody::h_polytope(grid.directions, offsets);

    const RadiusBounds& rk = K.radii();
    const RadiusBounds& rt = T.radii();
    const double delta = grid.mesh;
    const double rho = (1.0 - lambda) * rk.outer / rk.inner + lambda * rt.outer / rt.inner;
    const double r_g = std::pow(rk.inner, 1.0 - lambda) * std::pow(rt.inner, lambda);
    const double R_out = delta < 1.0 ? offsets.maxCoeff() / (1.0 - delta) : inf;
    double covering = 1.0 / (std::exp(rho * delta) + delta * R_out / r_g);
    if (!std::isfinite(covering) || !(rk.inner > 0.0) || !(rt.inner > 0.0)) covering = 0.0;

    double vertex = 0.0;
    if (K.dim() == 2 && K.exact() && T.exact()) {
        // c P = conv(c v_i) lies in the convex set L once every c v_i does.
        const Matrix cycle = halfspace_polygon(grid.directions, offsets);
        const LogMeanRadial radial(K, T, lambda, RadialOptions{1e-12, 60, 80, 600});
        vertex = 1.0;
        for (int i = 0; i < cycle.rows(); ++i) {
            const Vector v = cycle.row(i).transpose();
            vertex = std::min(vertex, radial.bounds(v).lower / v.norm());
        }
    }
    const double shrink = std::max(covering, vertex);
    if (!(shrink > 0.0))
        throw GeometryError("inner body cannot be certified: grid too coarse for this body pair");
    ConvexBody inner = scale(outer, std::min(shrink, 1.0));
    return {std::move(outer), std::move(inner), lambda, grid, std::min(shrink, 1.0), covering, vertex};
}

}  // namespace logbm
