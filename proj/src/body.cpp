#include "logbm/body.hpp"

#include "logbm/lp.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

namespace logbm {

namespace {

constexpr double membership_slack = 1e-12;

double conjugate_exponent(double p) {
    if (std::isinf(p)) return 1.0;
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    return p / (p - 1.0);
}

// |z_j| per complex coordinate, or |x_j| per real coordinate.
Vector block_moduli(const Vector& x, bool complex) {
    if (!complex) return x.cwiseAbs();
    const int n = static_cast<int>(x.size() / 2);
    Vector m(n);
    for (int j = 0; j < n; ++j) m(j) = std::hypot(x(2 * j), x(2 * j + 1));
    return m;
}

// (sum_j a_j^p)^{1/p} for a >= 0, scaled to avoid overflow.
double p_norm(const Vector& a, double p) {
    const double top = a.maxCoeff();
    if (top == 0.0) return 0.0;
    if (std::isinf(p)) return top;
    if (p == 1.0) return a.sum();
    double acc = 0.0;
    for (int j = 0; j < a.size(); ++j) acc += std::pow(a(j) / top, p);
    return top * std::pow(acc, 1.0 / p);
}

void check_direction(const ConvexBody& body, const Vector& v, const char* what) {
    require(v.size() == body.dim(), std::string(what) + " has wrong dimension");
    require(v.allFinite(), std::string(what) + " is not finite");
}

int nearest_row(const Matrix& dirs, const Vector& u) {
    Eigen::Index best = 0;
    (dirs * u).maxCoeff(&best);
    return static_cast<int>(best);
}

// Max over each row block of (grid * points^T), then min over the grid.
double min_grid_support_of_points(const Matrix& grid, const Matrix& points) {
    double lo = std::numeric_limits<double>::infinity();
    const int block = 1024;
    for (int s = 0; s < grid.rows(); s += block) {
        const int len = std::min<int>(block, static_cast<int>(grid.rows()) - s);
        const Matrix prod = grid.middleRows(s, len) * points.transpose();
        lo = std::min(lo, prod.rowwise().maxCoeff().minCoeff());
    }
    return lo;
}

lp::Solution h_support_lp(const HPolytope& h, const Vector& theta) {
    return lp::solve_standard(h.normals.transpose(), theta, h.offsets);
}

bool full_rank(const Matrix& rows) {
    Eigen::JacobiSVD<Matrix> svd(rows);
    const Vector s = svd.singularValues();
    return s.size() == rows.cols() && s(s.size() - 1) > 1e-10 * std::max(1.0, s(0));
}

}  // namespace

struct ConvexBody::Cache {
    std::once_flag once;
    RadiusBounds radii;
};

ConvexBody::ConvexBody(Representation rep, int dim)
    : rep_(std::move(rep)), dim_(dim), cache_(std::make_shared<Cache>()) {}

ConvexBody ConvexBody::v_polytope(Matrix vertices) {
    const int d = static_cast<int>(vertices.cols());
    require(d >= 2 && d % 2 == 0, "body dimension must be even and >= 2");
    require(vertices.rows() >= d, "too few vertices for a nondegenerate polytope");
    require(vertices.allFinite(), "vertices must be finite");
    const auto anti = antipodal_map(vertices, 1e-9);
    for (int a : anti) require(a >= 0, "vertex set is not closed under negation");
    require(full_rank(vertices), "vertices do not span the space (origin not interior)");
    return ConvexBody(VPolytope{std::move(vertices)}, d);
}

ConvexBody ConvexBody::h_polytope(Matrix normals, Vector offsets) {
    const int d = static_cast<int>(normals.cols());
    require(d >= 2 && d % 2 == 0, "body dimension must be even and >= 2");
    require(normals.rows() == offsets.size(), "one offset per halfspace required");
    require(normals.allFinite() && offsets.allFinite(), "halfspaces must be finite");
    require(offsets.size() > 0 && offsets.minCoeff() > 0.0, "halfspace offsets must be positive");
    Matrix scaled = normals;
    for (int i = 0; i < scaled.rows(); ++i) {
        require(normals.row(i).norm() > 0.0, "halfspace normal must be nonzero");
        scaled.row(i) /= offsets(i);
    }
    const auto anti = antipodal_map(scaled, 1e-9);
    for (int a : anti) require(a >= 0, "halfspace set is not closed under normal negation");
    require(full_rank(normals), "halfspace normals do not span the space (unbounded)");
    return ConvexBody(HPolytope{std::move(normals), std::move(offsets)}, d);
}

ConvexBody ConvexBody::support_sampled(DirectionGrid grid, Vector values) {
    const int d = grid.dim();
    require(d >= 2 && d % 2 == 0, "body dimension must be even and >= 2");
    require(values.size() == grid.size(), "one support value per grid direction required");
    require(values.allFinite() && values.minCoeff() > 0.0, "support values must be positive");
    const auto anti = antipodal_map(grid.directions, 1e-12);
    for (int i = 0; i < grid.size(); ++i) {
        require(anti[i] >= 0, "grid is not closed under negation");
        require(std::abs(values(i) - values(anti[i])) <= 1e-12 * values(i),
                "support values are not symmetric on the grid");
    }
    require(full_rank(grid.directions), "grid does not span the space");

    // Subadditivity spot checks, with the nearest-direction error allowance.
    const double R = values.maxCoeff() / std::max(1e-3, 1.0 - grid.mesh);
    const int n = grid.size();
    const int checks = std::min(200, n);
    for (int c = 0; c < checks; ++c) {
        const int i = static_cast<int>((static_cast<long long>(c) * 7919) % n);
        const int j = static_cast<int>((static_cast<long long>(c) * 104729 + n / 3) % n);
        const Vector w = grid.direction(i) + grid.direction(j);
        const double len = w.norm();
        if (len < 1e-6) continue;
        const double hw = len * values(nearest_row(grid.directions, w / len));
        require(hw <= values(i) + values(j) + len * R * grid.mesh + 1e-9,
                "support values fail a subadditivity spot check");
    }
    return ConvexBody(SupportSampled{std::move(grid), std::move(values)}, d);
}

ConvexBody ConvexBody::lp_ball(double p, Vector weights, bool complex) {
    require(!std::isnan(p) && p >= 1.0, "lp-ball needs p >= 1");
    require(weights.size() >= 1 && weights.allFinite() && weights.minCoeff() > 0.0,
            "lp-ball weights must be positive");
    const int d = complex ? 2 * static_cast<int>(weights.size()) : static_cast<int>(weights.size());
    require(d >= 2 && d % 2 == 0, "body dimension must be even and >= 2");
    return ConvexBody(LpBall{p, std::move(weights), complex}, d);
}

ConvexBody ConvexBody::hermitian_ellipsoid(Matrix A, bool complex) {
    require(A.rows() == A.cols(), "ellipsoid matrix must be square");
    const int d = static_cast<int>(A.rows());
    require(d >= 2 && d % 2 == 0, "body dimension must be even and >= 2");
    require(A.allFinite(), "ellipsoid matrix must be finite");
    require((A - A.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + A.cwiseAbs().maxCoeff()),
            "ellipsoid matrix must be symmetric");
    Matrix sym = 0.5 * (A + A.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
    require(eig.info() == Eigen::Success && eig.eigenvalues().minCoeff() > 0.0,
            "ellipsoid matrix must be positive definite");
    if (complex)
        require(commutes_with_complex_structure(sym, 1e-10),
                "ellipsoid flagged complex but its matrix does not commute with i");
    Matrix inv = eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() *
                 eig.eigenvectors().transpose();
    inv = 0.5 * (inv + inv.transpose());
    return ConvexBody(HermitianEllipsoid{std::move(sym), std::move(inv), complex}, d);
}

std::string ConvexBody::kind_name() const {
    switch (rep_.index()) {
        case 0: return "v-polytope";
        case 1: return "h-polytope";
        case 2: return "support-sampled";
        case 3: return "lp-ball";
        default: return "hermitian-ellipsoid";
    }
}

ConvexBody ConvexBody::with_shape(Shape s, double scale) const {
    ConvexBody out = *this;
    out.shape_ = s;
    out.shape_scale_ = scale;
    return out;
}

const RadiusBounds& ConvexBody::radii() const {
    std::call_once(cache_->once, [this] {
        RadiusBounds& r = cache_->radii;
        if (const auto* b = std::get_if<LpBall>(&rep_)) {
            const double k = static_cast<double>(b->weights.size());
            const double e = 1.0 / b->p - 0.5;  // 1/p - 1/2, zero at p = 2
            const double scale = std::pow(k, e);
            // max and min of the norm on the unit sphere
            const double max_norm = b->weights.maxCoeff() * (e > 0 ? scale : 1.0);
            const double min_norm = b->weights.minCoeff() * (e < 0 ? scale : 1.0);
            r = {1.0 / max_norm, 1.0 / min_norm, true};
        } else if (const auto* el = std::get_if<HermitianEllipsoid>(&rep_)) {
            Eigen::SelfAdjointEigenSolver<Matrix> eig(el->A, Eigen::EigenvaluesOnly);
            r = {1.0 / std::sqrt(eig.eigenvalues().maxCoeff()),
                 1.0 / std::sqrt(eig.eigenvalues().minCoeff()), true};
        } else if (const auto* v = std::get_if<VPolytope>(&rep_)) {
            const DirectionGrid g = certified_grid(dim_);
            const double R = v->vertices.rowwise().norm().maxCoeff();
            const double lo = min_grid_support_of_points(g.directions, v->vertices) - R * g.mesh;
            r = {std::max(lo, 0.0), R, g.mesh_certified && lo > 0.0};
        } else if (const auto* h = std::get_if<HPolytope>(&rep_)) {
            Matrix pts = h->normals;
            for (int i = 0; i < pts.rows(); ++i) pts.row(i) /= h->offsets(i);
            const double inner = 1.0 / pts.rowwise().norm().maxCoeff();
            // circumradius = 1 / inradius of the polar conv{a_i / b_i}
            const DirectionGrid g = certified_grid(dim_);
            const double polar_lo =
                min_grid_support_of_points(g.directions, pts) - g.mesh / inner;
            r = {inner, polar_lo > 0 ? 1.0 / polar_lo : std::numeric_limits<double>::infinity(),
                 g.mesh_certified && polar_lo > 0};
        } else {
            const auto& s = std::get<SupportSampled>(rep_);
            const double delta = s.grid.mesh;
            const double R = delta < 1.0 ? s.values.maxCoeff() / (1.0 - delta)
                                         : std::numeric_limits<double>::infinity();
            const double lo = s.values.minCoeff() - R * delta;
            r = {std::max(lo, 0.0), R, s.grid.mesh_certified && lo > 0.0};
        }
    });
    return cache_->radii;
}

SupportValue support_detail(const ConvexBody& body, const Vector& theta) {
    check_direction(body, theta, "direction");
    require(theta.norm() > 0.0, "support direction must be nonzero");
    return std::visit(
        [&](const auto& rep) -> SupportValue {
            using T = std::decay_t<decltype(rep)>;
            if constexpr (std::is_same_v<T, VPolytope>) {
                return {(rep.vertices * theta).maxCoeff(), false, 0.0};
            } else if constexpr (std::is_same_v<T, HPolytope>) {
                const auto sol = h_support_lp(rep, theta);
                if (sol.status == lp::Status::infeasible || sol.status == lp::Status::unbounded)
                    throw GeometryError("h-polytope is unbounded in the support direction");
                require(sol.status == lp::Status::optimal, "support LP hit its pivot limit");
                return {sol.objective, false, 0.0};
            } else if constexpr (std::is_same_v<T, SupportSampled>) {
                const double len = theta.norm();
                const int i = nearest_row(rep.grid.directions, theta / len);
                return {len * rep.values(i), true, rep.grid.mesh};
            } else if constexpr (std::is_same_v<T, LpBall>) {
                const Vector m = block_moduli(theta, rep.complex);
                return {p_norm(m.cwiseQuotient(rep.weights), conjugate_exponent(rep.p)), false, 0.0};
            } else {
                return {std::sqrt(std::max(0.0, theta.dot(rep.A_inv * theta))), false, 0.0};
            }
        },
        body.rep());
}

double support(const ConvexBody& body, const Vector& direction) {
    return support_detail(body, direction).value;
}

Vector support_point(const ConvexBody& body, const Vector& theta) {
    check_direction(body, theta, "direction");
    require(theta.norm() > 0.0, "support direction must be nonzero");
    return std::visit(
        [&](const auto& rep) -> Vector {
            using T = std::decay_t<decltype(rep)>;
            if constexpr (std::is_same_v<T, VPolytope>) {
                Eigen::Index best = 0;
                (rep.vertices * theta).maxCoeff(&best);
                return rep.vertices.row(best).transpose();
            } else if constexpr (std::is_same_v<T, HPolytope>) {
                const auto sol = h_support_lp(rep, theta);
                require(sol.status == lp::Status::optimal, "support LP failed");
                Vector x = sol.duals;
                const double worst = (rep.normals * x).cwiseQuotient(rep.offsets).maxCoeff();
                if (worst > 1.0) x /= worst;
                return x;
            } else if constexpr (std::is_same_v<T, SupportSampled>) {
                throw GeometryError("support points are unavailable for support-sampled bodies");
            } else if constexpr (std::is_same_v<T, LpBall>) {
                const bool cx = rep.complex;
                const Vector m = block_moduli(theta, cx);
                const Vector c = m.cwiseQuotient(rep.weights);
                const int k = static_cast<int>(c.size());
                Vector b = Vector::Zero(k);
                if (std::isinf(rep.p)) {
                    b.setOnes();
                } else if (rep.p == 1.0) {
                    Eigen::Index j = 0;
                    c.maxCoeff(&j);
                    b(j) = 1.0;
                } else {
                    const double q = conjugate_exponent(rep.p);
                    const double dual = p_norm(c, q);
                    for (int j = 0; j < k; ++j) b(j) = std::pow(c(j) / dual, q - 1.0);
                }
                Vector x = Vector::Zero(theta.size());
                for (int j = 0; j < k; ++j) {
                    const double a = b(j) / rep.weights(j);
                    if (cx) {
                        if (m(j) > 0.0) {
                            x(2 * j) = a * theta(2 * j) / m(j);
                            x(2 * j + 1) = a * theta(2 * j + 1) / m(j);
                        }
                    } else if (m(j) > 0.0) {
                        x(j) = theta(j) > 0 ? a : -a;
                    }
                }
                return x;
            } else {
                const Vector y = rep.A_inv * theta;
                return y / std::sqrt(theta.dot(y));
            }
        },
        body.rep());
}

SupportWithPoint support_with_point(const ConvexBody& body, const Vector& theta) {
    if (const auto* h = std::get_if<HPolytope>(&body.rep())) {
        check_direction(body, theta, "direction");
        require(theta.norm() > 0.0, "support direction must be nonzero");
        const auto sol = h_support_lp(*h, theta);
        require(sol.status == lp::Status::optimal, "support LP failed");
        Vector x = sol.duals;
        const double worst = (h->normals * x).cwiseQuotient(h->offsets).maxCoeff();
        if (worst > 1.0) x /= worst;
        return {sol.objective, std::move(x)};
    }
    if (const auto* v = std::get_if<VPolytope>(&body.rep())) {
        check_direction(body, theta, "direction");
        require(theta.norm() > 0.0, "support direction must be nonzero");
        Eigen::Index best = 0;
        const double value = (v->vertices * theta).maxCoeff(&best);
        return {value, v->vertices.row(best).transpose()};
    }
    return {support(body, theta), support_point(body, theta)};
}

double gauge(const ConvexBody& body, const Vector& x) {
    check_direction(body, x, "point");
    if (x.norm() == 0.0) return 0.0;
    return std::visit(
        [&](const auto& rep) -> double {
            using T = std::decay_t<decltype(rep)>;
            if constexpr (std::is_same_v<T, VPolytope>) {
                const Vector ones = Vector::Ones(rep.vertices.rows());
                const auto sol = lp::solve_standard(rep.vertices.transpose(), x, ones);
                require(sol.status == lp::Status::optimal, "gauge LP failed");
                return sol.objective;
            } else if constexpr (std::is_same_v<T, HPolytope>) {
                return std::max(0.0, (rep.normals * x).cwiseQuotient(rep.offsets).maxCoeff());
            } else if constexpr (std::is_same_v<T, SupportSampled>) {
                return std::max(0.0, (rep.grid.directions * x).cwiseQuotient(rep.values).maxCoeff());
            } else if constexpr (std::is_same_v<T, LpBall>) {
                const Vector m = block_moduli(x, rep.complex);
                return p_norm(m.cwiseProduct(rep.weights), rep.p);
            } else {
                return std::sqrt(std::max(0.0, x.dot(rep.A * x)));
            }
        },
        body.rep());
}

bool contains(const ConvexBody& body, const Vector& x) {
    check_direction(body, x, "point");
    const double len = x.norm();
    if (len == 0.0) return true;
    if (const auto* h = std::get_if<HPolytope>(&body.rep())) {
        const Vector lhs = h->normals * x;
        for (int i = 0; i < lhs.size(); ++i)
            if (lhs(i) > h->offsets(i) * (1.0 + membership_slack)) return false;
        return true;
    }
    if (const auto* v = std::get_if<VPolytope>(&body.rep())) {
        const RadiusBounds& r = body.radii();
        if (len <= r.inner * (1.0 - membership_slack)) return true;
        if (len > r.outer * (1.0 + membership_slack)) return false;
        if ((v->vertices * x).maxCoeff() < len * len * (1.0 - membership_slack)) return false;
    }
    return gauge(body, x) <= 1.0 + membership_slack;
}

ConvexBody polar(const ConvexBody& body) {
    Shape shape = Shape::generic;
    if (body.shape() == Shape::cube) shape = Shape::cross_polytope;
    if (body.shape() == Shape::cross_polytope) shape = Shape::cube;
    const double shape_scale = 1.0 / body.shape_scale();
    const ConvexBody out = std::visit(
        [&](const auto& rep) -> ConvexBody {
            using T = std::decay_t<decltype(rep)>;
            if constexpr (std::is_same_v<T, VPolytope>) {
                return ConvexBody::h_polytope(rep.vertices, Vector::Ones(rep.vertices.rows()));
            } else if constexpr (std::is_same_v<T, HPolytope>) {
                Matrix pts = rep.normals;
                for (int i = 0; i < pts.rows(); ++i) pts.row(i) /= rep.offsets(i);
                return ConvexBody::v_polytope(std::move(pts));
            } else if constexpr (std::is_same_v<T, SupportSampled>) {
                Vector vals(rep.grid.size());
                for (int i = 0; i < rep.grid.size(); ++i) vals(i) = gauge(body, rep.grid.direction(i));
                return ConvexBody::support_sampled(rep.grid, std::move(vals));
            } else if constexpr (std::is_same_v<T, LpBall>) {
                return ConvexBody::lp_ball(conjugate_exponent(rep.p), rep.weights.cwiseInverse(),
                                           rep.complex);
            } else {
                return ConvexBody::hermitian_ellipsoid(rep.A_inv, rep.complex);
            }
        },
        body.rep());
    return out.with_shape(shape, shape_scale);
}

ConvexBody scale(const ConvexBody& body, double c) {
    require(std::isfinite(c) && c > 0.0, "scale factor must be positive");
    const ConvexBody out = std::visit(
        [&](const auto& rep) -> ConvexBody {
            using T = std::decay_t<decltype(rep)>;
            if constexpr (std::is_same_v<T, VPolytope>) {
                return ConvexBody::v_polytope(c * rep.vertices);
            } else if constexpr (std::is_same_v<T, HPolytope>) {
                return ConvexBody::h_polytope(rep.normals, c * rep.offsets);
            } else if constexpr (std::is_same_v<T, SupportSampled>) {
                return ConvexBody::support_sampled(rep.grid, c * rep.values);
            } else if constexpr (std::is_same_v<T, LpBall>) {
                return ConvexBody::lp_ball(rep.p, rep.weights / c, rep.complex);
            } else {
                return ConvexBody::hermitian_ellipsoid(rep.A / (c * c), rep.complex);
            }
        },
        body.rep());
    return out.with_shape(body.shape(), body.shape_scale() * c);
}

Vector axis_extents(const ConvexBody& body) {
    Vector out(body.dim());
    for (int i = 0; i < body.dim(); ++i) {
        Vector e = Vector::Zero(body.dim());
        e(i) = 1.0;
        out(i) = std::max(support(body, e), support(body, -e));
    }
    return out;
}

bool is_origin_symmetric(const ConvexBody& body, double tol) {
    if (const auto* v = std::get_if<VPolytope>(&body.rep())) {
        for (int a : antipodal_map(v->vertices, tol))
            if (a < 0) return false;
        return true;
    }
    if (const auto* h = std::get_if<HPolytope>(&body.rep())) {
        Matrix pts = h->normals;
        for (int i = 0; i < pts.rows(); ++i) pts.row(i) /= h->offsets(i);
        for (int a : antipodal_map(pts, tol))
            if (a < 0) return false;
        return true;
    }
    if (const auto* s = std::get_if<SupportSampled>(&body.rep())) {
        const auto anti = antipodal_map(s->grid.directions, 1e-12);
        for (int i = 0; i < s->grid.size(); ++i)
            if (anti[i] < 0 || std::abs(s->values(i) - s->values(anti[i])) > tol * s->values(i))
                return false;
        return true;
    }
    return true;
}

bool declared_complex(const ConvexBody& body) {
    if (const auto* b = std::get_if<LpBall>(&body.rep())) return b->complex;
    if (const auto* e = std::get_if<HermitianEllipsoid>(&body.rep()))
        return commutes_with_complex_structure(e->A, 1e-10);
    return false;
}

}  // namespace logbm
