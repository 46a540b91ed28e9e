#include "logbm/symmetry.hpp"

#include <cmath>
#include <numbers>

namespace logbm {

namespace {

double angle_of(int k, int angles) { return 2.0 * std::numbers::pi * k / angles; }

void record(SymmetryReport& r, double rel, const Vector& theta, double angle, int flip) {
    ++r.tests;
    if (r.worst_direction.size() == 0 || rel > r.worst_relative) {
        r.worst_relative = rel;
        r.worst_direction = theta;
        r.worst_angle = angle;
        r.worst_flip = flip;
    }
}

}  // namespace

SymmetryReport is_complex_body(const ConvexBody& body, int angles, const DirectionGrid& directions,
                               double tol) {
    require(angles >= 1, "angle count must be positive");
    require(directions.dim() == body.dim(), "grid dimension does not match the body");
    require(body.dim() % 2 == 0, "complex structure needs an even dimension");
    SymmetryReport r;
    for (int i = 0; i < directions.size(); ++i) {
        const Vector theta = directions.direction(i);
        const double h = support(body, theta);
        for (int k = 1; k < angles; ++k) {
            const double phi = angle_of(k, angles);
            const double rel = std::abs(support(body, rotate_complex(theta, phi)) - h) / h;
            record(r, rel, theta, phi, 0);
        }
    }
    r.pass = r.worst_relative <= tol;
    return r;
}

ConvexBody complex_symmetrize(const ConvexBody& body, int angles, const DirectionGrid& grid) {
    require(angles >= 2, "complex symmetrization needs at least 2 angles");
    require(body.dim() % 2 == 0, "complex structure needs an even dimension");
    if (declared_complex(body)) return body;
    if (const auto* h = std::get_if<HPolytope>(&body.rep())) {
        const int m = static_cast<int>(h->normals.rows());
        Matrix normals(m * angles, body.dim());
        Vector offsets(m * angles);
        for (int k = 0; k < angles; ++k) {
            for (int i = 0; i < m; ++i) {
                normals.row(k * m + i) =
                    rotate_complex(h->normals.row(i).transpose(), angle_of(k, angles)).transpose();
                offsets(k * m + i) = h->offsets(i);
            }
        }
        return ConvexBody::h_polytope(std::move(normals), std::move(offsets));
    }
    require(grid.dim() == body.dim(), "grid dimension does not match the body");
    // h_{R_phi K}(theta) = h_K(R_{-phi} theta)
    Vector values(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
        const Vector theta = grid.direction(i);
        double best = support(body, theta);
        for (int k = 1; k < angles; ++k)
            best = std::min(best, support(body, rotate_complex(theta, -angle_of(k, angles))));
        values(i) = best;
    }
    // Exact antipodal symmetry survives the min only up to rounding.
    const auto anti = antipodal_map(grid.directions, 1e-12);
    for (int i = 0; i < grid.size(); ++i)
        if (anti[i] >= 0) values(i) = values(anti[i]) = std::min(values(i), values(anti[i]));
    return ConvexBody::support_sampled(grid, std::move(values));
}

ConvexBody complex_symmetrize(const ConvexBody& body, int angles) {
    return complex_symmetrize(body, angles, default_grid(body.dim()));
}

ConvexBody complex_hull(const ConvexBody& body, int angles) {
    require(angles >= 2, "complex hull needs at least 2 angles");
    if (declared_complex(body)) return body;
    if (const auto* v = std::get_if<VPolytope>(&body.rep())) {
        const int m = static_cast<int>(v->vertices.rows());
        Matrix pts(m * angles, body.dim());
        for (int k = 0; k < angles; ++k)
            for (int i = 0; i < m; ++i)
                pts.row(k * m + i) =
                    rotate_complex(v->vertices.row(i).transpose(), angle_of(k, angles)).transpose();
        return ConvexBody::v_polytope(std::move(pts));
    }
    return polar(complex_symmetrize(polar(body), angles));
}

SymmetryReport is_unconditional(const ConvexBody& body, const DirectionGrid& directions, double tol) {
    require(directions.dim() == body.dim(), "grid dimension does not match the body");
    const int d = body.dim();
    require(d <= 16, "sign-flip enumeration limited to dimension 16");
    SymmetryReport r;
    for (int i = 0; i < directions.size(); ++i) {
        const Vector theta = directions.direction(i);
        const double h = support(body, theta);
        for (int mask = 1; mask < (1 << d); ++mask) {
            Vector t = theta;
            for (int j = 0; j < d; ++j)
                if (mask & (1 << j)) t(j) = -t(j);
            record(r, std::abs(support(body, t) - h) / h, theta, 0.0, mask);
        }
    }
    r.pass = r.worst_relative <= tol;
    return r;
}

}  // namespace logbm
