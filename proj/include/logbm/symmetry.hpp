#pragma once

#include "logbm/body.hpp"

namespace logbm {

struct SymmetryReport {
    bool pass = true;
    double worst_relative = 0.0;  // max |h(g theta) - h(theta)| / h(theta)
    Vector worst_direction;
    double worst_angle = 0.0;     // rotation angle (complex) at the worst offender
    int worst_flip = 0;           // sign-flip mask (unconditional) at the worst offender
    int tests = 0;
};

/// Tests |h(R_phi theta) - h(theta)| <= tol h(theta) for phi = 2 pi k / angles,
/// k = 1..angles-1, over every grid direction. Finite evidence, not proof.
SymmetryReport is_complex_body(const ConvexBody& body, int angles, const DirectionGrid& directions,
                               double tol);

/// Intersection of the rotated copies e^{i phi} K over phi = 2 pi k / angles.
/// H-polytopes stay exact (rotated halfspace families); complex-flagged
/// lp-balls and ellipsoids are returned unchanged; everything else becomes a
/// support-sampled body (pointwise minimum of rotated supports on `grid`).
ConvexBody complex_symmetrize(const ConvexBody& body, int angles, const DirectionGrid& grid);
ConvexBody complex_symmetrize(const ConvexBody& body, int angles);

/// The convex hull of the rotated copies, polar(complex_symmetrize(polar(K))).
/// V-polytopes stay V-polytopes.
ConvexBody complex_hull(const ConvexBody& body, int angles);

/// Support invariant under every coordinate sign flip, tested on the grid.
SymmetryReport is_unconditional(const ConvexBody& body, const DirectionGrid& directions, double tol);

}  // namespace logbm
