#pragma once

#include "logbm/vector.hpp"

namespace logbm {

/// Convex hull in the plane, counter-clockwise, collinear points dropped.
Matrix convex_hull_2d(const Matrix& points);

/// Vertex cycle (counter-clockwise) of {x : <x, a_i> <= b_i}, b_i > 0.
/// By polarity the region is bounded iff the origin lies strictly inside
/// conv{a_i / b_i}; each hull edge of those points gives one vertex.
Matrix halfspace_polygon(const Matrix& normals, const Vector& offsets);

double shoelace_area(const Matrix& cycle);

}  // namespace logbm
