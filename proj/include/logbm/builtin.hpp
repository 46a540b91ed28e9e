#pragma once

#include "logbm/body.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace logbm {

/// Builds a body from a JSON descriptor. Recognised kinds:
///   euclidean-ball      {n | dim, radius?}
///   cube                {n | dim, scale?}
///   cross-polytope      {n | dim, scale?}
///   lp-ball             {p (number or "inf"), n | dim | weights, complex? (default true)}
///   hermitian-ellipsoid {matrix | diag, complex?}
///   random-sym-polytope {dim, pairs, seed}
///   v-polytope          {vertices, symmetrize?}
///   h-polytope          {halfspaces: [{normal, offset}], symmetrize?}
///   complex-hull        {body, angles}     (convex hull of rotated copies)
///   complex-symmetrized {body, angles}     (intersection of rotated copies)
///   scaled              {body, factor}
///   polar               {body}
/// `n` is the complex dimension, `dim` the real one.
ConvexBody make_builtin(const nlohmann::json& descriptor);

/// Vertices +-v_i, v_i uniform on the sphere; redrawn (up to 100 attempts)
/// while the certified inradius is below 0.05.
ConvexBody random_sym_polytope(int dim, int pairs, std::uint64_t seed);

struct ZooEntry {
    std::string name;
    nlohmann::json descriptor;
};

/// Standard test bodies in C^2: ball, cube, cross-polytope, three lp-balls,
/// three ellipsoids and five seeded random polytopes.
std::vector<ZooEntry> builtin_zoo();

}  // namespace logbm
