#pragma once

#include "logbm/vector.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace logbm {

enum class GridKind { uniform_2d, hopf_4d, low_discrepancy, custom };

std::string to_string(GridKind kind);

/// Finite set of unit directions, closed under negation, with a bound on its
/// covering radius (largest geodesic distance from a unit vector to the set).
/// `mesh_certified` is false when the mesh is a sampled estimate.
struct DirectionGrid {
    Matrix directions;  // one unit direction per row
    double mesh = 0.0;
    bool mesh_certified = false;
    GridKind kind = GridKind::custom;
    std::vector<int> counts;

    int dim() const { return static_cast<int>(directions.cols()); }
    int size() const { return static_cast<int>(directions.rows()); }
    Vector direction(int i) const { return directions.row(i).transpose(); }
};

/// 2m directions at angles k*pi/m. The recorded mesh is pi/m, the angular
/// spacing, which bounds the covering radius pi/(2m) from above.
DirectionGrid uniform_grid_2d(int pairs);

/// Hopf-coordinate product grid on S^3:
/// (cos e cos a, cos e sin a, sin e cos b, sin e sin b).
/// Covering radius bound: half the Euclidean diagonal of a parameter cell.
DirectionGrid hopf_grid_4d(int n_eta, int n_alpha, int n_beta);

/// Halton points mapped to the sphere (Hopf map in 4D, angle in 2D, normal
/// quantiles otherwise), symmetrised. Mesh estimated from random probes.
DirectionGrid low_discrepancy_grid(int dim, int pairs, int mesh_probes = 2000,
                                   std::uint64_t probe_seed = 0x9e3779b9ULL);

/// Default grid for the given real dimension: 720 antipodal pairs in 2D,
/// 10,000 low-discrepancy pairs (20,000 directions) otherwise.
DirectionGrid default_grid(int dim);

/// Grid with a certified mesh suitable for radius bounds.
DirectionGrid certified_grid(int dim);

/// Adds +-v/|v| for every extra vector. The mesh bound stays valid.
DirectionGrid with_directions(const DirectionGrid& grid, const std::vector<Vector>& extra);

/// For each row i, the index j with rows(j) = -rows(i) within `tol` (max-norm,
/// relative to the largest row norm), or -1 when no such row exists.
std::vector<int> antipodal_map(const Matrix& rows, double tol = 1e-12);

/// Largest observed geodesic distance from random unit probes to the grid.
double estimate_mesh(const Matrix& directions, int probes, std::uint64_t seed);

}  // namespace logbm
