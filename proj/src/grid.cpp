#include "logbm/grid.hpp"

#include "logbm/rng.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>

namespace logbm {

namespace {

constexpr double pi = std::numbers::pi;

double radical_inverse(std::uint64_t index, int base) {
    double result = 0.0;
    double f = 1.0 / base;
    while (index > 0) {
        result += f * static_cast<double>(index % base);
        index /= base;
        f /= base;
    }
    return result;
}

constexpr int primes[] = {2, 3, 5, 7, 11, 13, 17, 19};

Matrix symmetrise(const Matrix& half) {
    Matrix out(2 * half.rows(), half.cols());
    out.topRows(half.rows()) = half;
    out.bottomRows(half.rows()) = -half;
    return out;
}

}  // namespace

std::string to_string(GridKind kind) {
    switch (kind) {
        case GridKind::uniform_2d: return "uniform-2d";
        case GridKind::hopf_4d: return "hopf-4d";
        case GridKind::low_discrepancy: return "low-discrepancy";
        case GridKind::custom: return "custom";
    }
    return "custom";
}

DirectionGrid uniform_grid_2d(int pairs) {
    require(pairs >= 2, "uniform grid needs at least 2 antipodal pairs");
    Matrix half(pairs, 2);
    for (int k = 0; k < pairs; ++k) {
        const double a = k * pi / pairs;
        half(k, 0) = std::cos(a);
        half(k, 1) = std::sin(a);
    }
    DirectionGrid g;
    g.directions = symmetrise(half);
    g.mesh = pi / pairs;
    g.mesh_certified = true;
    g.kind = GridKind::uniform_2d;
    g.counts = {pairs};
    return g;
}

// The second half of the rows is the exact negation of the first: the
// antipode of (e, a, b) is (e, a + pi, b + pi).
DirectionGrid hopf_grid_4d(int n_eta, int n_alpha, int n_beta) {
    require(n_eta >= 1 && n_alpha >= 2 && n_beta >= 2 && n_alpha % 2 == 0 && n_beta % 2 == 0,
            "hopf grid needs n_eta >= 1 and even angle counts");
    const double de = (pi / 2) / n_eta;
    const double da = 2 * pi / n_alpha;
    const double db = 2 * pi / n_beta;
    Matrix half(n_eta * (n_alpha / 2) * n_beta, 4);
    int row = 0;
    for (int i = 0; i < n_eta; ++i) {
        const double e = (i + 0.5) * de;
        for (int j = 0; j < n_alpha / 2; ++j) {
            for (int k = 0; k < n_beta; ++k) {
                const double a = j * da;
                const double b = k * db;
                half.row(row++) << std::cos(e) * std::cos(a), std::cos(e) * std::sin(a),
                    std::sin(e) * std::cos(b), std::sin(e) * std::sin(b);
            }
        }
    }
    DirectionGrid g;
    g.directions = symmetrise(half);
    g.mesh = 0.5 * std::sqrt(de * de + da * da + db * db);
    g.mesh_certified = true;
    g.kind = GridKind::hopf_4d;
    g.counts = {n_eta, n_alpha, n_beta};
    return g;
}

DirectionGrid low_discrepancy_grid(int dim, int pairs, int mesh_probes, std::uint64_t probe_seed) {
    require(dim >= 2 && dim <= 8, "grid dimension must be in [2, 8]");
    require(pairs >= 1, "grid needs at least one pair");
    Matrix half(pairs, dim);
    for (int i = 0; i < pairs; ++i) {
        const std::uint64_t idx = static_cast<std::uint64_t>(i) + 1;
        if (dim == 2) {
            const double a = pi * radical_inverse(idx, 2);
            half.row(i) << std::cos(a), std::sin(a);
        } else if (dim == 4) {
            const double u1 = radical_inverse(idx, 2);
            const double a = 2 * pi * radical_inverse(idx, 3);
            const double b = 2 * pi * radical_inverse(idx, 5);
            const double c = std::sqrt(u1);
            const double s = std::sqrt(1.0 - u1);
            half.row(i) << c * std::cos(a), c * std::sin(a), s * std::cos(b), s * std::sin(b);
        } else {
            Vector v(dim);
            for (int d = 0; d < dim; ++d) {
                const double u = radical_inverse(idx, primes[d]);
                v(d) = std::sqrt(2.0) * boost::math::erf_inv(2.0 * u - 1.0);
            }
            if (v.norm() == 0.0) v(0) = 1.0;
            half.row(i) = v.normalized().transpose();
        }
    }
    DirectionGrid g;
    g.directions = symmetrise(half);
    g.mesh = estimate_mesh(g.directions, mesh_probes, probe_seed);
    g.mesh_certified = false;
    g.kind = GridKind::low_discrepancy;
    g.counts = {pairs};
    return g;
}

DirectionGrid default_grid(int dim) {
    if (dim == 2) return uniform_grid_2d(720);
    return low_discrepancy_grid(dim, 10000);
}

DirectionGrid certified_grid(int dim) {
    if (dim == 2) return uniform_grid_2d(720);
    if (dim == 4) return hopf_grid_4d(12, 48, 48);
    return low_discrepancy_grid(dim, 20000);
}

DirectionGrid with_directions(const DirectionGrid& grid, const std::vector<Vector>& extra) {
    DirectionGrid g = grid;
    if (extra.empty()) return g;
    const int n0 = grid.size();
    g.directions.conservativeResize(n0 + 2 * static_cast<int>(extra.size()), grid.dim());
    for (std::size_t i = 0; i < extra.size(); ++i) {
        require(extra[i].size() == grid.dim(), "extra direction has wrong dimension");
        require(extra[i].norm() > 0.0, "extra direction must be nonzero");
        const Vector u = extra[i].normalized();
        g.directions.row(n0 + 2 * static_cast<int>(i)) = u.transpose();
        g.directions.row(n0 + 2 * static_cast<int>(i) + 1) = -u.transpose();
    }
    g.kind = GridKind::custom;
    return g;
}

std::vector<int> antipodal_map(const Matrix& rows, double tol) {
    const int n = static_cast<int>(rows.rows());
    const int d = static_cast<int>(rows.cols());
    std::vector<int> out(n, -1);
    if (n == 0) return out;
    double scale = 0.0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, rows.row(i).norm());
    const double abs_tol = tol * std::max(scale, 1e-300);

    // Exact negations hash to negated keys; rounding is symmetric about zero.
    const double q = 1.0 / std::max(abs_tol, 1e-300);
    std::map<std::vector<long long>, int> index;
    auto key = [&](const Eigen::RowVectorXd& r) {
        std::vector<long long> k(d);
        for (int j = 0; j < d; ++j) k[j] = std::llround(r(j) * q);
        return k;
    };
    for (int i = 0; i < n; ++i) index.emplace(key(rows.row(i)), i);
    for (int i = 0; i < n; ++i) {
        const auto it = index.find(key(-rows.row(i)));
        if (it != index.end() &&
            (rows.row(it->second) + rows.row(i)).cwiseAbs().maxCoeff() <= abs_tol) {
            out[i] = it->second;
            continue;
        }
        for (int j = 0; j < n; ++j) {
            if ((rows.row(j) + rows.row(i)).cwiseAbs().maxCoeff() <= abs_tol) {
                out[i] = j;
                break;
            }
        }
    }
    return out;
}

double estimate_mesh(const Matrix& directions, int probes, std::uint64_t seed) {
    rng::CounterStream stream(seed, 0);
    const int dim = static_cast<int>(directions.cols());
    double worst = 0.0;
    Vector v(dim);
    for (int p = 0; p < probes; ++p) {
        for (int d = 0; d < dim; ++d) v(d) = stream.normal();
        v.normalize();
        const double best = (directions * v).maxCoeff();
        worst = std::max(worst, std::acos(std::clamp(best, -1.0, 1.0)));
    }
    return worst;
}

}  // namespace logbm
