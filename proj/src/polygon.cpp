#include "logbm/polygon.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace logbm {

namespace {

double cross(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }

}  // namespace

Matrix convex_hull_2d(const Matrix& points) {
    require(points.cols() == 2, "planar hull needs 2-dimensional points");
    const int n = static_cast<int>(points.rows());
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        if (points(a, 0) != points(b, 0)) return points(a, 0) < points(b, 0);
        return points(a, 1) < points(b, 1);
    });
    auto turn = [&](int o, int a, int b) {
        return cross(points(a, 0) - points(o, 0), points(a, 1) - points(o, 1),
                     points(b, 0) - points(o, 0), points(b, 1) - points(o, 1));
    };
    // Andrew's monotone chain
    std::vector<int> hull(2 * n);
    int k = 0;
    for (int i = 0; i < n; ++i) {
        while (k >= 2 && turn(hull[k - 2], hull[k - 1], idx[i]) <= 0) --k;
        hull[k++] = idx[i];
    }
    for (int i = n - 2, lower = k + 1; i >= 0; --i) {
        while (k >= lower && turn(hull[k - 2], hull[k - 1], idx[i]) <= 0) --k;
        hull[k++] = idx[i];
    }
    const int m = std::max(0, k - 1);
    Matrix out(m, 2);
    for (int i = 0; i < m; ++i) out.row(i) = points.row(hull[i]);
    return out;
}

Matrix halfspace_polygon(const Matrix& normals, const Vector& offsets) {
    require(normals.cols() == 2, "planar polygon needs 2-dimensional normals");
    require(normals.rows() == offsets.size() && offsets.size() >= 3, "need at least 3 halfspaces");
    require(offsets.minCoeff() > 0.0, "offsets must be positive (origin interior)");
    Matrix pts = normals;
    for (int i = 0; i < pts.rows(); ++i) pts.row(i) /= offsets(i);
    const Matrix raw = convex_hull_2d(pts);
    // Near-duplicate halfspaces show up as consecutive dual points in almost
    // the same direction from 0; keep the farther (tighter) one.
    std::vector<int> keep;
    for (int k = 0; k < raw.rows(); ++k) {
        if (!keep.empty()) {
            const int b = keep.back();
            const double det = raw(b, 0) * raw(k, 1) - raw(b, 1) * raw(k, 0);
            if (std::abs(det) <= 1e-14 * (raw.row(b).squaredNorm() + raw.row(k).squaredNorm()) &&
                raw.row(b).dot(raw.row(k)) > 0.0) {
                if (raw.row(k).squaredNorm() > raw.row(b).squaredNorm()) keep.back() = k;
                continue;
            }
        }
        keep.push_back(k);
    }
    while (keep.size() > 1) {
        const int a = keep.back(), b = keep.front();
        const double det = raw(a, 0) * raw(b, 1) - raw(a, 1) * raw(b, 0);
        if (!(std::abs(det) <= 1e-14 * (raw.row(a).squaredNorm() + raw.row(b).squaredNorm()) &&
              raw.row(a).dot(raw.row(b)) > 0.0))
            break;
        if (raw.row(a).squaredNorm() > raw.row(b).squaredNorm()) keep.front() = a;
        keep.pop_back();
    }
    Matrix hull(keep.size(), 2);
    for (std::size_t k = 0; k < keep.size(); ++k) hull.row(k) = raw.row(keep[k]);
    const int m = static_cast<int>(hull.rows());
    if (m < 3) throw GeometryError("halfspace intersection is unbounded (normals do not surround 0)");
    Matrix cycle(m, 2);
    for (int k = 0; k < m; ++k) {
        const int j = (k + 1) % m;
        const double ax = hull(k, 0), ay = hull(k, 1), bx = hull(j, 0), by = hull(j, 1);
        const double det = ax * by - ay * bx;  // twice the signed area of (0, p_k, p_j)
        if (!(det > 1e-14 * (ax * ax + ay * ay + bx * bx + by * by)))
            throw GeometryError("halfspace intersection is unbounded (origin on the dual hull boundary)");
        // solve <v, p_k> = 1, <v, p_j> = 1
        cycle(k, 0) = (by - ay) / det;
        cycle(k, 1) = (ax - bx) / det;
    }
    return cycle;
}

double shoelace_area(const Matrix& cycle) {
    const int m = static_cast<int>(cycle.rows());
    double acc = 0.0;
    for (int k = 0; k < m; ++k) {
        const int j = (k + 1) % m;
        acc += cross(cycle(k, 0), cycle(k, 1), cycle(j, 0), cycle(j, 1));
    }
    return 0.5 * std::abs(acc);
}

}  // namespace logbm
