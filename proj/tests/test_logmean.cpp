#include "logbm/builtin.hpp"
#include "logbm/logmean.hpp"
#include "logbm/rng.hpp"
#include "logbm/volume.hpp"

#include <doctest.h>

#include <chrono>
#include <cmath>
#include <numbers>

using namespace logbm;
using nlohmann::json;

namespace {

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

Vector random_unit(rng::CounterStream& s, int d) {
    Vector x(d);
    for (int i = 0; i < d; ++i) x(i) = s.normal();
    return x.normalized();
}

// Brute force in the plane: rho_L(u) = min over theta of g(theta) / <u, theta>.
double planar_radial_oracle(const ConvexBody& K, const ConvexBody& T, double lambda, const Vector& u) {
    double best = std::numeric_limits<double>::infinity();
    const int m = 200000;
    for (int i = 0; i < m; ++i) {
        const double a = 2 * std::numbers::pi * i / m;
        const Vector t = v2(std::cos(a), std::sin(a));
        const double d = t.dot(u);
        if (d <= 1e-9) continue;
        best = std::min(best, log_mean_support_bound(K, T, lambda, t) / d);
    }
    // refine the bracket around the grid minimiser
    double lo_a = 0, hi_a = 0;
    {
        double b = std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i) {
            const double a = 2 * std::numbers::pi * i / m;
            const Vector t = v2(std::cos(a), std::sin(a));
            const double d = t.dot(u);
            if (d <= 1e-9) continue;
            const double v = log_mean_support_bound(K, T, lambda, t) / d;
            if (v < b) {
                b = v;
                lo_a = a - 2 * std::numbers::pi / m;
                hi_a = a + 2 * std::numbers::pi / m;
            }
        }
    }
    auto f = [&](double a) {
        const Vector t = v2(std::cos(a), std::sin(a));
        return log_mean_support_bound(K, T, lambda, t) / t.dot(u);
    };
    for (int it = 0; it < 200; ++it) {
        const double m1 = lo_a + (hi_a - lo_a) / 3, m2 = hi_a - (hi_a - lo_a) / 3;
        if (f(m1) < f(m2)) hi_a = m2; else lo_a = m1;
    }
    return std::min(best, f(0.5 * (lo_a + hi_a)));
}

}  // namespace

TEST_CASE("support bound examples") {
    const auto cube = make_builtin({{"kind", "cube"}, {"dim", 2}});
    const auto cross = make_builtin({{"kind", "cross-polytope"}, {"dim", 2}});
    const Vector t = v2(1, 1);
    CHECK(log_mean_support_bound(cube, cross, 0.0, t) == support(cube, t));
    CHECK(log_mean_support_bound(cube, cube, 0.3, t) == doctest::Approx(support(cube, t)).epsilon(1e-15));
    CHECK(log_mean_support_bound(cube, cross, 0.5, t) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK_THROWS_AS(log_mean_support_bound(cube, cross, 1.5, t), GeometryError);
    CHECK_THROWS_AS(log_mean_support_bound(cube, cross, -0.1, t), GeometryError);
}

TEST_CASE("support bound lies between the two supports") {
    rng::CounterStream s(1, 0);
    const auto K = make_builtin({{"kind", "lp-ball"}, {"p", 1.5}, {"n", 2}});
    const auto T = make_builtin({{"kind", "hermitian-ellipsoid"}, {"diag", {1, 1, 4, 4}}});
    for (int i = 0; i < 200; ++i) {
        const Vector t = random_unit(s, 4);
        const double hk = support(K, t), ht = support(T, t);
        for (double lam : {0.1, 0.5, 0.9}) {
            const double g = log_mean_support_bound(K, T, lam, t);
            CHECK(g >= std::min(hk, ht) * (1 - 1e-15));
            CHECK(g <= std::max(hk, ht) * (1 + 1e-15));
        }
    }
}

TEST_CASE("planar radial bounds bracket the brute-force value") {
    const auto cube = make_builtin({{"kind", "cube"}, {"dim", 2}});
    const auto cross = make_builtin({{"kind", "cross-polytope"}, {"dim", 2}});
    const auto poly = random_sym_polytope(2, 5, 3);
    const auto disc = make_builtin({{"kind", "euclidean-ball"}, {"n", 1}});
    rng::CounterStream s(4, 0);
    for (auto [K, T] : {std::pair{cube, cross}, std::pair{poly, disc}, std::pair{cross, poly}}) {
        for (double lam : {0.25, 0.5, 0.75}) {
            const LogMeanRadial radial(K, T, lam);
            for (int i = 0; i < 5; ++i) {
                const Vector u = random_unit(s, 2);
                const RadialBounds b = radial.bounds(u);
                const double oracle = planar_radial_oracle(K, T, lam, u);
                CHECK(b.converged);
                CHECK(b.lower <= oracle * (1 + 1e-12));
                CHECK(b.upper >= oracle * (1 - 1e-9));
                CHECK(b.upper - b.lower <= 1e-6 * b.lower);
            }
        }
    }
}

TEST_CASE("radial bounds: endpoints, equal bodies and dilates") {
    const auto K = make_builtin({{"kind", "lp-ball"}, {"p", 3}, {"n", 2}});
    const auto T = random_sym_polytope(4, 12, 2);
    rng::CounterStream s(8, 0);
    for (int i = 0; i < 10; ++i) {
        const Vector u = random_unit(s, 4);
        const double rk = 1.0 / gauge(K, u);
        const RadialBounds b0 = LogMeanRadial(K, T, 0.0).bounds(u);
        CHECK(b0.lower == doctest::Approx(rk).epsilon(1e-11));
        const RadialBounds b1 = LogMeanRadial(K, T, 1.0).bounds(u);
        CHECK(b1.upper == doctest::Approx(1.0 / gauge(T, u)).epsilon(1e-11));
        const RadialBounds same = LogMeanRadial(K, K, 0.4).bounds(u);
        CHECK(same.lower <= rk * (1 + 1e-12));
        CHECK(same.upper >= rk * (1 - 1e-12));
        CHECK(same.lower >= rk * (1 - 1e-6));
        const RadialBounds dil = LogMeanRadial(T, scale(T, 3.0), 0.5).bounds(u);
        const double expect = std::sqrt(3.0) / gauge(T, u);
        CHECK(dil.lower <= expect * (1 + 1e-12));
        CHECK(dil.upper >= expect * (1 - 1e-12));
        CHECK(dil.lower >= expect * (1 - 1e-9));
    }
}

TEST_CASE("4D radial lower bound never exceeds a direct support-bound witness") {
    const auto zoo = builtin_zoo();
    rng::CounterStream s(9, 0);
    const std::vector<std::pair<int, int>> pairs = {{0, 4}, {3, 6}, {7, 9}, {10, 15}, {0, 16}, {1, 2}};
    for (auto [a, b] : pairs) {
        const auto K = make_builtin(zoo[a].descriptor);
        const auto T = make_builtin(zoo[b].descriptor);
        const LogMeanRadial radial(K, T, 0.5);
        for (int i = 0; i < 4; ++i) {
            const Vector u = random_unit(s, 4);
            const RadialBounds r = radial.bounds(u);
            CAPTURE(zoo[a].name);
            CAPTURE(zoo[b].name);
            CHECK(r.converged);
            CHECK(r.upper - r.lower <= 1e-6 * r.lower);
            // every theta with <u, theta> > 0 gives rho_L(u) <= g(theta) / <u, theta>
            double witness = std::numeric_limits<double>::infinity();
            for (int k = 0; k < 3000; ++k) {
                const Vector t = (u + 0.7 * random_unit(s, 4)).normalized();
                if (t.dot(u) <= 0) continue;
                witness = std::min(witness, log_mean_support_bound(K, T, 0.5, t) / t.dot(u));
            }
            CHECK(r.lower <= witness * (1 + 1e-12));
        }
    }
}

TEST_CASE("planar outer body and certified inner dilate") {
    const auto cube = make_builtin({{"kind", "cube"}, {"dim", 2}});
    const auto cross = make_builtin({{"kind", "cross-polytope"}, {"dim", 2}});
    const auto grid = uniform_grid_2d(720);
    const LogMeanBody L = log_mean_outer(cube, cross, 0.5, grid);
    CHECK(L.shrink > 0.99);
    CHECK(L.shrink <= 1.0);
    const auto& h = std::get<HPolytope>(L.outer.rep());
    for (int i = 0; i < grid.size(); i += 37) {
        const Vector t = grid.direction(i);
        const double bound = log_mean_support_bound(cube, cross, 0.5, t);
        CHECK(h.offsets(i) == bound);
        CHECK(support(L.inner, t) <= bound * (1 + 1e-12));
        CHECK(support(L.outer, t) <= bound * (1 + 1e-12));
    }
    // frozen regression value of the 720-direction area
    const double area = volume_exact_2d(L.outer).value;
    CHECK(area > 2.8284271);
    CHECK(area < 4.0);
    MESSAGE("cube/cross L_1/2 outer area " << area << " inner " << volume_exact_2d(L.inner).value);

    // endpoint: with the cube normals in the grid the outer body is the cube
    const LogMeanBody L0 = log_mean_outer(cube, cross, 0.0, grid);
    CHECK(volume_exact_2d(L0.outer).value == doctest::Approx(4.0).epsilon(1e-12));
    CHECK_THROWS_AS(log_mean_outer(cube, cross, 2.0, grid), GeometryError);
}

TEST_CASE("refining the grid never raises the outer support") {
    const auto K = random_sym_polytope(2, 4, 5);
    const auto T = make_builtin({{"kind", "euclidean-ball"}, {"n", 1}});
    const auto coarse = uniform_grid_2d(90);
    const auto fine = uniform_grid_2d(180);
    const auto Lc = log_mean_outer(K, T, 0.3, coarse);
    const auto Lf = log_mean_outer(K, T, 0.3, fine);
    for (int i = 0; i < coarse.size(); ++i) {
        const Vector t = coarse.direction(i);
        CHECK(support(Lf.outer, t) <= support(Lc.outer, t) * (1 + 1e-12));
    }
    CHECK(volume_exact_2d(Lf.outer).value <= volume_exact_2d(Lc.outer).value * (1 + 1e-12));
}

TEST_CASE("timing of 4D radial bounds" * doctest::skip(false)) {
    const auto zoo = builtin_zoo();
    rng::CounterStream s(10, 0);
    for (auto [a, b] : std::vector<std::pair<int, int>>{{0, 4}, {0, 5}, {4, 5}, {7, 9}, {15, 16}, {3, 6}}) {
        const auto K = make_builtin(zoo[a].descriptor);
        const auto T = make_builtin(zoo[b].descriptor);
        const LogMeanRadial radial(K, T, 0.25, RadialOptions{1e-5});
        const auto t0 = std::chrono::steady_clock::now();
        int lps = 0, nodes = 0;
        const int n = 200;
        for (int i = 0; i < n; ++i) {
            const auto r = radial.bounds(random_unit(s, 4));
            lps += r.lp_solves;
            nodes += r.nodes;
        }
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        MESSAGE(zoo[a].name << " / " << zoo[b].name << ": " << ms / n << " ms per direction, "
                            << double(lps) / n << " LPs, " << double(nodes) / n << " nodes");
    }
}
