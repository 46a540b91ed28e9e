#include "logbm/builtin.hpp"
#include "logbm/grid.hpp"
#include "logbm/rng.hpp"
#include "logbm/volume.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace logbm;
using nlohmann::json;

namespace {

const double pi = std::numbers::pi;

ConvexBody square_h() {
    Matrix n(4, 2);
    n << 1, 0, -1, 0, 0, 1, 0, -1;
    return ConvexBody::h_polytope(n, Vector::Ones(4));
}

ConvexBody diamond_h() {
    Matrix n(4, 2);
    n << 1, 1, -1, -1, 1, -1, -1, 1;
    return ConvexBody::h_polytope(n, Vector::Ones(4));
}

// (2 pi)^2 times the integral of r1 r2 over the triangle r1 + r2 <= 1, by
// the midpoint rule on an N x N grid (cells cut by the diagonal split exactly).
double complex_l1_quadrature(int N) {
    const double h = 1.0 / N;
    double s = 0.0;
    for (int i = 0; i < N; ++i) {
        for (int j = 0; i + j < N; ++j) {
            const double a = (i + 0.5) * h, b = (j + 0.5) * h;
            if (i + j < N - 1) {
                s += a * b * h * h;
            } else {
                // diagonal cell: integrate r1 r2 over the lower triangle exactly
                const double x0 = i * h, y0 = j * h;
                // int_0^h int_0^{h-x} (x0+x)(y0+y) dy dx
                auto F = [&](double x) {
                    const double t = h - x;
                    return (x0 + x) * (y0 * t + 0.5 * t * t);
                };
                // Simpson is exact: the integrand is a cubic in x
                s += h / 6.0 * (F(0) + 4 * F(0.5 * h) + F(h));
            }
        }
    }
    return 4 * pi * pi * s;
}

}  // namespace

TEST_CASE("exact planar areas") {
    CHECK(volume_exact_2d(square_h()).value == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(volume_exact_2d(diamond_h()).value == doctest::Approx(2.0).epsilon(1e-14));
    const ConvexBody cube = make_builtin({{"kind", "cube"}, {"dim", 2}});
    const ConvexBody cross = make_builtin({{"kind", "cross-polytope"}, {"dim", 2}});
    CHECK(std::abs(volume_exact_2d(cube).value - volume_analytic(cube).value) <= 1e-12);
    CHECK(std::abs(volume_exact_2d(cross).value - volume_analytic(cross).value) <= 1e-12);
    CHECK(volume_exact_2d(cube).half_width == 0.0);
    CHECK(volume_exact_2d(cube).method == VolumeMethod::exact_2d);

    // circumscribed regular m-gon
    for (int m : {90, 360, 720}) {
        const DirectionGrid g = uniform_grid_2d(m / 2);
        const ConvexBody poly = ConvexBody::h_polytope(g.directions, Vector::Ones(g.size()));
        const double area = volume_exact_2d(poly).value;
        CHECK(area == doctest::Approx(m * std::tan(pi / m)).epsilon(1e-12));
        CHECK(area > pi);
    }
    const DirectionGrid g = uniform_grid_2d(360);
    const ConvexBody p720 = ConvexBody::h_polytope(g.directions, Vector::Ones(g.size()));
    CHECK(volume_exact_2d(p720).value - pi < 1e-4);

    Matrix open(2, 2);
    open << 1, 0, -1, 0;
    CHECK_THROWS_AS(volume_exact_2d(ConvexBody::h_polytope(open, Vector::Ones(2))), GeometryError);
    CHECK_THROWS_AS(volume_exact_2d(make_builtin({{"kind", "euclidean-ball"}, {"n", 1}})),
                    GeometryError);
}

TEST_CASE("analytic volumes") {
    CHECK(volume_analytic(make_builtin({{"kind", "euclidean-ball"}, {"n", 2}})).value ==
          doctest::Approx(pi * pi / 2).epsilon(1e-14));
    const ConvexBody l1 = make_builtin({{"kind", "lp-ball"}, {"p", 1}, {"n", 2}, {"complex", true}});
    CHECK(volume_analytic(l1).value == doctest::Approx(pi * pi / 6).epsilon(1e-14));
    CHECK(complex_l1_quadrature(2000) == doctest::Approx(pi * pi / 6).epsilon(1e-12));
    const ConvexBody linf =
        make_builtin({{"kind", "lp-ball"}, {"p", "inf"}, {"n", 2}, {"complex", true}});
    CHECK(volume_analytic(linf).value == doctest::Approx(pi * pi).epsilon(1e-14));
    const ConvexBody e = make_builtin({{"kind", "hermitian-ellipsoid"}, {"diag", {1, 1, 4, 4}}});
    CHECK(volume_analytic(e).value == doctest::Approx(pi * pi / 8).epsilon(1e-14));
    // real lp-balls reduce to the cube and cross-polytope
    CHECK(volume_analytic(make_builtin({{"kind", "lp-ball"}, {"p", 1}, {"dim", 4}, {"complex", false}})).value ==
          doctest::Approx(16.0 / 24.0).epsilon(1e-14));
    CHECK(volume_analytic(make_builtin({{"kind", "lp-ball"}, {"p", "inf"}, {"dim", 4}, {"complex", false}})).value ==
          doctest::Approx(16.0).epsilon(1e-14));
    CHECK(volume_analytic(make_builtin({{"kind", "cube"}, {"dim", 4}})).value == 16.0);
    CHECK(volume_analytic(make_builtin({{"kind", "cross-polytope"}, {"dim", 4}})).value ==
          doctest::Approx(16.0 / 24.0).epsilon(1e-14));
    CHECK_THROWS_AS(volume_analytic(random_sym_polytope(4, 8, 3)), GeometryError);
    CHECK(!has_analytic_volume(random_sym_polytope(4, 8, 3)));
}

TEST_CASE("clopper-pearson") {
    // k = 0 and k = n have closed forms
    auto [lo0, hi0] = clopper_pearson(0, 10, 0.95);
    CHECK(lo0 == 0.0);
    CHECK(hi0 == doctest::Approx(1 - std::pow(0.025, 0.1)).epsilon(1e-12));
    auto [lo1, hi1] = clopper_pearson(10, 10, 0.95);
    CHECK(hi1 == 1.0);
    CHECK(lo1 == doctest::Approx(std::pow(0.025, 0.1)).epsilon(1e-12));
    // interior counts against bisection on the binomial tail sums
    auto tail_ge = [](int k, int n, double p) {
        double s = 0.0;
        for (int i = k; i <= n; ++i)
            s += std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) +
                          i * std::log(p) + (n - i) * std::log1p(-p));
        return s;
    };
    auto solve = [](auto f, double target) {
        double a = 1e-12, b = 1 - 1e-12;  // f increasing in p
        for (int i = 0; i < 200; ++i) {
            const double m = 0.5 * (a + b);
            (f(m) < target ? a : b) = m;
        }
        return 0.5 * (a + b);
    };
    for (int k : {1, 37, 99}) {
        auto [lo, hi] = clopper_pearson(k, 100, 0.99);
        const double lo_ref = solve([&](double p) { return tail_ge(k, 100, p); }, 0.005);
        const double hi_ref = solve([&](double p) { return tail_ge(k + 1, 100, p); }, 0.995);
        CHECK(lo == doctest::Approx(lo_ref).epsilon(1e-9));
        CHECK(hi == doctest::Approx(hi_ref).epsilon(1e-9));
    }
}

TEST_CASE("monte carlo volumes") {
    const ConvexBody ball = make_builtin({{"kind", "euclidean-ball"}, {"n", 2}});
    const ConvexBody cube = make_builtin({{"kind", "cube"}, {"dim", 4}});

    SUBCASE("all hits in the bounding box") {
        const VolumeEstimate v = volume_mc(cube, 100000, 5);
        CHECK(v.value == 16.0);
        CHECK(v.half_width == doctest::Approx(16.0 * (1 - clopper_pearson(100000, 100000, 0.999).first)));
        CHECK(v.accepted());
    }
    SUBCASE("coverage over seeds") {
        int covered = 0;
        for (std::uint64_t s = 0; s < 100; ++s) {
            const VolumeEstimate v = volume_mc(ball, 100000, 1000 + s);
            covered += v.lower() <= pi * pi / 2 && pi * pi / 2 <= v.upper();
        }
        CHECK(covered >= 99);
    }
    SUBCASE("thread count does not matter") {
        const ConvexBody P = make_builtin(builtin_zoo()[10].descriptor);
        const VolumeEstimate a = volume_mc(P, 50001, 77, 0.999, 1);
        const VolumeEstimate b = volume_mc(P, 50001, 77, 0.999, 8);
        CHECK(a == b);
        CHECK(a.value == b.value);
        const VolumeEstimate c = volume_mc(P, 50001, 78, 0.999, 1);
        CHECK(c.value != a.value);
    }
    SUBCASE("complex l1 within interval") {
        const ConvexBody l1 = make_builtin({{"kind", "lp-ball"}, {"p", 1}, {"n", 2}});
        const VolumeEstimate v = volume_mc(l1, 1000000, 9, 0.999, 2);
        CHECK(v.lower() <= pi * pi / 6);
        CHECK(pi * pi / 6 <= v.upper());
    }
    SUBCASE("scaling") {
        for (const auto& z : builtin_zoo()) {
            const ConvexBody K = make_builtin(z.descriptor);
            if (has_analytic_volume(K)) {
                CHECK(volume_analytic(scale(K, 2.0)).value ==
                      doctest::Approx(16 * volume_analytic(K).value).epsilon(1e-12));
                CHECK(volume_analytic(scale(K, 0.5)).value ==
                      doctest::Approx(volume_analytic(K).value / 16).epsilon(1e-12));
            }
        }
        const ConvexBody P = random_sym_polytope(4, 10, 21);
        const VolumeEstimate v1 = volume_mc(P, 200000, 1);
        const VolumeEstimate v2 = volume_mc(scale(P, 2.0), 200000, 2);
        CHECK(std::abs(v2.value - 16 * v1.value) <= v2.half_width + 16 * v1.half_width);
        const ConvexBody sq = square_h();
        CHECK(volume_exact_2d(scale(sq, 0.5)).value == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("monotone under inclusion") {
        const ConvexBody cross = make_builtin({{"kind", "cross-polytope"}, {"dim", 4}});
        const VolumeEstimate a = volume_mc(cross, 100000, 3);
        const VolumeEstimate b = volume_mc(ball, 100000, 4);
        const VolumeEstimate c = volume_mc(cube, 100000, 5);
        CHECK(a.value <= b.value + a.half_width + b.half_width);
        CHECK(b.value <= c.value + b.half_width + c.half_width);
    }
    SUBCASE("intersection") {
        const ConvexBody cross = make_builtin({{"kind", "cross-polytope"}, {"dim", 4}});
        const VolumeEstimate v = volume_mc(std::vector<ConvexBody>{cube, cross}, 100000, 6);
        CHECK(v.lower() <= 16.0 / 24.0);
        CHECK(16.0 / 24.0 <= v.upper());
    }
    SUBCASE("preconditions") {
        CHECK_THROWS_AS(volume_mc(ball, 9999, 1), GeometryError);
        CHECK_THROWS_AS(volume_mc(ball, 10000, 1, 1.0), GeometryError);
    }
}

TEST_CASE("betting interval") {
    const double alpha = 0.05;
    SUBCASE("coverage over seeds, skewed bernoulli") {
        // mean 0.1; expect at most alpha misses and allow slack for 400 trials
        int misses = 0;
        for (int seed = 0; seed < 400; ++seed) {
            rng::CounterStream gen(seed, 9);
            std::vector<double> x(400);
            for (double& v : x) v = gen.uniform() < 0.1 ? 1.0 : 0.0;
            const BettingInterval ci = betting_interval(x, alpha);
            if (0.1 < ci.lower || 0.1 > ci.upper) ++misses;
        }
        CHECK(misses <= 40);
    }
    SUBCASE("nested and contains the sample mean") {
        rng::CounterStream gen(3, 1);
        std::vector<double> x(1000);
        for (double& v : x) v = gen.uniform() * gen.uniform();
        const BettingInterval ci = betting_interval(x, alpha);
        CHECK(0.0 <= ci.lower);
        CHECK(ci.lower <= ci.mean);
        CHECK(ci.mean <= ci.upper);
        CHECK(ci.upper <= 1.0);
        const BettingInterval wide = betting_interval(x, 1e-4);
        CHECK(wide.lower <= ci.lower);
        CHECK(wide.upper >= ci.upper);
        // low variance beats the range-only Hoeffding width
        const double hoeffding = std::sqrt(std::log(2.0 / alpha) / (2.0 * 1000.0));
        CHECK(ci.upper - ci.lower < hoeffding);
    }
    SUBCASE("constant data") {
        const BettingInterval ci = betting_interval(std::vector<double>(500, 0.3), alpha);
        CHECK(ci.lower <= 0.3);
        CHECK(ci.upper >= 0.3);
        CHECK(ci.upper - ci.lower < 0.05);
    }
    CHECK_THROWS(betting_interval({}, alpha));
}

TEST_CASE("radial monte carlo") {
    const ConvexBody l15 = make_builtin({{"kind", "lp-ball"}, {"p", 1.5}, {"n", 2}});
    const double exact = volume_analytic(l15).value;
    const VolumeEstimate v = volume_radial_mc(l15, 20000, 3);
    CHECK(v.lower() <= exact);
    CHECK(exact <= v.upper());
    CHECK(v.method == VolumeMethod::radial_monte_carlo);

    // directions are unit and reproducible
    const Vector u = radial_direction(4, 3, 17);
    CHECK(u.norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK((u - radial_direction(4, 3, 17)).norm() == 0.0);

    // controls shrink the interval and keep coverage
    const ConvexBody ball = make_builtin({{"kind", "euclidean-ball"}, {"n", 2}});
    const ConvexBody l3 = make_builtin({{"kind", "lp-ball"}, {"p", 3}, {"n", 2}});
    const RadialFunction f = [&](const Vector& w) {
        const double r = 1.0 / gauge(l15, w);
        return RadialSample{r, r};
    };
    const RadiusBounds& r = l15.radii();
    const RadialVolume plain = volume_radial_mc(4, f, r.inner, r.outer, 20000, 5);
    const RadialVolume cv = volume_radial_mc(4, f, r.inner, r.outer, 20000, 5, 0.999, 1,
                                             {control_variate(ball), control_variate(l3)});
    CHECK(cv.lower.half_width < plain.lower.half_width);
    CHECK(cv.lower.lower() <= exact);
    CHECK(exact <= cv.lower.upper());
    const RadialVolume cv8 = volume_radial_mc(4, f, r.inner, r.outer, 20000, 5, 0.999, 8,
                                              {control_variate(ball), control_variate(l3)});
    CHECK(cv8.lower == cv.lower);
    CHECK(cv8.control_coefficients == cv.control_coefficients);
}

TEST_CASE("estimate serialisation") {
    VolumeEstimate v;
    v.value = 1.25;
    v.half_width = 0.125;
    v.samples = 12345;
    v.seed = 0xffffffffffffffffULL;
    v.method = VolumeMethod::monte_carlo;
    const json j = v;
    CHECK(j.at("method") == "monte-carlo");
    const VolumeEstimate back = json::parse(j.dump()).get<VolumeEstimate>();
    CHECK(back == v);
    CHECK_THROWS_AS(volume_method_from_string("bogus"), GeometryError);
}
