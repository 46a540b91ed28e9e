#include "logbm/builtin.hpp"
#include "logbm/grid.hpp"
#include "logbm/interpolation.hpp"
#include "logbm/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace logbm;
using nlohmann::json;

namespace {

const double inf = std::numeric_limits<double>::infinity();

Vector vec(std::initializer_list<double> v) {
    Vector x(static_cast<Eigen::Index>(v.size()));
    int i = 0;
    for (double a : v) x(i++) = a;
    return x;
}

ConvexBody lp(double p) { return ConvexBody::lp_ball(p, Vector::Ones(2), true); }

ConvexBody ell(const Vector& diag) { return ConvexBody::hermitian_ellipsoid(diag.asDiagonal(), true); }

Vector random_point(rng::CounterStream& s, int d) {
    Vector x(d);
    for (int i = 0; i < d; ++i) x(i) = s.normal();
    return x;
}

// real form of a Hermitian matrix in the interleaved layout
Matrix realify(const Eigen::MatrixXcd& H) {
    const int n = static_cast<int>(H.rows());
    Matrix A(2 * n, 2 * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const auto h = H(i, j);
            A(2 * i, 2 * j) = h.real();
            A(2 * i, 2 * j + 1) = -h.imag();
            A(2 * i + 1, 2 * j) = h.imag();
            A(2 * i + 1, 2 * j + 1) = h.real();
        }
    return A;
}

Matrix hermitian_spd(std::uint64_t seed) {
    rng::CounterStream s(seed, 0);
    Eigen::MatrixXcd B(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) B(i, j) = {s.normal(), s.normal()};
    const Eigen::MatrixXcd H = B * B.adjoint() + 0.5 * Eigen::MatrixXcd::Identity(2, 2);
    return realify(H);
}

}  // namespace

TEST_CASE("closed-form families") {
    const ClosedFamily l1inf = make_lp_pair(1.0, inf, 2);
    CHECK(interp_norm_closed(l1inf, 0.5, vec({1, 0, 0, 0})) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(interp_norm_closed(l1inf, 0.5, vec({0.6, 0.3, -0.5, 0.4})) ==
          doctest::Approx(vec({0.6, 0.3, -0.5, 0.4}).norm()).epsilon(1e-14));
    // Calderon exponent 1/p = (1 - l)/1 + l/inf; l = 1/3 gives p = 3/2
    const auto b = closed_body(l1inf, 1.0 / 3.0);
    CHECK(std::get<LpBall>(b.rep()).p == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(std::isinf(std::get<LpBall>(closed_body(l1inf, 1.0).rep()).p));

    const Matrix I = Matrix::Identity(4, 4);
    const ClosedFamily same = make_hermitian_pair(I, I);
    const Vector x = vec({0.3, -1.2, 0.4, 2.0});
    for (double l : {0.0, 0.3, 0.5, 1.0})
        CHECK(interp_norm_closed(same, l, x) == doctest::Approx(x.norm()).epsilon(1e-13));
    const ClosedFamily scalar = make_hermitian_pair(I, 4 * I);
    CHECK(interp_norm_closed(scalar, 0.5, vec({1, 0, 0, 0})) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));

    // commuting pair: A_l = A0^{1-l} A1^l entrywise on the diagonal
    const Vector d0 = vec({1, 1, 9, 9}), d1 = vec({4, 4, 1, 1});
    const Matrix G = geodesic(d0.asDiagonal(), d1.asDiagonal(), 0.25);
    for (int i = 0; i < 4; ++i)
        CHECK(G(i, i) == doctest::Approx(std::pow(d0(i), 0.75) * std::pow(d1(i), 0.25)).epsilon(1e-13));

    // non-commuting: det is log-affine, endpoints, symmetry, complex structure
    const Matrix A0 = hermitian_spd(1), A1 = hermitian_spd(2);
    CHECK((geodesic(A0, A1, 0.0) - A0).norm() == 0.0);
    CHECK((geodesic(A0, A1, 1.0) - A1).norm() == 0.0);
    for (double l : {0.2, 0.5, 0.9}) {
        const Matrix Al = geodesic(A0, A1, l);
        CHECK(std::log(Al.determinant()) ==
              doctest::Approx((1 - l) * std::log(A0.determinant()) + l * std::log(A1.determinant())).epsilon(1e-12));
        CHECK(commutes_with_complex_structure(Al, 1e-10));
        // geodesic symmetry A(A0, A1, l) = A(A1, A0, 1 - l)
        CHECK((Al - geodesic(A1, A0, 1 - l)).norm() <= 1e-10 * Al.norm());
    }

    CHECK_THROWS_AS(make_hermitian_pair(I, -I), GeometryError);
    CHECK_THROWS_AS(make_lp_pair(0.5, 2.0, 2), GeometryError);
    const ClosedFamily fj = closed_family_from_json(json::parse(R"({"family":"hermitian","diag0":[1,1,1,1],"diag1":[4,4,1,1]})"));
    CHECK(interp_norm_closed(fj, 0.5, vec({1, 0, 0, 0})) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
    const ClosedFamily lj = closed_family_from_json(json::parse(R"({"family":"lp","p0":1,"p1":"inf","n":2})"));
    CHECK(std::get<LpPair>(lj).p1 == inf);
}

TEST_CASE("certified boundary sup dominates dense sampling") {
    const ConvexBody K = lp(1.5), T = ell(vec({1, 1, 3, 3}));
    AnalyticCandidate f;
    f.lambda = 0.4;
    f.epsilon = 0.05;
    f.m = 2;
    rng::CounterStream s(8, 1);
    for (int k = 0; k < 5; ++k) f.coeffs.push_back(0.3 * random_point(s, 4));
    const double cert = certified_norm(K, T, f, 8.0, 4096);
    double sampled = 0.0;
    for (int b = 0; b < 2; ++b)
        for (int i = 0; i <= 200000; ++i) {
            const double t = -12.0 + 24.0 * i / 200000;
            sampled = std::max(sampled, gauge(b == 0 ? K : T, f.value({double(b), t})));
        }
    CHECK(cert >= sampled);
    CHECK(cert <= sampled * 1.05);
    // f(lambda) is the coefficient sum
    CHECK((f.value({0.4, 0.0}) - f.at_lambda()).norm() <= 1e-14);
}

TEST_CASE("upper bounds") {
    const Vector e1 = vec({1, 0, 0, 0});
    SUBCASE("equal endpoints") {
        const ConvexBody K = lp(3);
        const Vector x = vec({0.2, 0.7, -0.4, 0.1});
        InterpOptions o;
        o.m = 0;
        const UpperBound u = interp_norm_upper(K, K, 0.5, x, o);
        CHECK(u.value <= gauge(K, x) * std::exp(o.epsilon / 4) * (1 + 1e-3));
        CHECK(u.value >= gauge(K, x));
        o.epsilon = 1e-4;
        o.t_max = 300;
        o.certify_intervals = 1 << 17;
        CHECK(interp_norm_upper(K, K, 0.5, x, o).value == doctest::Approx(gauge(K, x)).epsilon(1e-3));
    }
    SUBCASE("Calderon pair, gap non-increasing in m") {
        const ConvexBody K = lp(1), T = lp(inf);
        const DualBound dual(K, T, 0.5, default_grid(4));
        double prev_gap = inf;
        for (int m : {1, 2, 3}) {
            InterpOptions o;
            o.m = m;
            const NormSandwich s = norm_sandwich(K, T, 0.5, e1, dual, o);
            CHECK(s.lower <= 1.0 + 1e-12);
            CHECK(s.upper >= 1.0);
            const double gap = (s.upper - s.lower) / s.lower;
            CHECK(gap <= 0.10);
            CHECK(gap <= prev_gap);
            prev_gap = gap;
        }
    }
    SUBCASE("Hermitian pairs against the geodesic") {
        const Matrix I = Matrix::Identity(4, 4);
        const Vector x = vec({0.6, 0.3, -0.5, 0.4});
        const ClosedFamily fam = make_hermitian_pair(I, vec({4, 4, 1, 1}).asDiagonal());
        const Vector xb = x / interp_norm_closed(fam, 0.5, x);  // boundary point of C_1/2
        const UpperBound u = interp_norm_upper(closed_body(fam, 0), closed_body(fam, 1), 0.5, xb);
        CHECK(u.value >= 1.0);
        CHECK(u.value <= 1.02);
        const ClosedFamily sc = make_hermitian_pair(I, 4 * I);
        const UpperBound v = interp_norm_upper(closed_body(sc, 0), closed_body(sc, 1), 0.5, e1);
        CHECK(v.value >= std::sqrt(2.0));
        CHECK(v.value <= 1.02 * std::sqrt(2.0));
    }
    SUBCASE("homogeneity") {
        const ConvexBody K = lp(1.5), T = ell(vec({1, 1, 4, 4}));
        const Vector x = vec({0.2, -0.4, 0.9, 0.3});
        InterpOptions o;
        o.m = 2;
        o.budget = 600;
        const double u = interp_norm_upper(K, T, 0.3, x, o).value;
        for (double c : {0.5, 3.0, 1024.0})
            CHECK(interp_norm_upper(K, T, 0.3, c * x, o).value == doctest::Approx(c * u).epsilon(1e-10));
    }
    SUBCASE("warm start never loses") {
        const ConvexBody K = lp(1), T = ell(vec({2, 2, 0.5, 0.5}));
        const Vector x = vec({0.5, 0.5, 0.2, -0.6});
        InterpOptions o;
        o.m = 2;
        o.budget = 200;
        const UpperBound a = interp_norm_upper(K, T, 0.6, x, o);
        o.budget = 1000;
        const UpperBound b = interp_norm_upper(K, T, 0.6, x, o, &a.candidate);
        CHECK(b.value <= a.value);
        o.m = 3;
        const UpperBound c = interp_norm_upper(K, T, 0.6, x, o, &b.candidate);
        CHECK(c.value <= b.value);
        // the returned candidate certifies the returned value
        CHECK((c.candidate.at_lambda() - x).norm() <= 1e-12);
        CHECK(certified_norm(K, T, c.candidate, o.t_max, o.certify_intervals) ==
              doctest::Approx(c.value).epsilon(1e-9));
    }
}

TEST_CASE("sandwich soundness against closed forms") {
    const DirectionGrid g = default_grid(4);
    const Matrix I = Matrix::Identity(4, 4);
    std::vector<ClosedFamily> fams{make_lp_pair(1.0, inf, 2), make_lp_pair(1.5, 3.0, 2),
                                   make_hermitian_pair(I, vec({4, 4, 1, 1}).asDiagonal()),
                                   make_hermitian_pair(hermitian_spd(3), hermitian_spd(4))};
    rng::CounterStream s(99, 0);
    InterpOptions o;
    o.m = 2;
    o.budget = 800;
    for (const auto& fam : fams) {
        const ConvexBody K = closed_body(fam, 0), T = closed_body(fam, 1);
        for (double l : {0.0, 0.25, 0.5, 1.0}) {
            const DualBound dual(K, T, l, g);
            for (int i = 0; i < 4; ++i) {
                const Vector x = random_point(s, 4);
                const NormSandwich sw = norm_sandwich(K, T, l, x, dual, o);
                const double exact = interp_norm_closed(fam, l, x);
                CHECK(sw.lower <= exact * (1 + 1e-9));
                CHECK(exact <= sw.upper * (1 + 1e-9));
                if (l == 0.0 || l == 1.0) {
                    CHECK(sw.upper == doctest::Approx(exact).epsilon(1e-8));
                    CHECK(sw.lower == doctest::Approx(exact).epsilon(1e-8));
                }
                // certified members of C_l lie in the grid outer body of L_l
                if (sw.upper <= 1.0) CHECK(dual.grid_value(x) <= 1.0);
                const Vector y = x / sw.upper;
                CHECK(dual.grid_value(y) <= 1.0 + 1e-12);
            }
        }
    }
}

TEST_CASE("dual lower bound") {
    const DirectionGrid g = default_grid(4);
    const ConvexBody K = lp(1.5), T = ell(vec({1, 1, 4, 4}));
    const Vector x = vec({0.3, 0.1, -0.2, 0.8});
    // lambda = 0 gives the gauge of K (attained at the polar point)
    CHECK(interp_norm_lower(K, T, 0.0, x, g) == doctest::Approx(gauge(K, x)).epsilon(1e-10));
    CHECK(interp_norm_lower(K, K, 0.7, x, g) == doctest::Approx(gauge(K, x)).epsilon(1e-10));
    const DualBound d(K, T, 0.5, g);
    CHECK(d.grid_value(x) <= d(x));
    // any direction is a valid witness, so the bound cannot exceed the Calderon-type oracle
    // for the lp pair
    const ClosedFamily fam = make_lp_pair(1.0, inf, 2);
    const DualBound d2(closed_body(fam, 0), closed_body(fam, 1), 0.5, g);
    CHECK(d2(vec({1, 0, 0, 0})) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("C_lambda proxies") {
    const DirectionGrid g = default_grid(4);
    rng::CounterStream s(5, 0);
    std::vector<Vector> probes;
    for (int i = 0; i < 12; ++i) probes.push_back(random_point(s, 4));
    InterpOptions o;
    o.m = 1;
    o.budget = 400;

    SUBCASE("equal balls collapse") {
        const ConvexBody B = lp(2);
        const CLambdaSandwich cs = c_lambda_sandwich(B, B, 0.5, probes, g, o, 2);
        for (const auto& r : cs.rows) {
            CHECK(r.lower == doctest::Approx(r.point.norm()).epsilon(1e-9));
            CHECK(r.upper <= r.point.norm() * std::exp(o.epsilon / 4) * (1 + 1e-3));
        }
    }
    SUBCASE("Hermitian pair bracketed by proxies") {
        const ClosedFamily fam = make_hermitian_pair(Matrix::Identity(4, 4), vec({4, 4, 1, 1}).asDiagonal());
        const ConvexBody K = closed_body(fam, 0), T = closed_body(fam, 1), C = closed_body(fam, 0.5);
        o.m = 3;
        o.budget = 1000;
        const CLambdaSandwich cs = c_lambda_sandwich(K, T, 0.5, probes, g, o, 2);
        REQUIRE(cs.inner.has_value());
        const auto& V = std::get<VPolytope>(cs.inner->rep()).vertices;
        for (int i = 0; i < V.rows(); ++i) CHECK(gauge(C, V.row(i).transpose()) <= 1.0 + 1e-12);
        double gap = 0.0;
        for (const auto& r : cs.rows) {
            const Vector u = r.point / r.point.norm();
            CHECK(gauge(cs.outer, u) <= gauge(C, u) * (1 + 1e-12));
            // radial gap between inner proxy and C along the probe
            gap = std::max(gap, r.upper / gauge(C, r.point) - 1.0);
        }
        CHECK(gap < 0.05);
        // outer contains C at the boundary points of C along the probes
        for (const auto& r : cs.rows) CHECK(contains(cs.outer, r.point / gauge(C, r.point)));
    }
}
