#include "logbm/lp.hpp"

#include <doctest.h>

using logbm::lp::Status;
using logbm::lp::solve_standard;

TEST_CASE("two-variable program with a known vertex optimum") {
    // min -x - y  s.t.  x + 2y + s1 = 4,  3x + y + s2 = 6
    Eigen::MatrixXd M(2, 4);
    M << 1, 2, 1, 0, 3, 1, 0, 1;
    Eigen::VectorXd r(2), c(4);
    r << 4, 6;
    c << -1, -1, 0, 0;
    const auto sol = solve_standard(M, r, c);
    REQUIRE(sol.status == Status::optimal);
    CHECK(sol.objective == doctest::Approx(-2.8).epsilon(1e-12));
    CHECK(sol.y(0) == doctest::Approx(1.6));
    CHECK(sol.y(1) == doctest::Approx(1.2));
    // dual feasibility c - M^T pi >= 0 and strong duality
    const Eigen::VectorXd reduced = c - M.transpose() * sol.duals;
    CHECK(reduced.minCoeff() >= -1e-12);
    CHECK(r.dot(sol.duals) == doctest::Approx(sol.objective));
}

TEST_CASE("degenerate program that cycles under the textbook rule") {
    Eigen::MatrixXd M(3, 7);
    M << 0.25, -8, -1, 9, 1, 0, 0,
         0.5, -12, -0.5, 3, 0, 1, 0,
         0, 0, 1, 0, 0, 0, 1;
    Eigen::VectorXd r(3), c(7);
    r << 0, 0, 1;
    c << -0.75, 20, -0.5, 6, 0, 0, 0;
    const auto sol = solve_standard(M, r, c);
    REQUIRE(sol.status == Status::optimal);
    CHECK(sol.objective == doctest::Approx(-1.25).epsilon(1e-12));
}

TEST_CASE("negative right-hand sides and equality rows") {
    // min y0 + y1  s.t.  -y0 + y1 = -1  ->  y0 = 1, y1 = 0
    Eigen::MatrixXd M(1, 2);
    M << -1, 1;
    Eigen::VectorXd r(1), c(2);
    r << -1;
    c << 1, 1;
    const auto sol = solve_standard(M, r, c);
    REQUIRE(sol.status == Status::optimal);
    CHECK(sol.objective == doctest::Approx(1.0));
    CHECK((c - M.transpose() * sol.duals).minCoeff() >= -1e-12);
}

TEST_CASE("infeasible and unbounded programs are classified") {
    Eigen::MatrixXd M(1, 2);
    M << 1, 1;
    Eigen::VectorXd r(1), c(2);
    r << -1;
    c << 1, 1;
    CHECK(solve_standard(M, r, c).status == Status::infeasible);

    Eigen::MatrixXd M2(1, 2);
    M2 << 1, -1;
    Eigen::VectorXd r2(1), c2(2);
    r2 << 1;
    c2 << 0, -1;
    CHECK(solve_standard(M2, r2, c2).status == Status::unbounded);
}

TEST_CASE("redundant rows do not break phase one") {
    Eigen::MatrixXd M(2, 2);
    M << 1, 1, 2, 2;
    Eigen::VectorXd r(2), c(2);
    r << 1, 2;
    c << 1, 3;
    const auto sol = solve_standard(M, r, c);
    REQUIRE(sol.status == Status::optimal);
    CHECK(sol.objective == doctest::Approx(1.0));
}
