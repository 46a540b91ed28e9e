#pragma once

#include <Eigen/Dense>

#include <vector>

namespace logbm::lp {

enum class Status { optimal, infeasible, unbounded, iteration_limit };

/// Result of a standard-form linear program
///   minimize c^T y  subject to  M y = r,  y >= 0.
/// `duals` are the simplex multipliers pi = c_B^T B^{-1} in the caller's row
/// orientation, so that c_j - pi^T M_j >= 0 holds at optimality.
struct Solution {
    Status status = Status::infeasible;
    Eigen::VectorXd y;
    Eigen::VectorXd duals;
    double objective = 0.0;
    int pivots = 0;
    std::vector<int> basis;  // column index per row (>= cols: artificial)
};

struct Options {
    double tolerance = 1e-11;
    int max_pivots = 20000;
    int refactor_every = 40;
    /// Most negative reduced cost instead of Bland's first-improving rule;
    /// falls back to Bland after a run of degenerate pivots.
    bool dantzig = false;
    /// Starting basis (one column per row). Used when it is nonsingular and
    /// primal feasible, which skips phase 1.
    const std::vector<int>* warm_basis = nullptr;
};

/// Dense two-phase revised simplex with Bland's anti-cycling rule. Rows are
/// expected to be few (the basis inverse is kept explicitly); columns may be
/// many. Deterministic: identical input gives bit-identical output.
Solution solve_standard(const Eigen::MatrixXd& M, const Eigen::VectorXd& r,
                        const Eigen::VectorXd& c, const Options& opts = {});

}  // namespace logbm::lp
