#include "logbm/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace logbm::lp {

namespace {

class RevisedSimplex {
public:
    RevisedSimplex(const Eigen::MatrixXd& M, const Eigen::VectorXd& r, const Options& opts)
        : M_(M), r_(r), opts_(opts), rows_(static_cast<int>(M.rows())),
          cols_(static_cast<int>(M.cols())) {
        flipped_.assign(rows_, false);
        for (int i = 0; i < rows_; ++i) {
            if (r_(i) < 0) {
                M_.row(i) *= -1.0;
                r_(i) = -r_(i);
                flipped_[i] = true;
            }
        }
        basis_.resize(rows_);
        is_basic_.assign(cols_ + rows_, false);
        for (int i = 0; i < rows_; ++i) {
            basis_[i] = cols_ + i;
            is_basic_[cols_ + i] = true;
        }
        binv_ = Eigen::MatrixXd::Identity(rows_, rows_);
        xb_ = r_;
    }

    bool load(const std::vector<int>& basis) {
        if (static_cast<int>(basis.size()) != rows_) return false;
        std::vector<bool> seen(cols_ + rows_, false);
        for (int j : basis) {
            if (j < 0 || j >= cols_ || seen[j]) return false;
            seen[j] = true;
        }
        Eigen::MatrixXd B(rows_, rows_);
        for (int i = 0; i < rows_; ++i) B.col(i) = M_.col(basis[i]);
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
        if (!(std::abs(lu.determinant()) > 1e-12)) return false;
        const Eigen::MatrixXd binv = lu.inverse();
        const Eigen::VectorXd xb = binv * r_;
        if (!binv.allFinite() || xb.minCoeff() < -1e-10 * (1.0 + r_.lpNorm<Eigen::Infinity>())) return false;
        basis_ = basis;
        is_basic_ = seen;
        binv_ = binv;
        xb_ = xb.cwiseMax(0.0);
        return true;
    }

    Solution run(const Eigen::VectorXd& c) {
        Solution sol;
        if (opts_.warm_basis && load(*opts_.warm_basis)) return finish(c, sol);
        // Phase 1: minimise the sum of artificials.
        Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(cols_ + rows_);
        phase1.tail(rows_).setOnes();
        Status st = iterate(phase1, /*allow_artificial=*/false);
        sol.pivots = pivots_;
        if (st == Status::iteration_limit) {
            sol.status = st;
            return sol;
        }
        double infeas = 0.0;
        for (int i = 0; i < rows_; ++i)
            if (basis_[i] >= cols_) infeas += xb_(i);
        if (infeas > 1e-9 * (1.0 + r_.lpNorm<1>())) {
            sol.status = Status::infeasible;
            return sol;
        }
        drive_out_artificials();
        return finish(c, sol);
    }

private:
    Solution finish(const Eigen::VectorXd& c, Solution& sol) {
        Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(cols_ + rows_);
        phase2.head(cols_) = c;
        const Status st = iterate(phase2, false);
        sol.pivots = pivots_;
        sol.status = st;
        if (st != Status::optimal) return sol;

        sol.y = Eigen::VectorXd::Zero(cols_);
        for (int i = 0; i < rows_; ++i)
            if (basis_[i] < cols_) sol.y(basis_[i]) = std::max(0.0, xb_(i));
        sol.objective = c.dot(sol.y);
        Eigen::VectorXd pi = multipliers(phase2);
        for (int i = 0; i < rows_; ++i)
            if (flipped_[i]) pi(i) = -pi(i);
        sol.duals = pi;
        sol.basis = basis_;
        return sol;
    }

    Eigen::VectorXd column(int j) const {
        if (j < cols_) return M_.col(j);
        Eigen::VectorXd e = Eigen::VectorXd::Zero(rows_);
        e(j - cols_) = 1.0;
        return e;
    }

    Eigen::VectorXd multipliers(const Eigen::VectorXd& cost) const {
        Eigen::VectorXd cb(rows_);
        for (int i = 0; i < rows_; ++i) cb(i) = cost(basis_[i]);
        return binv_.transpose() * cb;
    }

    void refactor() {
        Eigen::MatrixXd B(rows_, rows_);
        for (int i = 0; i < rows_; ++i) B.col(i) = column(basis_[i]);
        binv_ = B.partialPivLu().inverse();
        xb_ = binv_ * r_;
    }

    void pivot(int leave_row, int enter, const Eigen::VectorXd& w) {
        const double wl = w(leave_row);
        const double step = xb_(leave_row) / wl;
        xb_ -= step * w;
        xb_(leave_row) = step;
        binv_.row(leave_row) /= wl;
        for (int i = 0; i < rows_; ++i) {
            if (i == leave_row || w(i) == 0.0) continue;
            binv_.row(i) -= w(i) * binv_.row(leave_row);
        }
        is_basic_[basis_[leave_row]] = false;
        basis_[leave_row] = enter;
        is_basic_[enter] = true;
        ++pivots_;
        if (pivots_ % opts_.refactor_every == 0) refactor();
    }

    Status iterate(const Eigen::VectorXd& cost, bool allow_artificial) {
        const double tol = opts_.tolerance;
        const int candidates = allow_artificial ? cols_ + rows_ : cols_;
        while (true) {
            if (pivots_ >= opts_.max_pivots) return Status::iteration_limit;
            const Eigen::RowVectorXd pi = multipliers(cost).transpose();
            // Bland: first improving column by index. Dantzig: most negative.
            const bool bland = !opts_.dantzig || degenerate_run_ > 50;
            int enter = -1;
            if (cols_ > 0) {
                const Eigen::RowVectorXd reduced =
                    cost.head(cols_).transpose() - pi * M_;
                double most = 0.0;
                for (int j = 0; j < cols_; ++j) {
                    if (is_basic_[j]) continue;
                    const double rj = reduced(j);
                    if (rj < -tol * (1.0 + std::abs(cost(j)))) {
                        if (bland) {
                            enter = j;
                            break;
                        }
                        if (rj < most) {
                            most = rj;
                            enter = j;
                        }
                    }
                }
            }
            for (int j = cols_; enter < 0 && j < candidates; ++j) {
                if (is_basic_[j]) continue;
                if (cost(j) - pi(j - cols_) < -tol) enter = j;
            }
            if (enter < 0) return Status::optimal;

            const Eigen::VectorXd w = binv_ * column(enter);
            int leave = -1;
            double best = std::numeric_limits<double>::infinity();
            for (int i = 0; i < rows_; ++i) {
                if (w(i) <= tol) continue;
                const double ratio = std::max(0.0, xb_(i)) / w(i);
                const double eps = 1e-14 * (1.0 + std::abs(best));
                if (leave < 0 || ratio < best - eps) {
                    best = ratio;
                    leave = i;
                } else if (ratio <= best + eps && basis_[i] < basis_[leave]) {
                    best = std::min(best, ratio);
                    leave = i;
                }
            }
            if (leave < 0) return Status::unbounded;
            degenerate_run_ = best <= 1e-14 ? degenerate_run_ + 1 : 0;
            pivot(leave, enter, w);
        }
    }

    void drive_out_artificials() {
        for (int i = 0; i < rows_; ++i) {
            if (basis_[i] < cols_) continue;
            const Eigen::RowVectorXd row = binv_.row(i) * M_;
            for (int j = 0; j < cols_; ++j) {
                if (is_basic_[j] || std::abs(row(j)) <= 1e-9) continue;
                pivot(i, j, binv_ * column(j));
                break;
            }
        }
    }

    Eigen::MatrixXd M_;
    Eigen::VectorXd r_;
    Options opts_;
    int rows_;
    int cols_;
    std::vector<bool> flipped_;
    std::vector<int> basis_;
    std::vector<bool> is_basic_;
    Eigen::MatrixXd binv_;
    Eigen::VectorXd xb_;
    int pivots_ = 0;
    int degenerate_run_ = 0;
};

}  // namespace

Solution solve_standard(const Eigen::MatrixXd& M, const Eigen::VectorXd& r,
                        const Eigen::VectorXd& c, const Options& opts) {
    RevisedSimplex simplex(M, r, opts);
    return simplex.run(c);
}

}  // namespace logbm::lp
