#include "logbm/vector.hpp"

#include <cmath>

namespace logbm {

Vector rotate_complex(const Vector& x, double angle) {
    const int n = complex_dim(x);
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    Vector out(x.size());
    for (int j = 0; j < n; ++j) {
        const double re = x(2 * j);
        const double im = x(2 * j + 1);
        out(2 * j) = c * re - s * im;
        out(2 * j + 1) = s * re + c * im;
    }
    return out;
}

std::complex<double> hermitian_dot(const Vector& x, const Vector& y) {
    const int n = complex_dim(x);
    require(y.size() == x.size(), "dimension mismatch");
    std::complex<double> acc = 0.0;
    for (int j = 0; j < n; ++j) acc += coord(x, j) * std::conj(coord(y, j));
    return acc;
}

Matrix complex_unit_matrix(int n) {
    Matrix J = Matrix::Zero(2 * n, 2 * n);
    for (int j = 0; j < n; ++j) {
        J(2 * j + 1, 2 * j) = 1.0;
        J(2 * j, 2 * j + 1) = -1.0;
    }
    return J;
}

bool commutes_with_complex_structure(const Matrix& A, double tol) {
    if (A.rows() != A.cols() || A.rows() % 2 != 0) return false;
    const Matrix J = complex_unit_matrix(static_cast<int>(A.rows() / 2));
    return (A * J - J * A).cwiseAbs().maxCoeff() <= tol * (1.0 + A.cwiseAbs().maxCoeff());
}

}  // namespace logbm
