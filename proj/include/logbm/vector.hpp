#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace logbm {

/// A point of R^{2n} viewed as C^n. Complex coordinate j occupies the real
/// slots (2j, 2j+1) as (Re z_j, Im z_j).
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Raised for violated preconditions (bad dimensions, parameters, descriptors).
class GeometryError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline void require(bool ok, const std::string& what) {
    if (!ok) throw GeometryError(what);
}

inline int complex_dim(const Vector& x) {
    require(x.size() >= 2 && x.size() % 2 == 0, "complex structure needs an even real dimension");
    return static_cast<int>(x.size() / 2);
}

inline std::complex<double> coord(const Vector& x, int j) { return {x(2 * j), x(2 * j + 1)}; }

inline void set_coord(Vector& x, int j, std::complex<double> z) {
    x(2 * j) = z.real();
    x(2 * j + 1) = z.imag();
}

/// Multiplication by e^{i angle} on every complex coordinate simultaneously.
Vector rotate_complex(const Vector& x, double angle);

/// Hermitian pairing sum_j x_j conj(y_j); its real part is the real inner product.
std::complex<double> hermitian_dot(const Vector& x, const Vector& y);

/// The real 2n x 2n matrix of multiplication by i.
Matrix complex_unit_matrix(int n);

/// True when A commutes with multiplication by i (i.e. A is C-linear).
bool commutes_with_complex_structure(const Matrix& A, double tol = 1e-12);

}  // namespace logbm
