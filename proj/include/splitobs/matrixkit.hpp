#ifndef SPLITOBS_MATRIXKIT_HPP_
#define SPLITOBS_MATRIXKIT_HPP_

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "splitobs/errors.hpp"

namespace splitobs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Complete eigenvalue list of a real matrix plus the two summary numbers the
// stability checks care about.
struct Spectrum {
  std::vector<std::complex<double>> eigenvalues;
  double abscissa = 0.0;  // max real part
  double radius = 0.0;    // max modulus
};

enum class RiccatiKind { continuous, discrete };

// Orthonormal basis of ker M. tol <= 0 selects the default rank tolerance
// 1e-9 * max(rows, cols) * ||M||_2. Returns a cols x k matrix, k possibly 0.
Matrix kernel_basis(const Matrix& M, double tol = -1.0);

// Scaling-and-squaring matrix exponential (Eigen's Pade implementation).
Matrix matrix_exponential(const Matrix& M);

Spectrum eigenvalues(const Matrix& M);

// Largest singular value.
double induced_two_norm(const Matrix& M);

Matrix kron(const Matrix& A, const Matrix& B);

// [C; CA; ...; CA^{n-1}] for an n-state pair.
Matrix observability_matrix(const Matrix& C, const Matrix& A);

bool observable(const Matrix& C, const Matrix& A);

// Stabilizing solution P of the output-injection (filter) Riccati equation
// with unit weights:
//   continuous:  A P + P A' - P C' C P + I = 0
//   discrete:    P = A P A' - A P C' (C P C' + I)^{-1} C P A' + I
// The induced gain (-PC' resp. -APC'(CPC'+I)^{-1}) makes A + KC stable.
Matrix solve_riccati(const Matrix& A, const Matrix& C, RiccatiKind kind);

}  // namespace splitobs

#endif  // SPLITOBS_MATRIXKIT_HPP_
