#include "splitobs/matrixkit.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace splitobs {

namespace {

double default_tol(const Matrix& M, double norm2) {
  return 1e-9 * static_cast<double>(std::max(M.rows(), M.cols())) * norm2;
}

}  // namespace

Matrix kernel_basis(const Matrix& M, double tol) {
  if (M.rows() == 0) {
    // No constraints: the kernel is the whole domain.
    return Matrix::Identity(M.cols(), M.cols());
  }
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double norm2 = sv.size() > 0 ? sv(0) : 0.0;
  if (tol <= 0.0) tol = default_tol(M, norm2);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++rank;
  return svd.matrixV().rightCols(M.cols() - rank);
}

Matrix matrix_exponential(const Matrix& M) {
  if (M.rows() != M.cols()) throw DimensionMismatch("matrix_exponential: matrix not square");
  return M.exp();
}

Spectrum eigenvalues(const Matrix& M) {
  if (M.rows() != M.cols()) throw DimensionMismatch("eigenvalues: matrix not square");
  Spectrum sp;
  if (M.rows() == 0) return sp;
  Eigen::EigenSolver<Matrix> es(M, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw Error("eigenvalues: QR iteration did not converge");
  sp.eigenvalues.reserve(M.rows());
  sp.abscissa = -std::numeric_limits<double>::infinity();
  sp.radius = 0.0;
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    std::complex<double> ev = es.eigenvalues()(i);
    sp.eigenvalues.push_back(ev);
    sp.abscissa = std::max(sp.abscissa, ev.real());
    sp.radius = std::max(sp.radius, std::abs(ev));
  }
  return sp;
}

double induced_two_norm(const Matrix& M) {
  if (M.rows() == 0 || M.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(M);
  return svd.singularValues()(0);
}

Matrix kron(const Matrix& A, const Matrix& B) {
  return Eigen::kroneckerProduct(A, B).eval();
}

Matrix observability_matrix(const Matrix& C, const Matrix& A) {
  if (C.cols() != A.rows() || A.rows() != A.cols())
    throw DimensionMismatch("observability_matrix: incompatible shapes");
  const Eigen::Index n = A.rows();
  Matrix Ob(C.rows() * n, n);
  Matrix row = C;
  for (Eigen::Index k = 0; k < n; ++k) {
    Ob.middleRows(k * C.rows(), C.rows()) = row;
    row = row * A;
  }
  return Ob;
}

bool observable(const Matrix& C, const Matrix& A) {
  return kernel_basis(observability_matrix(C, A)).cols() == 0;
}

namespace {

// Stable-subspace extraction for the 2n x 2n pencil lambda*G - F: collect the
// eigenvectors of the n eigenvalues inside the stability region and read the
// Riccati solution off the subspace basis [U1; U2] as X = U2 U1^{-1}.
struct PencilEig {
  std::complex<double> value;
  Eigen::VectorXcd vec;
};

Matrix stable_subspace_solution(const std::vector<PencilEig>& stable, Eigen::Index n) {
  if (static_cast<Eigen::Index>(stable.size()) != n)
    throw SolverDiverged("riccati: stable subspace has wrong dimension");
  Eigen::MatrixXcd U(2 * n, n);
  for (Eigen::Index j = 0; j < n; ++j) U.col(j) = stable[j].vec;
  Eigen::MatrixXcd U1 = U.topRows(n), U2 = U.bottomRows(n);
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(U1);
  if (!lu.isInvertible())
    throw SolverDiverged("riccati: singular subspace basis");
  Matrix X = (U2 * lu.inverse()).real();
  return 0.5 * (X + X.transpose());
}

double care_residual(const Matrix& A, const Matrix& C, const Matrix& P) {
  Matrix R = A * P + P * A.transpose() - P * C.transpose() * C * P
           + Matrix::Identity(A.rows(), A.rows());
  return R.norm();
}

double dare_residual(const Matrix& A, const Matrix& C, const Matrix& P) {
  const Eigen::Index n = A.rows();
  Matrix S = C * P * C.transpose() + Matrix::Identity(C.rows(), C.rows());
  Matrix R = A * P * A.transpose()
           - A * P * C.transpose() * S.ldlt().solve(C * P * A.transpose())
           + Matrix::Identity(n, n) - P;
  return R.norm();
}

// Newton-Kleinman step for the filter CARE A P + P A' - P C'C P + I = 0:
// each iterate solves the Lyapunov equation of the current closed loop through
// its Kronecker normal form (quotient orders are single digits, so the dense
// solve costs nothing). Quadratically convergent from a stabilizing start;
// keeps the best iterate seen in case rounding stalls the contraction.
Matrix care_newton_polish(const Matrix& A, const Matrix& C, Matrix P) {
  const Eigen::Index n = A.rows();
  const Matrix CtC = C.transpose() * C;
  const Matrix I = Matrix::Identity(n, n);
  Matrix best = P;
  double best_resid = care_residual(A, C, P);
  for (int it = 0; it < 30; ++it) {
    Matrix Acl = A - P * CtC;
    Matrix lhs = Eigen::kroneckerProduct(I, Acl).eval() +
                 Eigen::kroneckerProduct(Acl, I).eval();
    Matrix rhs = -(I + P * CtC * P);
    Eigen::Map<const Eigen::VectorXd> rv(rhs.data(), n * n);
    Eigen::VectorXd pv = lhs.fullPivLu().solve(rv);
    Matrix Pn = Eigen::Map<const Matrix>(pv.data(), n, n);
    P = 0.5 * (Pn + Pn.transpose());
    double resid = care_residual(A, C, P);
    if (resid < best_resid) {
      best_resid = resid;
      best = P;
    }
    if (resid <= 1e-13 * std::max(1.0, P.norm())) break;
  }
  return best;
}

// Stable invariant subspace of the Hamiltonian via the determinant-scaled
// matrix sign iteration. Individual eigenvectors degrade when closed-loop
// poles nearly coincide (skewed basis, tiny pivots in U1), but the subspace
// itself stays well-conditioned, so this rescues those cases.
Matrix care_sign_solution(const Matrix& H, Eigen::Index n) {
  const Eigen::Index nn = 2 * n;
  Matrix Z = H;
  for (int it = 0; it < 120; ++it) {
    Eigen::PartialPivLU<Matrix> lu(Z);
    double d = std::abs(lu.determinant());
    if (!std::isfinite(d) || d <= 0.0)
      throw SolverDiverged("riccati: sign iteration hit a singular iterate");
    double mu = std::pow(d, -1.0 / static_cast<double>(nn));
    Matrix Zn = 0.5 * (mu * Z + (1.0 / mu) * lu.inverse());
    double delta = (Zn - Z).norm();
    Z = Zn;
    if (delta <= 1e-13 * std::max(1.0, Z.norm())) break;
  }
  // (I - sign(H))/2 projects onto the stable subspace; a pivoted QR gives an
  // orthonormal basis [U1; U2] of its range, and X = U2 U1^{-1}.
  Matrix W = 0.5 * (Matrix::Identity(nn, nn) - Z);
  Eigen::ColPivHouseholderQR<Matrix> qr(W);
  Matrix Q = qr.householderQ();
  Matrix U1 = Q.topLeftCorner(n, n);
  Matrix U2 = Q.bottomLeftCorner(n, n);
  Matrix X = U1.transpose().fullPivLu().solve(U2.transpose()).transpose();
  return 0.5 * (X + X.transpose());
}

Matrix solve_care(const Matrix& A, const Matrix& C) {
  // Filter CARE for (A, C) is the control CARE for the dual pair (A', C');
  // use the standard Hamiltonian [[A', -C'C], [-I, -A]].
  const Eigen::Index n = A.rows();
  Matrix H(2 * n, 2 * n);
  H.topLeftCorner(n, n) = A.transpose();
  H.topRightCorner(n, n) = -C.transpose() * C;
  H.bottomLeftCorner(n, n) = -Matrix::Identity(n, n);
  H.bottomRightCorner(n, n) = -A;
  Matrix P;
  bool have = false;
  Eigen::EigenSolver<Matrix> es(H);
  if (es.info() == Eigen::Success) {
    std::vector<PencilEig> stable;
    for (Eigen::Index i = 0; i < 2 * n; ++i) {
      if (es.eigenvalues()(i).real() < 0.0)
        stable.push_back({es.eigenvalues()(i), es.eigenvectors().col(i)});
    }
    try {
      P = stable_subspace_solution(stable, n);
      have = true;
    } catch (const SolverDiverged&) {
      have = false;
    }
  }
  if (!have || care_residual(A, C, P) > 1e-8 * std::max(1.0, P.norm())) {
    Matrix Ps = care_newton_polish(A, C, care_sign_solution(H, n));
    if (!have || care_residual(A, C, Ps) < care_residual(A, C, P)) P = Ps;
  }
  return P;
}

Matrix dare_fixed_point(const Matrix& A, const Matrix& C, Matrix P) {
  // Plain filter-DARE iteration; converges whenever the closed loop is a
  // contraction near the stabilizing solution. Used as a polish/fallback.
  const Matrix I = Matrix::Identity(A.rows(), A.rows());
  const Matrix Ir = Matrix::Identity(C.rows(), C.rows());
  for (int it = 0; it < 20000; ++it) {
    Matrix S = C * P * C.transpose() + Ir;
    Matrix Pn = A * P * A.transpose()
              - A * P * C.transpose() * S.ldlt().solve(C * P * A.transpose()) + I;
    double delta = (Pn - P).norm();
    P = 0.5 * (Pn + Pn.transpose());
    if (delta < 1e-14 * std::max(1.0, P.norm())) break;
  }
  return P;
}

Matrix solve_dare(const Matrix& A, const Matrix& C) {
  // Dual control DARE via the symplectic pencil
  //   F = [[Ad, 0], [-I, I]],  G = [[I, C'C... ]]
  // written for the dual pair Ad = A', Bd = C' with Q = R = I:
  //   F = [[Ad, 0], [-Q, I]],  G = [[I, Bd Bd'], [0, Ad']].
  const Eigen::Index n = A.rows();
  Matrix Ad = A.transpose();
  Matrix F(2 * n, 2 * n), G(2 * n, 2 * n);
  F.setZero();
  G.setZero();
  F.topLeftCorner(n, n) = Ad;
  F.bottomLeftCorner(n, n) = -Matrix::Identity(n, n);  // -Q
  F.bottomRightCorner(n, n) = Matrix::Identity(n, n);
  G.topLeftCorner(n, n) = Matrix::Identity(n, n);
  G.topRightCorner(n, n) = C.transpose() * C;  // Bd R^{-1} Bd'
  G.bottomRightCorner(n, n) = Ad.transpose();
  Eigen::GeneralizedEigenSolver<Matrix> ges(F, G);
  std::vector<PencilEig> stable;
  for (Eigen::Index i = 0; i < 2 * n; ++i) {
    std::complex<double> alpha = ges.alphas()(i);
    double beta = ges.betas()(i);
    // beta ~ 0 marks an infinite eigenvalue (unstable side of the pencil).
    if (std::abs(beta) < 1e-300) continue;
    std::complex<double> lam = alpha / beta;
    if (std::abs(lam) < 1.0)
      stable.push_back({lam, ges.eigenvectors().col(i)});
  }
  Matrix P;
  bool subspace_ok = true;
  try {
    P = stable_subspace_solution(stable, n);
  } catch (const SolverDiverged&) {
    subspace_ok = false;
  }
  if (!subspace_ok || dare_residual(A, C, P) > 1e-10 * std::max(1.0, P.norm())) {
    Matrix P0 = subspace_ok ? P : Matrix::Identity(n, n);
    P = dare_fixed_point(A, C, P0);
  }
  return P;
}

}  // namespace

Matrix solve_riccati(const Matrix& A, const Matrix& C, RiccatiKind kind) {
  if (A.rows() != A.cols() || C.cols() != A.rows())
    throw DimensionMismatch("solve_riccati: incompatible shapes");
  if (A.rows() == 0) return Matrix(0, 0);
  if (!observable(C, A))
    throw NotObservable("solve_riccati: (C, A) pair is not observable");
  Matrix P = (kind == RiccatiKind::continuous) ? solve_care(A, C) : solve_dare(A, C);
  double resid = (kind == RiccatiKind::continuous) ? care_residual(A, C, P)
                                                   : dare_residual(A, C, P);
  if (!P.allFinite() || resid > 1e-8 * std::max(1.0, P.norm()))
    throw SolverDiverged("solve_riccati: residual " + std::to_string(resid));
  return P;
}

}  // namespace splitobs
