#include "splitobs/decomposition.hpp"

#include <algorithm>
#include <cmath>

namespace splitobs {

void validate_dimensions(const Plant& plant) {
  const int n = plant.n();
  if (n == 0) throw DimensionMismatch("plant: empty state map");
  if (plant.A.cols() != n) throw DimensionMismatch("plant: A not square");
  if (plant.C.empty()) throw DimensionMismatch("plant: no output maps");
  for (size_t i = 0; i < plant.C.size(); ++i) {
    if (plant.C[i].cols() != n)
      throw DimensionMismatch("plant: C[" + std::to_string(i) + "] has wrong column count");
    if (plant.C[i].rows() == 0 || plant.C[i].norm() == 0.0)
      throw DimensionMismatch("plant: C[" + std::to_string(i) + "] is zero");
  }
  if (plant.time_kind == TimeKind::discrete && plant.sample_period <= 0.0)
    throw DimensionMismatch("plant: sample_period must be positive");
}

AgentDecomposition decompose_agent(const Plant& plant, int i,
                                   const std::optional<Matrix>& Q_given) {
  validate_dimensions(plant);
  if (i < 0 || i >= plant.m())
    throw DimensionMismatch("decompose_agent: agent index out of range");
  const int n = plant.n();
  const Matrix& Ci = plant.C[i];

  AgentDecomposition dec;
  dec.A = plant.A;
  dec.C = Ci;
  dec.V = kernel_basis(observability_matrix(Ci, plant.A));
  const int n_i = dec.n_i();

  if (Q_given) {
    if (Q_given->rows() != n - n_i || Q_given->cols() != n)
      throw DimensionMismatch("decompose_agent: supplied Q has wrong shape");
    if (n_i > 0 && (*Q_given * dec.V).norm() > 1e-9 * std::max(1.0, Q_given->norm()))
      throw DimensionMismatch("decompose_agent: supplied Q does not annihilate the unobservable subspace");
    dec.Q = *Q_given;
    Matrix QQt = dec.Q * dec.Q.transpose();
    Eigen::FullPivLU<Matrix> lu(QQt);
    if (!lu.isInvertible())
      throw DimensionMismatch("decompose_agent: supplied Q is not full row rank");
    // Rows of Q span the orthogonal complement of span V (same kernel), so
    // Q'(QQ')^{-1} is automatically the right inverse with V'Q^{-1} = 0.
    dec.Q_right_inv = dec.Q.transpose() * lu.inverse();
  } else {
    // Orthonormal complement: then the right inverse is just Q'.
    dec.Q = kernel_basis(dec.V.transpose()).transpose();
    dec.Q_right_inv = dec.Q.transpose();
  }

  dec.A_bar = dec.Q * plant.A * dec.Q_right_inv;
  dec.C_bar = Ci * dec.Q_right_inv;
  dec.P = dec.V * dec.V.transpose();
  dec.A_restricted = dec.V.transpose() * plant.A * dec.V;
  dec.K_bar = Matrix(n - n_i, 0);
  dec.K = Matrix(n, 0);
  dec.gains_set = false;
  return dec;
}

AgentDecomposition set_injection_gain(const AgentDecomposition& dec, const Matrix& K_bar) {
  if (K_bar.rows() != dec.Q.rows() || K_bar.cols() != dec.C_bar.rows())
    throw DimensionMismatch("set_injection_gain: K_bar not conformable with C_bar");
  AgentDecomposition out = dec;
  out.K_bar = K_bar;
  out.K = dec.Q_right_inv * K_bar;
  Matrix Acl = dec.A + out.K * dec.C;
  out.A_restricted = dec.V.transpose() * Acl * dec.V;
  out.gains_set = true;

  const double scale = std::max(1.0, Acl.norm());
  double r1 = (Acl * dec.V - dec.V * out.A_restricted).norm();
  double r2 = (dec.Q * Acl - (dec.A_bar + K_bar * dec.C_bar) * dec.Q).norm();
  if (r1 > 1e-8 * scale || r2 > 1e-8 * scale)
    throw IntertwiningViolated("set_injection_gain: closed loop does not respect the split (residuals " +
                               std::to_string(r1) + ", " + std::to_string(r2) + ")");
  return out;
}

StackedDecomposition stack(const std::vector<AgentDecomposition>& decs) {
  if (decs.empty()) throw DimensionMismatch("stack: no agents");
  const int n = static_cast<int>(decs[0].A.rows());
  for (const auto& d : decs)
    if (d.A.rows() != n)
      throw DimensionMismatch("stack: agents disagree on the state dimension");
  const int m = static_cast<int>(decs.size());
  const int mn = m * n;

  StackedDecomposition st;
  st.decs = decs;
  st.n = n;
  st.m = m;
  st.n_bar = 0;
  int q_rows = 0;
  for (const auto& d : decs) {
    st.n_bar += d.n_i();
    q_rows += static_cast<int>(d.Q.rows());
  }

  st.V = Matrix::Zero(mn, st.n_bar);
  st.Q = Matrix::Zero(q_rows, mn);
  st.A_bar_big = Matrix::Zero(mn, mn);
  st.A_bar_V = Matrix::Zero(q_rows, q_rows);
  st.A_tilde = Matrix::Zero(st.n_bar, st.n_bar);
  st.T_mat = Matrix::Zero(mn, mn);
  st.T_inv = Matrix::Zero(mn, mn);

  int vc = 0, qr = 0;
  for (int i = 0; i < m; ++i) {
    const auto& d = decs[i];
    const int n_i = d.n_i();
    const int qn = static_cast<int>(d.Q.rows());
    st.V.block(i * n, vc, n, n_i) = d.V;
    st.Q.block(qr, i * n, qn, n) = d.Q;
    Matrix Acl = d.gains_set ? (d.A + d.K * d.C).eval() : d.A;
    st.A_bar_big.block(i * n, i * n, n, n) = Acl;
    Matrix Abar_cl = d.gains_set ? (d.A_bar + d.K_bar * d.C_bar).eval() : d.A_bar;
    st.A_bar_V.block(qr, qr, qn, qn) = Abar_cl;
    st.A_tilde.block(vc, vc, n_i, n_i) =
        d.gains_set ? d.A_restricted : (d.V.transpose() * d.A * d.V).eval();
    // Columns of T_mat are grouped globally: all quotient directions first,
    // then all unobservable directions, so T_inv M T_mat shows the 2x2
    // triangular structure directly.
    st.T_mat.block(i * n, qr, n, qn) = d.Q_right_inv;
    st.T_mat.block(i * n, q_rows + vc, n, n_i) = d.V;
    vc += n_i;
    qr += qn;
  }
  st.T_inv.topRows(q_rows) = st.Q;
  st.T_inv.bottomRows(st.n_bar) = st.V.transpose();
  st.P = st.V * st.V.transpose();
  return st;
}

ObservabilityReport joint_observability(const Plant& plant) {
  validate_dimensions(plant);
  const int n = plant.n();
  int total_rows = 0;
  for (const auto& Ci : plant.C) total_rows += static_cast<int>(Ci.rows());
  Matrix Cstack(total_rows, n);
  int r = 0;
  for (const auto& Ci : plant.C) {
    Cstack.middleRows(r, Ci.rows()) = Ci;
    r += static_cast<int>(Ci.rows());
  }
  Matrix Ob = observability_matrix(Cstack, plant.A);
  ObservabilityReport rep;
  rep.n = n;
  rep.rank = n - static_cast<int>(kernel_basis(Ob).cols());

  // Cross-check: the intersection of the per-agent unobservable subspaces is
  // the kernel of the stacked per-agent observability matrices.
  std::vector<Matrix> obs;
  int rows = 0;
  for (int i = 0; i < plant.m(); ++i) {
    obs.push_back(observability_matrix(plant.C[i], plant.A));
    rows += static_cast<int>(obs.back().rows());
  }
  Matrix stacked(rows, n);
  r = 0;
  for (const auto& O : obs) {
    stacked.middleRows(r, O.rows()) = O;
    r += static_cast<int>(O.rows());
  }
  rep.intersection_dim = static_cast<int>(kernel_basis(stacked).cols());
  rep.jointly_observable = (rep.rank == n);
  if (rep.jointly_observable != (rep.intersection_dim == 0))
    throw Error("joint_observability: rank and subspace-intersection routes disagree");
  return rep;
}

}  // namespace splitobs
