#include "splitobs/designer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace splitobs {

// ---------------------------------------------------------------------------
// stacked_ops builders (shared with simulator/analyzer)

Matrix stacked_flow(const StackedDecomposition& st, const NetworkSnapshot& snap) {
  if (snap.S.rows() != st.m)
    throw DimensionMismatch("stacked_flow: graph size does not match agent count");
  return kron(snap.S, Matrix::Identity(st.n, st.n));
}

Matrix consensus_map(const StackedDecomposition& st, const NetworkSnapshot& snap) {
  Matrix Sbar = stacked_flow(st, snap);
  return st.V.transpose() * (Matrix::Identity(Sbar.rows(), Sbar.cols()) - Sbar) * st.V;
}

Matrix mixing_map(const StackedDecomposition& st, const NetworkSnapshot& snap) {
  return st.V.transpose() * stacked_flow(st, snap) * st.V;
}

Matrix perron_weight(const StackedDecomposition& st, const NetworkSnapshot& snap) {
  Matrix PiI = kron(Matrix(snap.Pi), Matrix::Identity(st.n, st.n));
  return st.V.transpose() * PiI * st.V;
}

Matrix perron_block_diag(const StackedDecomposition& st, const NetworkSnapshot& snap) {
  Matrix H = Matrix::Zero(st.n_bar, st.n_bar);
  int c = 0;
  for (int i = 0; i < st.m; ++i) {
    const int n_i = st.decs[i].n_i();
    H.block(c, c, n_i, n_i) = snap.pi(i) * Matrix::Identity(n_i, n_i);
    c += n_i;
  }
  return H;
}

Matrix error_map_continuous(const StackedDecomposition& st, const NetworkSnapshot& snap,
                            double g) {
  Matrix Sbar = stacked_flow(st, snap);
  Matrix I = Matrix::Identity(Sbar.rows(), Sbar.cols());
  return st.A_bar_big - g * st.P * (I - Sbar);
}

Matrix error_map_discrete(const StackedDecomposition& st, const NetworkSnapshot& snap,
                          int q) {
  if (q < 1) throw DimensionMismatch("error_map_discrete: q must be >= 1");
  Matrix Sbar = stacked_flow(st, snap);
  Matrix I = Matrix::Identity(Sbar.rows(), Sbar.cols());
  Matrix round = I - st.P * (I - Sbar);
  Matrix acc = I;
  for (int k = 0; k < q; ++k) acc = round * acc;
  return st.A_bar_big * acc;
}

// ---------------------------------------------------------------------------
// gain synthesis

AgentDecomposition synth_gain(const AgentDecomposition& dec, double lambda, TimeKind kind) {
  const int nq = static_cast<int>(dec.A_bar.rows());
  if (nq == 0) {
    // Nothing to stabilize: C_i != 0 guarantees at least one quotient state,
    // so this only happens for hand-built decompositions.
    return set_injection_gain(dec, Matrix(0, dec.C_bar.rows()));
  }
  Matrix K_bar;
  if (kind == TimeKind::continuous) {
    if (lambda <= 0.0) throw DimensionMismatch("synth_gain: continuous rate must be positive");
    Matrix shifted = dec.A_bar + lambda * Matrix::Identity(nq, nq);
    Matrix P = solve_riccati(shifted, dec.C_bar, RiccatiKind::continuous);
    // A_bar - P C'C has abscissa <= -lambda by construction.
    K_bar = -P * dec.C_bar.transpose();
  } else {
    if (lambda <= 0.0 || lambda >= 1.0)
      throw DimensionMismatch("synth_gain: discrete rate must lie in (0,1)");
    Matrix scaled = dec.A_bar / lambda;
    Matrix P = solve_riccati(scaled, dec.C_bar, RiccatiKind::discrete);
    Matrix S = dec.C_bar * P * dec.C_bar.transpose()
             + Matrix::Identity(dec.C_bar.rows(), dec.C_bar.rows());
    Matrix K_tilde = -scaled * P * dec.C_bar.transpose() * S.inverse();
    K_bar = lambda * K_tilde;
  }
  AgentDecomposition out = set_injection_gain(dec, K_bar);
  Spectrum sp = eigenvalues(out.A_bar + out.K_bar * out.C_bar);
  const double slack = 1e-9;
  bool ok = (kind == TimeKind::continuous) ? (sp.abscissa <= -lambda + slack)
                                           : (sp.radius <= lambda + slack);
  if (!ok)
    throw SolverDiverged("synth_gain: synthesized gain misses the rate target");
  return out;
}

// ---------------------------------------------------------------------------
// coupling gain bounds

namespace {

double max_sym_eig(const Matrix& M) {
  if (M.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (M + M.transpose()));
  return es.eigenvalues().maxCoeff();
}

double min_sym_eig(const Matrix& M) {
  if (M.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (M + M.transpose()));
  return es.eigenvalues().minCoeff();
}

}  // namespace

FixedGainBound gain_bound_fixed(const StackedDecomposition& st, const NetworkSnapshot& snap,
                                double lambda) {
  FixedGainBound out;
  if (st.n_bar == 0) return out;  // no unobservable part: consensus coupling absent
  Matrix H = perron_block_diag(st, snap);
  Matrix shifted = lambda * Matrix::Identity(st.n_bar, st.n_bar) + st.A_tilde;
  out.numerator = max_sym_eig(2.0 * H * shifted);  // H M + M' H symmetrized
  Matrix LV = st.V.transpose() * kron(snap.L, Matrix::Identity(st.n, st.n)) * st.V;
  out.denominator = min_sym_eig(LV);
  if (out.denominator <= 1e-12)
    throw CouplingDegenerate("gain_bound_fixed: V'(L x I)V lost definiteness");
  out.g = out.numerator / out.denominator;
  if (out.g < 0.0) {
    out.g = 0.0;
    out.clamped = true;
  }
  out.certificate_abscissa = certify_fixed(st, snap, lambda, out.g);
  out.lmi_max_eig = max_sym_eig(2.0 * H * shifted - out.g * LV);
  return out;
}

double certify_fixed(const StackedDecomposition& st, const NetworkSnapshot& snap,
                     double lambda, double g) {
  if (st.n_bar == 0) return -lambda;
  Matrix AV = st.A_tilde - g * consensus_map(st, snap);
  return eigenvalues(lambda * Matrix::Identity(st.n_bar, st.n_bar) + AV).abscissa;
}

DwellGainBound gain_bound_dwell(const StackedDecomposition& st,
                                const std::vector<NetworkSnapshot>& family, double tau_D,
                                double lambda) {
  if (family.empty()) throw EmptyFamily("gain_bound_dwell: no graphs supplied");
  if (tau_D <= 0.0) throw DimensionMismatch("gain_bound_dwell: tau_D must be positive");
  DwellGainBound out;
  if (st.n_bar == 0) return out;

  std::vector<Matrix> Ms;
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& snap : family) {
    Matrix M = -consensus_map(st, snap);
    margin = std::min(margin, -eigenvalues(M).abscissa);
    Ms.push_back(std::move(M));
  }
  if (margin <= 1e-12)
    throw CouplingDegenerate("gain_bound_dwell: a family member has no decay margin");
  out.a_tilde_norm = induced_two_norm(st.A_tilde);

  // For each candidate lambda* find the smallest valid transient constant
  //   c(lambda*) >= sup_t ||e^{M t}|| e^{lambda* t}   (every family member),
  // then keep the (c, lambda*) minimizing the resulting gain. The sup is
  // located on a grid, inflated for between-grid peaks, and the scan may stop
  // once f < 1 because f is submultiplicative (the later sup cannot exceed
  // the recorded one).
  const double dt = 0.02;
  double best_g = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 48; ++k) {
    double frac = 0.05 + (0.99 - 0.05) * k / 47.0;
    double lam_star = frac * margin;
    double c_req = 1.0;
    bool usable = true;
    for (const auto& M : Ms) {
      Matrix Ed = matrix_exponential(M * dt);
      Matrix acc = Matrix::Identity(M.rows(), M.cols());
      double sup = 1.0, t = 0.0;
      int it = 0;
      for (; it < 400000; ++it) {
        acc = Ed * acc;
        t += dt;
        double f = induced_two_norm(acc) * std::exp(lam_star * t);
        sup = std::max(sup, f);
        if (f < 1.0) break;
      }
      if (it >= 400000) { usable = false; break; }
      double grid_gap = std::exp((induced_two_norm(M) + lam_star) * dt);
      c_req = std::max(c_req, sup * grid_gap);
    }
    if (!usable) continue;
    double c = 1.05 * c_req;
    double g = (std::log(c) + (lambda + out.a_tilde_norm * c) * tau_D) / (lam_star * tau_D);
    if (g < best_g) {
      best_g = g;
      out.g = g;
      out.c = c;
      out.lambda_star = lam_star;
    }
  }
  if (!std::isfinite(best_g))
    throw SolverDiverged("gain_bound_dwell: transient-constant search failed");
  return out;
}

ArbitraryGainBound gain_bound_arbitrary(const StackedDecomposition& st,
                                        const std::vector<NetworkSnapshot>& family,
                                        double lambda) {
  if (family.empty()) throw EmptyFamily("gain_bound_arbitrary: no graphs supplied");
  ArbitraryGainBound out;
  if (st.n_bar == 0) return out;
  for (const auto& snap : family)
    if (!doubly_stochastic(snap.S))
      throw NotDoublyStochastic("gain_bound_arbitrary: family member is not doubly stochastic");

  Matrix shifted = lambda * Matrix::Identity(st.n_bar, st.n_bar) + st.A_tilde;
  out.numerator = max_sym_eig(2.0 * shifted);
  out.min_denominator = std::numeric_limits<double>::infinity();
  for (const auto& snap : family) {
    Matrix sym = 2.0 * Matrix::Identity(st.m, st.m) - snap.S - snap.S.transpose();
    Matrix D = st.V.transpose() * kron(sym, Matrix::Identity(st.n, st.n)) * st.V;
    out.min_denominator = std::min(out.min_denominator, min_sym_eig(D));
  }
  if (out.min_denominator <= 1e-12)
    throw CouplingDegenerate("gain_bound_arbitrary: symmetrized coupling lost definiteness");
  out.g = out.numerator / out.min_denominator;
  if (out.g < 0.0) {
    out.g = 0.0;
    out.clamped = true;
  }
  out.certificate_max_eig = -std::numeric_limits<double>::infinity();
  for (const auto& snap : family) {
    Matrix M = lambda * Matrix::Identity(st.n_bar, st.n_bar) + st.A_tilde
             - out.g * consensus_map(st, snap);
    out.certificate_max_eig = std::max(out.certificate_max_eig, max_sym_eig(2.0 * M));
  }
  return out;
}

// ---------------------------------------------------------------------------
// weighted / mixed norms and q selection

double weighted_norm(const Matrix& M, const Matrix& R) {
  if (M.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(R);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw CouplingDegenerate("weighted_norm: weight matrix not positive definite");
  Matrix Rh = es.operatorSqrt();
  Matrix Rih = es.operatorInverseSqrt();
  return induced_two_norm(Rh * M * Rih);
}

double weighted_norm_check(const Matrix& M, const Matrix& R) {
  if (M.rows() == 0) return 0.0;
  // ||M||_R^2 is the largest generalized eigenvalue of M'RM v = mu R v.
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(M.transpose() * R * M, R);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double mixed_norm(const Matrix& M, const std::vector<int>& group_sizes) {
  if (M.rows() == 0) return 0.0;
  const int g = static_cast<int>(group_sizes.size());
  std::vector<int> off(g + 1, 0);
  for (int i = 0; i < g; ++i) off[i + 1] = off[i] + group_sizes[i];
  if (off[g] != M.rows() || M.rows() != M.cols())
    throw DimensionMismatch("mixed_norm: group sizes do not tile the matrix");
  double worst_row = 0.0;
  for (int i = 0; i < g; ++i) {
    double row = 0.0;
    for (int j = 0; j < g; ++j) {
      if (group_sizes[i] == 0 || group_sizes[j] == 0) continue;
      row += induced_two_norm(M.block(off[i], off[j], group_sizes[i], group_sizes[j]));
    }
    worst_row = std::max(worst_row, row);
  }
  return worst_row;
}

double mixed_norm_check(const Matrix& M, const std::vector<int>& group_sizes) {
  if (M.rows() == 0) return 0.0;
  const int g = static_cast<int>(group_sizes.size());
  std::vector<int> off(g + 1, 0);
  for (int i = 0; i < g; ++i) off[i + 1] = off[i] + group_sizes[i];
  double worst_row = 0.0;
  for (int i = 0; i < g; ++i) {
    double row = 0.0;
    for (int j = 0; j < g; ++j) {
      if (group_sizes[i] == 0 || group_sizes[j] == 0) continue;
      Matrix B = M.block(off[i], off[j], group_sizes[i], group_sizes[j]);
      Eigen::SelfAdjointEigenSolver<Matrix> es(B.transpose() * B);
      row += std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
    }
    worst_row = std::max(worst_row, row);
  }
  return worst_row;
}

std::vector<int> unobservable_group_sizes(const StackedDecomposition& st) {
  std::vector<int> sizes;
  sizes.reserve(st.decs.size());
  for (const auto& d : st.decs) sizes.push_back(d.n_i());
  return sizes;
}

QCertificate choose_q_weighted(const StackedDecomposition& st,
                               const std::vector<NetworkSnapshot>& family, double lambda) {
  if (family.empty()) throw EmptyFamily("choose_q_weighted: no graphs supplied");
  QCertificate cert;
  cert.rate = lambda;
  if (st.n_bar == 0) return cert;  // q = 1, trivially certified

  constexpr int kCap = 100000;
  if (family.size() == 1) {
    Matrix R = perron_weight(st, family[0]);
    Matrix B = mixing_map(st, family[0]);
    cert.norm_B = weighted_norm(B, R);
    cert.norm_Atilde = weighted_norm(st.A_tilde, R);
    if (cert.norm_B >= 1.0)
      throw SolverDiverged("choose_q_weighted: weighted mixing norm not contractive");
    int q = 1;
    double pow_b = cert.norm_B;
    while (pow_b * cert.norm_Atilde > lambda && q < kCap) {
      pow_b *= cert.norm_B;
      ++q;
    }
    if (q >= kCap) throw SolverDiverged("choose_q_weighted: no q under the iteration cap");
    cert.q = q;
    cert.lhs = pow_b * cert.norm_Atilde;
    return cert;
  }

  // Time-varying family: plain two-norm route.
  cert.time_varying = true;
  std::vector<Matrix> Bs;
  for (const auto& snap : family) Bs.push_back(mixing_map(st, snap));
  int p = 1;
  for (; p < kCap; ++p) {
    double worst = 0.0;
    for (const auto& B : Bs) {
      Matrix Bp = B;
      for (int k = 1; k < p; ++k) Bp = B * Bp;
      worst = std::max(worst, induced_two_norm(Bp));
    }
    cert.norm_B = worst;
    if (worst < 1.0) break;
  }
  if (p >= kCap) throw SolverDiverged("choose_q_weighted: no contractive power");
  int p_bar = 1;
  double worst_lhs = 0.0;
  for (; p_bar < kCap; ++p_bar) {
    worst_lhs = 0.0;
    for (const auto& B : Bs) {
      Matrix Bp = Matrix::Identity(st.n_bar, st.n_bar);
      for (int k = 0; k < p; ++k) Bp = B * Bp;
      Matrix acc = Matrix::Identity(st.n_bar, st.n_bar);
      for (int k = 0; k < p_bar; ++k) acc = Bp * acc;
      worst_lhs = std::max(worst_lhs, induced_two_norm(st.A_tilde * acc));
    }
    if (worst_lhs <= lambda) break;
  }
  if (p_bar >= kCap) throw SolverDiverged("choose_q_weighted: no p_bar under the cap");
  cert.p = p;
  cert.p_bar = p_bar;
  cert.q = p * p_bar;
  cert.lhs = worst_lhs;
  cert.norm_Atilde = induced_two_norm(st.A_tilde);
  return cert;
}

QCertificate choose_q_mixed(const StackedDecomposition& st,
                            const std::vector<NetworkSnapshot>& family, double lambda) {
  if (family.empty()) throw EmptyFamily("choose_q_mixed: no graphs supplied");
  QCertificate cert;
  cert.rate = lambda;
  if (st.n_bar == 0) return cert;

  const auto groups = unobservable_group_sizes(st);
  const int p = (st.m - 1) * (st.m - 1);
  cert.p = std::max(p, 1);
  cert.norm_Atilde = mixed_norm(st.A_tilde, groups);

  int p_bar = 1;
  double worst_nb = 0.0;
  for (const auto& snap : family) {
    Matrix B = mixing_map(st, snap);
    Matrix Bp = Matrix::Identity(st.n_bar, st.n_bar);
    for (int k = 0; k < cert.p; ++k) Bp = B * Bp;
    double nb = mixed_norm(Bp, groups);
    if (nb >= 1.0)
      throw SolverDiverged("choose_q_mixed: mixed norm of B^p not contractive");
    worst_nb = std::max(worst_nb, nb);
    if (cert.norm_Atilde > 0.0) {
      int pb = 1;
      while (std::pow(nb, pb) * cert.norm_Atilde > lambda && pb < 100000) ++pb;
      p_bar = std::max(p_bar, pb);
    }
  }
  cert.norm_B = worst_nb;
  cert.p_bar = p_bar;
  cert.q = cert.p * p_bar;
  cert.lhs = std::pow(worst_nb, p_bar) * cert.norm_Atilde;
  return cert;
}

bool verify_q_certificate(const StackedDecomposition& st,
                          const std::vector<NetworkSnapshot>& family, double lambda,
                          const QCertificate& cert, bool mixed) {
  if (st.n_bar == 0) return cert.q == 1;
  const double slack = 1e-9 * std::max(1.0, lambda);
  if (mixed) {
    const auto groups = unobservable_group_sizes(st);
    double na = mixed_norm_check(st.A_tilde, groups);
    for (const auto& snap : family) {
      Matrix B = mixing_map(st, snap);
      Matrix Bp = Matrix::Identity(st.n_bar, st.n_bar);
      for (int k = 0; k < cert.p; ++k) Bp = B * Bp;
      double nb = mixed_norm_check(Bp, groups);
      if (nb >= 1.0) return false;
      if (std::pow(nb, cert.p_bar) * na > lambda + slack) return false;
    }
    return true;
  }
  if (!cert.time_varying) {
    Matrix R = perron_weight(st, family[0]);
    double nb = weighted_norm_check(mixing_map(st, family[0]), R);
    double na = weighted_norm_check(st.A_tilde, R);
    return std::pow(nb, cert.q) * na <= lambda + slack;
  }
  for (const auto& snap : family) {
    Matrix B = mixing_map(st, snap);
    Matrix Bp = Matrix::Identity(st.n_bar, st.n_bar);
    for (int k = 0; k < cert.p; ++k) Bp = B * Bp;
    if (induced_two_norm(Bp) >= 1.0) return false;
    Matrix acc = Matrix::Identity(st.n_bar, st.n_bar);
    for (int k = 0; k < cert.p_bar; ++k) acc = Bp * acc;
    // Check path: sqrt of the largest eigenvalue of (At acc)'(At acc).
    Matrix T = st.A_tilde * acc;
    Eigen::SelfAdjointEigenSolver<Matrix> es(T.transpose() * T);
    if (std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff())) > lambda + slack) return false;
  }
  return true;
}

}  // namespace splitobs
