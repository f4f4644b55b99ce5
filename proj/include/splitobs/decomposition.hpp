#ifndef SPLITOBS_DECOMPOSITION_HPP_
#define SPLITOBS_DECOMPOSITION_HPP_

#include <optional>
#include <vector>

#include "splitobs/matrixkit.hpp"

namespace splitobs {

enum class TimeKind { continuous, discrete };

// The multi-channel plant: one state map A shared by all agents, agent i sees
// y_i = C_i x. Joint observability (stacked pair observable) is the standing
// assumption; it is checked by joint_observability, not by the constructor.
struct Plant {
  Matrix A;
  std::vector<Matrix> C;
  TimeKind time_kind = TimeKind::continuous;
  double sample_period = 1.0;  // discrete only; pure timestamp scaling

  int n() const { return static_cast<int>(A.rows()); }
  int m() const { return static_cast<int>(C.size()); }
};

void validate_dimensions(const Plant& plant);

// Per-agent observability split. V spans the unobservable subspace of
// (C_i, A); Q is full-row-rank with ker Q = span V. Everything downstream
// hangs off the intertwining identities
//   Q A = A_bar Q,          (quotient dynamics)
//   (A + K C_i) V = V A_restricted,   (closed loop leaves span V invariant)
//   Q (A + K C_i) = (A_bar + K_bar C_bar) Q.
struct AgentDecomposition {
  Matrix V;             // n x n_i, orthonormal
  Matrix Q;             // (n - n_i) x n, full row rank, ker Q = span V
  Matrix Q_right_inv;   // right inverse of Q with V' Q_right_inv = 0
  Matrix C_bar;         // quotient output map, C_bar Q = C_i
  Matrix A_bar;         // quotient state map
  Matrix P;             // V V', orthogonal projection onto the subspace
  Matrix A_restricted;  // restriction of A + K C_i to span V
  Matrix K_bar;         // quotient injection gain (empty until set)
  Matrix K;             // lifted gain Q_right_inv K_bar
  bool gains_set = false;

  // Carried plant context so gains can be (re)set without replumbing.
  Matrix A;
  Matrix C;

  int n_i() const { return static_cast<int>(V.cols()); }
};

// Decompose agent i. If Q_given is provided it is used instead of the
// orthonormal default (it must be full row rank with Q_given V = 0).
AgentDecomposition decompose_agent(const Plant& plant, int i,
                                   const std::optional<Matrix>& Q_given = std::nullopt);

AgentDecomposition set_injection_gain(const AgentDecomposition& dec, const Matrix& K_bar);

// Block-diagonal stacks over all agents plus the standard similarity
// T_mat = [Q_right_inv V], T_inv = [Q; V'] that block-triangularizes the
// error map.
struct StackedDecomposition {
  std::vector<AgentDecomposition> decs;
  Matrix V;          // mn x n_bar
  Matrix Q;          // (mn - n_bar) x mn
  Matrix P;          // V V'
  Matrix T_mat;      // mn x mn
  Matrix T_inv;
  Matrix A_bar_big;  // blockdiag{A + K_i C_i}
  Matrix A_bar_V;    // blockdiag{A_bar_i + K_bar_i C_bar_i}
  Matrix A_tilde;    // blockdiag{A restricted to each V_i}
  int n_bar = 0;     // total unobservable dimension
  int n = 0;         // plant dimension
  int m = 0;         // agent count
};

StackedDecomposition stack(const std::vector<AgentDecomposition>& decs);

struct ObservabilityReport {
  bool jointly_observable = false;
  int rank = 0;          // rank of the stacked observability matrix
  int n = 0;
  int intersection_dim = 0;  // dim of the common unobservable subspace
};

ObservabilityReport joint_observability(const Plant& plant);

}  // namespace splitobs

#endif  // SPLITOBS_DECOMPOSITION_HPP_
