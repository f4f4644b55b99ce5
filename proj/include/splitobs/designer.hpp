#ifndef SPLITOBS_DESIGNER_HPP_
#define SPLITOBS_DESIGNER_HPP_

#include <vector>

#include "splitobs/decomposition.hpp"
#include "splitobs/netgraph.hpp"
#include "splitobs/stacked_ops.hpp"

namespace splitobs {

enum class Regime { fixed, dwell, arbitrary };

// Per-agent injection gain at the prescribed rate: continuous places the
// quotient spectrum left of -lambda (Riccati on the shifted pair
// (A_bar + lambda I, C_bar)), discrete inside the lambda-circle (Riccati on
// (A_bar/lambda, C_bar), K_bar = lambda K_tilde).
AgentDecomposition synth_gain(const AgentDecomposition& dec, double lambda, TimeKind kind);

struct FixedGainBound {
  double g = 0.0;
  double numerator = 0.0;
  double denominator = 0.0;
  bool clamped = false;              // numerator was negative
  double certificate_abscissa = 0.0; // abscissa of lambda I + A_tilde - g N, <= 0 certifies
  double lmi_max_eig = 0.0;          // max eig of H M + M' H - g V'(L x I)V, <= 0 certifies
};

// Coupling gain for a fixed strongly connected graph:
// g = max(0, eig_max(H(lI+At) + (lI+At)'H) / eig_min(V'(L (x) I_n)V)).
FixedGainBound gain_bound_fixed(const StackedDecomposition& st, const NetworkSnapshot& snap,
                                double lambda);

// A-posteriori certificate for a user-supplied g under the fixed regime.
double certify_fixed(const StackedDecomposition& st, const NetworkSnapshot& snap,
                     double lambda, double g);

struct DwellGainBound {
  double g = 0.0;
  double c = 1.0;            // transient constant, > 1
  double lambda_star = 0.0;  // decay rate certified for every family member
  double a_tilde_norm = 0.0;
};

// Coupling gain for (average-)dwell switching over a family:
// g >= (ln c + (lambda + ||A_tilde|| c) tau_D) / (lambda* tau_D), with (c,
// lambda*) found by a grid search over the family's common decay margin.
DwellGainBound gain_bound_dwell(const StackedDecomposition& st,
                                const std::vector<NetworkSnapshot>& family, double tau_D,
                                double lambda);

struct ArbitraryGainBound {
  double g = 0.0;
  double numerator = 0.0;
  double min_denominator = 0.0;
  bool clamped = false;
  double certificate_max_eig = 0.0;  // worst member's max eig of sym part, <= 0 certifies
};

// Coupling gain valid under arbitrary switching when every flow matrix is
// doubly stochastic (symmetric-part argument).
ArbitraryGainBound gain_bound_arbitrary(const StackedDecomposition& st,
                                        const std::vector<NetworkSnapshot>& family,
                                        double lambda);

struct QCertificate {
  int q = 1;
  int p = 0;      // inner/outer split where applicable (0 = not used)
  int p_bar = 0;
  double lhs = 0.0;      // certified quantity, <= rate
  double rate = 0.0;
  double norm_B = 0.0;   // contraction factor used by the selection loop
  double norm_Atilde = 0.0;
  bool time_varying = false;
};

// Weighted-two-norm selection. Fixed graph (family of one): smallest q with
// ||B||_R^q ||A_tilde||_R <= lambda, ||M||_R the R^{1/2}-weighted two-norm.
// Time-varying: p with max ||B_k^p||_2 < 1, then p_bar with
// max ||A_tilde (B_k^p)^p_bar||_2 <= lambda, q = p * p_bar.
QCertificate choose_q_weighted(const StackedDecomposition& st,
                               const std::vector<NetworkSnapshot>& family, double lambda);

// Mixed-matrix-norm selection: p = (m-1)^2, then the smallest p_bar with
// ||B_k^p||^p_bar <= lambda / ||A_tilde|| in the blockwise mixed norm
// (<M>_ij = ||M_ij||_2, then induced-infinity norm).
QCertificate choose_q_mixed(const StackedDecomposition& st,
                            const std::vector<NetworkSnapshot>& family, double lambda);

// Norm evaluators. The *_check variants are deliberately separate code paths
// (generalized eigenproblem / blockwise eigensolve) used to re-verify
// certificates independently of the selection loop.
double weighted_norm(const Matrix& M, const Matrix& R);
double weighted_norm_check(const Matrix& M, const Matrix& R);
double mixed_norm(const Matrix& M, const std::vector<int>& group_sizes);
double mixed_norm_check(const Matrix& M, const std::vector<int>& group_sizes);

// Re-evaluates a q-selection certificate with the check-path norms.
bool verify_q_certificate(const StackedDecomposition& st,
                          const std::vector<NetworkSnapshot>& family, double lambda,
                          const QCertificate& cert, bool mixed);

std::vector<int> unobservable_group_sizes(const StackedDecomposition& st);

struct ContinuousDesign {
  double rate = 1.0;
  std::vector<AgentDecomposition> decs;
  double g = 0.0;
  Regime regime = Regime::fixed;
  double tau_D = 0.0;
  double delta0 = 0.0;
  Matrix H;  // blockdiag{pi_i I_{n_i}} (fixed regime; empty otherwise)
};

enum class QMethod { weighted, mixed };

struct DiscreteDesign {
  double rate = 0.5;
  std::vector<AgentDecomposition> decs;
  int q = 1;
  QMethod method = QMethod::weighted;
  int p = 0;
  int p_bar = 0;
};

}  // namespace splitobs

#endif  // SPLITOBS_DESIGNER_HPP_
