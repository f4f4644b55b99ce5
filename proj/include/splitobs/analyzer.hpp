#ifndef SPLITOBS_ANALYZER_HPP_
#define SPLITOBS_ANALYZER_HPP_

#include <complex>
#include <vector>

#include "splitobs/designer.hpp"
#include "splitobs/simulator.hpp"

namespace splitobs {

// Log-linear fit of the stacked error norm. lambda_est is always expressed
// per unit time; ratio is the equivalent per-step contraction factor
// (exp(slope * sample_period) for discrete traces, exp(slope) otherwise).
struct DecayFit {
  double lambda_est = 0.0;
  double ratio = 1.0;
  double intercept = 0.0;   // fitted ln||e|| at the window start
  double t_a = 0.0;         // fit window, trace time units
  double t_b = 0.0;
  double residual = 0.0;    // max |ln||e|| - fitted line| over used samples
  double floor = 0.0;       // samples at or below this norm are dropped
  int samples_used = 0;
};

// Fits over [t_a, t_b] with the given noise floor. The overload picks the
// defaults: window drops the first 10% of the trace, floor = 1e-12 ||e(0)||.
DecayFit fit_decay_rate(const SimulationTrace& trace, double t_a, double t_b,
                        double floor);
DecayFit fit_decay_rate(const SimulationTrace& trace);

// Eigenvalue report of the closed-loop error map for one graph. quotient
// holds the per-agent observable closed loops (design-placed), coupled the
// g- or q-dependent block on the unobservable directions; their multiset
// union must match the full map's spectrum.
struct SpectrumReport {
  TimeKind time_kind = TimeKind::continuous;
  double lambda = 0.0;
  std::vector<std::complex<double>> full;
  std::vector<std::complex<double>> quotient;
  std::vector<std::complex<double>> coupled;
  double union_gap = 0.0;     // greedy matching distance, <= 1e-7 expected
  double extreme = 0.0;       // spectral abscissa (continuous) or radius (discrete)
  double worst_margin = 0.0;  // -lambda - extreme, resp. lambda - extreme
};

SpectrumReport spectrum_report(const ContinuousDesign& design,
                               const NetworkSnapshot& snap);
SpectrumReport spectrum_report(const DiscreteDesign& design,
                               const NetworkSnapshot& snap);

// Residuals of the two coupling identities behind the gain and q selections:
// continuous_residual = ||H N + N' H - V'(L x I)V||_F, discrete_max_eig =
// max eig of B' R B - R (negative iff the Perron-weighted mixing contracts).
struct LyapunovResidual {
  double continuous_residual = 0.0;
  double discrete_max_eig = 0.0;
};

LyapunovResidual lyapunov_residual(const NetworkSnapshot& snap,
                                   const StackedDecomposition& st);

}  // namespace splitobs

#endif  // SPLITOBS_ANALYZER_HPP_
