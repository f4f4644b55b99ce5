#ifndef SPLITOBS_SWITCHING_HPP_
#define SPLITOBS_SWITCHING_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "splitobs/errors.hpp"

namespace splitobs {

enum class SwitchKind { dwell, avg_dwell, arbitrary };

// Generation/validation parameters. tau_D applies to dwell and avg_dwell,
// delta0 to avg_dwell only, min_step to arbitrary only (a simulation-grid
// floor, not a dwell guarantee). integer_times restricts breakpoints to
// event indices for discrete-time plants.
struct SwitchSpec {
  SwitchKind kind = SwitchKind::dwell;
  double tau_D = 0.0;
  double delta0 = 0.0;
  double min_step = 0.0;
  bool integer_times = false;
};

// Piecewise-constant, right-continuous map t -> graph id: values[k] holds on
// [breakpoints[k], breakpoints[k+1]) and the last value up to the horizon.
// breakpoints[0] = 0; consecutive values differ. tau_D/delta0 record the
// declared generation metadata (0 = none).
struct SwitchingSignal {
  std::vector<double> breakpoints;
  std::vector<int> values;
  double horizon = 0.0;
  SwitchKind kind = SwitchKind::arbitrary;
  double tau_D = 0.0;
  double delta0 = 0.0;
};

struct SignalCheck {
  bool valid = true;
  double violation_time = 0.0;  // meaningful when !valid
  std::string message;
};

SwitchingSignal generate(const SwitchSpec& spec, int family_size, double horizon,
                         std::uint64_t seed);

// Structural invariants first (monotone breakpoints from 0, ids nonnegative,
// no null switches), then the kind-specific law: dwell -- consecutive switch
// instants separated by >= tau_D; avg_dwell -- the count bound
// N(t0, t] <= delta0 + (t - t0)/tau_D, checked over all breakpoint pairs
// (sufficient: the supremum over (t0, t] windows is approached there);
// arbitrary -- structural checks only.
SignalCheck validate(const SwitchingSignal& sig, const SwitchSpec& spec);

// Value of the interval containing t; right-continuous at breakpoints.
int sample(const SwitchingSignal& sig, double t);

// Number of discontinuities in (t0, t].
int switch_count(const SwitchingSignal& sig, double t0, double t);

// Two-column (t, graph_id) staircase covering [0, horizon], 1-based ids.
std::string indicator_csv(const SwitchingSignal& sig);

}  // namespace splitobs

#endif  // SPLITOBS_SWITCHING_HPP_
