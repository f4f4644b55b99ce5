#ifndef SPLITOBS_SIMULATOR_HPP_
#define SPLITOBS_SIMULATOR_HPP_

#include <optional>
#include <vector>

#include "splitobs/decomposition.hpp"
#include "splitobs/designer.hpp"
#include "splitobs/netgraph.hpp"
#include "splitobs/switching.hpp"

namespace splitobs {

enum class FaultKind { remove_arc, remove_agent };

// Arc endpoints and agents are 0-based original ids (pre-removal labels).
struct FaultEvent {
  double time = 0.0;
  FaultKind kind = FaultKind::remove_arc;
  int from = -1;
  int to = -1;
  int agent = -1;
};

struct Scenario {
  Plant plant;
  std::optional<ContinuousDesign> cdesign;  // continuous plants
  std::optional<DiscreteDesign> ddesign;    // discrete plants
  SwitchingSignal signal;
  std::vector<NetworkSnapshot> family;
  Vector x0;
  std::vector<Vector> xi0;
  Vector g0;  // per-agent initial adaptive gains (adaptive mode only)
  bool adaptive = false;
  double horizon = 10.0;
  double h = 0.01;  // output grid step (continuous modes)
  std::vector<FaultEvent> faults;
  bool experimental_adaptive_switching = false;
};

// Time-indexed joint trajectory. Frozen (removed) agents keep their last
// state in xi and are dropped from e_norm; `active` lists the surviving
// original agent ids per sample. ei is stored redundantly (ei = xi - x at
// the sample time) and cross-checked by the test suite.
struct SimulationTrace {
  std::vector<double> times;
  std::vector<Vector> x;
  std::vector<std::vector<Vector>> xi;
  std::vector<std::vector<Vector>> ei;
  std::vector<double> e_norm;
  std::vector<Vector> gi;  // adaptive gains per sample (adaptive mode only)
  std::vector<int> graph_id;
  std::vector<std::vector<int>> active;
  TimeKind time_kind = TimeKind::continuous;
  double sample_period = 1.0;
  int n = 0;
  int m = 0;
};

// Shared structural validation (dimensions, signal, family coverage).
void validate_scenario(const Scenario& sc);

// Piecewise-exact propagation: one matrix exponential of the joint
// generator per constant-graph segment; grid points, switch instants and
// fault times are all sample points.
SimulationTrace simulate_continuous(const Scenario& sc);

// Fixed-step RK4 on the same joint dynamics; verification oracle for the
// matrix-exponential path.
SimulationTrace simulate_continuous_rk4(const Scenario& sc, double step);

// Event-indexed run: q inner consensus rounds on full state vectors, then
// the output-injection step. The stacked error is independently checked
// against its closed-form map every step (dual-path check, 1e-9).
SimulationTrace simulate_discrete(const Scenario& sc);

// Joint nonlinear ODE (states, estimates, per-agent gains) under adaptive
// coupling gains, integrated by embedded RK4(5) with rtol 1e-8.
SimulationTrace simulate_adaptive(const Scenario& sc);

// Dispatch on plant.time_kind and sc.adaptive.
SimulationTrace simulate(const Scenario& sc);

}  // namespace splitobs

#endif  // SPLITOBS_SIMULATOR_HPP_
