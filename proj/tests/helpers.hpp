#ifndef SPLITOBS_TESTS_HELPERS_HPP_
#define SPLITOBS_TESTS_HELPERS_HPP_

#include <string>
#include <vector>

#include "splitobs/decomposition.hpp"
#include "splitobs/designer.hpp"
#include "splitobs/netgraph.hpp"
#include "splitobs/randgen.hpp"
#include "splitobs/simulator.hpp"

namespace testkit {

using splitobs::Matrix;
using splitobs::Vector;

// Four-state two-oscillator plant measured one coordinate per agent: no
// single agent is observable, the three together are. The reference example
// used across the fixture corpus.
inline splitobs::Plant example_plant(splitobs::TimeKind kind) {
  splitobs::Plant p;
  p.A = Matrix{{0, 1, 0, 0}, {-1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, -2, 0}};
  p.C = {Matrix{{1, 0, 0, 0}}, Matrix{{0, 1, 0, 0}}, Matrix{{0, 0, 1, 0}}};
  p.time_kind = kind;
  p.sample_period = 1.0;
  return p;
}

// The reference example's hand-picked quotient coordinates (non-orthonormal
// row order on purpose; agent 2's first row is negated).
inline Matrix reference_Q(int i) {
  switch (i) {
    case 0: return Matrix{{0, 1, 0, 0}, {1, 0, 0, 0}};
    case 1: return Matrix{{-1, 0, 0, 0}, {0, 1, 0, 0}};
    default: return Matrix{{0, 0, 0, 1}, {0, 0, 1, 0}};
  }
}

inline std::vector<Matrix> continuous_gains() {
  return {Matrix{{-5}, {-5}, {0}, {0}}, Matrix{{5}, {-5}, {0}, {0}},
          Matrix{{0}, {0}, {-5}, {-4}}};
}

inline std::vector<Matrix> discrete_gains() {
  return {Matrix{{0.7}, {0.88}, {0}, {0}}, Matrix{{-0.8}, {0.7}, {0}, {0}},
          Matrix{{0}, {0}, {0.7}, {1.88}}};
}

// Decompositions with the reference gains installed (default orthonormal Q).
inline std::vector<splitobs::AgentDecomposition> example_decs(splitobs::TimeKind kind) {
  splitobs::Plant p = example_plant(kind);
  std::vector<Matrix> K = kind == splitobs::TimeKind::continuous ? continuous_gains()
                                                                 : discrete_gains();
  std::vector<splitobs::AgentDecomposition> decs;
  for (int i = 0; i < p.m(); ++i) {
    auto d = splitobs::decompose_agent(p, i);
    decs.push_back(splitobs::set_injection_gain(d, d.Q * K[i]));
  }
  return decs;
}

// 3-agent graphs: (a) the directed ring plus the chord 1->3, (b) the ring.
inline splitobs::NeighborGraph graph_a() {
  return splitobs::make_graph(3, {{0, 1}, {1, 2}, {2, 0}, {0, 2}});
}
inline splitobs::NeighborGraph graph_b() {
  return splitobs::make_graph(3, {{0, 1}, {1, 2}, {2, 0}});
}

inline splitobs::SwitchingSignal single_segment_signal(double horizon) {
  splitobs::SwitchingSignal sig;
  sig.breakpoints = {0.0};
  sig.values = {0};
  sig.horizon = horizon;
  sig.kind = splitobs::SwitchKind::arbitrary;
  return sig;
}

inline Vector example_x0() { return Vector{{1.0, -0.5, 0.8, 1.2}}; }

// Estimator initializations that excite each agent's own modes (used by the
// discrete envelope checks; zero initialization works too but mixes modes).
inline std::vector<Vector> mode_ic_xi0() {
  return {Vector{{1.0, -0.5, 0.8, 1.2}}, Vector{{0.81, -2.34, 0.8, 1.2}},
          Vector{{0.523, -1.092, 0.8, 1.2}}};
}

inline std::vector<Vector> zero_xi0(int m = 3, int n = 4) {
  return std::vector<Vector>(static_cast<std::size_t>(m), Vector::Zero(n));
}

inline splitobs::Scenario continuous_scenario(double g, double horizon, double h) {
  splitobs::Scenario sc;
  sc.plant = example_plant(splitobs::TimeKind::continuous);
  splitobs::ContinuousDesign d;
  d.rate = 1.0;
  d.decs = example_decs(splitobs::TimeKind::continuous);
  d.g = g;
  d.regime = splitobs::Regime::fixed;
  sc.cdesign = std::move(d);
  sc.family = {splitobs::make_snapshot(graph_a())};
  sc.signal = single_segment_signal(horizon);
  sc.x0 = example_x0();
  sc.xi0 = zero_xi0();
  sc.horizon = horizon;
  sc.h = h;
  return sc;
}

inline splitobs::Scenario discrete_scenario(int q, double horizon) {
  splitobs::Scenario sc;
  sc.plant = example_plant(splitobs::TimeKind::discrete);
  splitobs::DiscreteDesign d;
  d.rate = 0.5;
  d.decs = example_decs(splitobs::TimeKind::discrete);
  d.q = q;
  sc.ddesign = std::move(d);
  sc.family = {splitobs::make_snapshot(graph_a())};
  sc.signal = single_segment_signal(horizon);
  sc.x0 = example_x0();
  sc.xi0 = mode_ic_xi0();
  sc.horizon = horizon;
  return sc;
}

inline std::string fixture_path(const std::string& name) {
  return std::string(SPLITOBS_FIXTURE_DIR) + "/" + name + ".json";
}

inline Matrix random_matrix(splitobs::Rng& rng, int rows, int cols) {
  Matrix M(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) M(r, c) = rng.normal();
  return M;
}

inline bool same_values(const Vector& a, const Vector& b) {
  return a.size() == b.size() && a == b;
}

inline bool same_values(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

}  // namespace testkit

#endif  // SPLITOBS_TESTS_HELPERS_HPP_
