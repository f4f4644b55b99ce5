#include <chrono>
#include <cstdint>
#include <iostream>
#include <vector>

#include "CLI11.hpp"
#include "splitobs/batch.hpp"
#include "splitobs/randgen.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace splitobs;

// Random fixed-graph scenario with a synthesized design. Instances whose
// fixed-regime gain bound is large are rejected: they make the joint
// generator stiff and benchmark numbers meaningless.
Scenario make_scenario(Rng& rng, double horizon) {
  for (int attempt = 0; attempt < 500; ++attempt) {
    RandomInstance inst = random_instance(rng, TimeKind::continuous);
    std::vector<AgentDecomposition> decs;
    for (int i = 0; i < inst.plant.m(); ++i)
      decs.push_back(
          synth_gain(decompose_agent(inst.plant, i), 0.5, TimeKind::continuous));
    StackedDecomposition st = stack(decs);
    NetworkSnapshot snap = make_snapshot(inst.graph);
    double g = 0.0;
    try {
      g = gain_bound_fixed(st, snap, 0.5).g;
    } catch (const CouplingDegenerate&) {
      continue;
    }
    if (g > 50.0) continue;

    Scenario sc;
    sc.plant = inst.plant;
    ContinuousDesign d;
    d.rate = 0.5;
    d.decs = std::move(decs);
    d.g = g + 1.0;
    d.regime = Regime::fixed;
    sc.cdesign = std::move(d);
    sc.family = {snap};
    sc.signal.breakpoints = {0.0};
    sc.signal.values = {0};
    sc.signal.horizon = horizon;
    sc.horizon = horizon;
    sc.h = 0.01;
    const int n = sc.plant.n(), m = sc.plant.m();
    sc.x0.resize(n);
    for (int k = 0; k < n; ++k) sc.x0(k) = rng.normal();
    for (int i = 0; i < m; ++i) {
      Vector xi(n);
      for (int k = 0; k < n; ++k) xi(k) = rng.normal();
      sc.xi0.push_back(xi);
    }
    return sc;
  }
  throw SolverDiverged("bench_batch: no well-conditioned instance found");
}

bool traces_identical(const BatchOutcome& a, const BatchOutcome& b) {
  if (a.ok != b.ok) return false;
  if (!a.ok) return a.error == b.error;
  const SimulationTrace& ta = a.trace;
  const SimulationTrace& tb = b.trace;
  if (ta.times != tb.times || ta.e_norm != tb.e_norm) return false;
  for (std::size_t s = 0; s < ta.x.size(); ++s) {
    if (ta.x[s] != tb.x[s]) return false;
    for (std::size_t i = 0; i < ta.xi[s].size(); ++i)
      if (ta.xi[s][i] != tb.xi[s][i]) return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"benchmark: serial vs parallel batch simulation"};
  int count = 24;
  double horizon = 5.0;
  std::uint64_t seed = 20260825;
  app.add_option("--count", count, "number of scenarios")->capture_default_str();
  app.add_option("--horizon", horizon, "horizon per scenario")
      ->capture_default_str();
  app.add_option("--seed", seed, "generator seed")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  Rng rng(seed);
  std::vector<Scenario> scenarios;
  for (int k = 0; k < count; ++k) scenarios.push_back(make_scenario(rng, horizon));

  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  auto serial = run_batch(scenarios, false);
  const auto t1 = clock::now();
  auto parallel = run_batch(scenarios, true);
  const auto t2 = clock::now();

  bool identical = true;
  int failures = 0;
  for (std::size_t k = 0; k < serial.size(); ++k) {
    identical = identical && traces_identical(serial[k], parallel[k]);
    if (!serial[k].ok) ++failures;
  }

  const double ser_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  const double par_ms = std::chrono::duration<double, std::milli>(t2 - t1).count();
  int threads = 1;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif
  std::cout << "scenarios:        " << count << " (horizon " << horizon << ")\n"
            << "serial:           " << ser_ms << " ms\n"
            << "parallel:         " << par_ms << " ms (" << threads << " threads)\n"
            << "speedup:          " << (par_ms > 0.0 ? ser_ms / par_ms : 0.0) << "x\n"
            << "failed runs:      " << failures << "\n"
            << "traces identical: " << (identical ? "yes" : "NO") << "\n";
  return identical ? 0 : 1;
}
