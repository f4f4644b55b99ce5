#ifndef SPLITOBS_BATCH_HPP_
#define SPLITOBS_BATCH_HPP_

#include <string>
#include <vector>

#include "splitobs/simulator.hpp"

namespace splitobs {

struct BatchOutcome {
  bool ok = false;
  SimulationTrace trace;  // valid when ok
  std::string error;      // failure message when !ok
};

// Runs many independent simulations. Each simulation is single-threaded and
// deterministic, so the parallel (OpenMP) and serial paths produce identical
// traces; the serial path is kept as the reference implementation and for
// the benchmark comparison.
std::vector<BatchOutcome> run_batch(const std::vector<Scenario>& scenarios,
                                    bool parallel);

}  // namespace splitobs

#endif  // SPLITOBS_BATCH_HPP_
