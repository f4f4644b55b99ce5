#include "splitobs/batch.hpp"

#include <cstdint>

namespace splitobs {

namespace {

BatchOutcome run_one(const Scenario& sc) {
  BatchOutcome out;
  try {
    out.trace = simulate(sc);
    out.ok = true;
  } catch (const Error& e) {
    out.error = e.what();
  }
  return out;
}

}  // namespace

std::vector<BatchOutcome> run_batch(const std::vector<Scenario>& scenarios,
                                    bool parallel) {
  std::vector<BatchOutcome> out(scenarios.size());
  const std::int64_t count = static_cast<std::int64_t>(scenarios.size());
  if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::int64_t i = 0; i < count; ++i)
      out[static_cast<std::size_t>(i)] = run_one(scenarios[static_cast<std::size_t>(i)]);
  } else {
    for (std::int64_t i = 0; i < count; ++i)
      out[static_cast<std::size_t>(i)] = run_one(scenarios[static_cast<std::size_t>(i)]);
  }
  return out;
}

}  // namespace splitobs
