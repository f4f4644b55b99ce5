#ifndef SPLITOBS_SCENARIO_HPP_
#define SPLITOBS_SCENARIO_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "splitobs/simulator.hpp"

namespace splitobs {

// A parsed scenario file: the resolved, simulate-ready Scenario plus the
// declarative pieces needed to serialize it back canonically (raw graphs,
// declared signal law, output paths, expectation block).
struct ScenarioDoc {
  Scenario scenario;

  std::string signal_kind = "fixed";  // declared: fixed|dwell|avg_dwell|arbitrary
  SwitchSpec spec;                    // declared law parameters
  std::optional<std::uint64_t> signal_seed;  // set when the signal was generated

  Regime regime = Regime::fixed;    // continuous coupling-bound regime
  bool design_synthesized = false;  // true when gains came from synth_gain
  std::string q_method = "weighted";
  std::vector<Matrix> design_K;     // resolved per-agent gains, as given/synthesized

  std::vector<NeighborGraph> raw_graphs;

  std::string trace_csv = "trace.csv";
  std::string signal_csv = "signal.csv";
  std::string report_json = "report.json";

  // Optional expectation for intentionally failing fixtures: `check` passes
  // iff running the scenario raises this error.
  std::optional<std::string> expect_error;
  std::optional<std::string> expect_contains;

  std::vector<std::string> warnings;
};

// Parses and fully validates a scenario document. Design and signal are
// resolved here (gain synthesis, bound computation, signal generation), so a
// returned doc is ready to simulate. seed_override replaces the file's
// signal seed. Throws SchemaError with a JSON-path message on malformed
// input, FileNotFound, or domain errors from the resolution step.
ScenarioDoc parse_scenario(const std::string& path,
                           std::optional<std::uint64_t> seed_override = std::nullopt);

// Same, from an in-memory document; `origin` names the source in errors.
ScenarioDoc parse_scenario_text(const std::string& text, const std::string& origin,
                                std::optional<std::uint64_t> seed_override = std::nullopt);

// Canonical serialization: design resolved to use-given (explicit K and g/q),
// signal resolved to explicit breakpoints, defaults spelled out. The output
// reparses to an identical document (round-trip fixpoint).
std::string serialize_scenario(const ScenarioDoc& doc);

}  // namespace splitobs

#endif  // SPLITOBS_SCENARIO_HPP_
