#ifndef SPLITOBS_PIPELINE_HPP_
#define SPLITOBS_PIPELINE_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "splitobs/scenario.hpp"

namespace splitobs {

struct RunOptions {
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;  // overrides the scenario's signal seed
  bool experimental_adaptive_switching = false;
};

// One CLI command against one scenario file. Returns the process exit code:
// 0 success, 1 certificate or domain failure, 2 usage/schema error. cmd is
// one of design|simulate|analyze|check.
int run_command(const std::string& cmd, const std::string& scenario_path,
                const RunOptions& opts);

// `check` fanned out over many fixtures (parallel when OpenMP is enabled);
// exit code is the worst individual code.
int check_fixtures(const std::vector<std::string>& paths, const RunOptions& opts);

// Fixed-column CSV export. Columns, in order: t, x_1..x_n,
// xhat<i>_1..xhat<i>_n for each agent i, e_norm, g_1..g_m (adaptive runs
// only), graph_id (1-based). Numbers use 17 significant digits.
std::string trace_to_csv(const SimulationTrace& tr);

// Structured check outcome, also used by the test suite directly.
struct CheckReport {
  bool ok = true;
  std::vector<std::string> lines;  // one human-readable line per check
};

CheckReport run_check_doc(const ScenarioDoc& doc);

// stderr logging gated by the SPLITOBS_LOG environment variable (any
// nonempty value enables it).
void log_line(const std::string& msg);

}  // namespace splitobs

#endif  // SPLITOBS_PIPELINE_HPP_
