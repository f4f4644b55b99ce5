#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "splitobs/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "splitobs: design, simulate and verify split-spectrum distributed "
      "observers over directed networks"};
  app.require_subcommand(1);

  std::string scenario;
  std::string out_dir = ".";
  std::string fixtures_dir;
  std::uint64_t seed = 0;
  bool experimental = false;

  for (const char* name : {"design", "simulate", "analyze", "check"}) {
    const std::string help =
        std::string(name) == "design"
            ? "emit the design report (gains, bounds, certificates)"
        : std::string(name) == "simulate"
            ? "run the scenario and write the trace/signal CSVs"
        : std::string(name) == "analyze"
            ? "simulate, fit the decay rate and write the analysis report"
            : "run the full certificate suite against the scenario";
    CLI::App* sub = app.add_subcommand(name, help);
    CLI::Option* sopt =
        sub->add_option("--scenario", scenario, "scenario JSON file");
    sub->add_option("--out", out_dir, "output directory")
        ->capture_default_str();
    sub->add_option("--seed", seed,
                    "override the scenario's switching-signal seed");
    sub->add_flag("--experimental-adaptive-switching", experimental,
                  "allow adaptive gains under switching graphs");
    if (std::string(name) == "check") {
      sub->add_option("--all-fixtures", fixtures_dir,
                      "check every *.json scenario in a directory")
          ->excludes(sopt);
    } else {
      sopt->required();
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  splitobs::RunOptions opts;
  opts.out_dir = out_dir;
  opts.experimental_adaptive_switching = experimental;
  if (sub->count("--seed") > 0) opts.seed = seed;

  if (sub->get_name() == "check" && sub->count("--all-fixtures") > 0) {
    namespace fs = std::filesystem;
    std::vector<std::string> paths;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(fixtures_dir, ec))
      if (entry.is_regular_file() && entry.path().extension() == ".json")
        paths.push_back(entry.path().string());
    if (ec) {
      std::cerr << "usage error: cannot read directory " << fixtures_dir << "\n";
      return 2;
    }
    if (paths.empty()) {
      std::cerr << "usage error: no *.json scenarios in " << fixtures_dir << "\n";
      return 2;
    }
    std::sort(paths.begin(), paths.end());
    return splitobs::check_fixtures(paths, opts);
  }

  if (scenario.empty()) {
    std::cerr << "usage error: check needs --scenario or --all-fixtures\n";
    return 2;
  }
  return splitobs::run_command(sub->get_name(), scenario, opts);
}
