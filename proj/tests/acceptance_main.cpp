// Runs criteria 1-12 and prints one line per check. Exit status 0 means every
// check passed; with --allow-documented, rows marked FAIL* (targets shown to
// be unattainable as stated) do not count as failures.
#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "spdelab/acceptance.hpp"
#include "spdelab/config.hpp"
#include "spdelab/csv.hpp"

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::string config, out;
  std::vector<std::string> only;
  bool allow_documented = false;
  app.add_option("--config", config, "JSON configuration");
  app.add_option("--only", only, "criteria ids or module names")->delimiter(',');
  app.add_option("--out", out, "directory for the CSV report");
  app.add_flag("--allow-documented", allow_documented, "do not fail on FAIL* rows");
  CLI11_PARSE(app, argc, argv);

  try {
    auto cfg = config.empty() ? spdelab::default_config() : spdelab::load_config(config);
    if (!only.empty()) cfg.only = only;
    const auto reps = spdelab::run_acceptance(cfg, std::cout);
    if (!out.empty()) {
      std::filesystem::create_directories(out);
      spdelab::write_file((std::filesystem::path(out) / "acceptance.csv").string(), spdelab::acceptance_csv(reps));
    }
    int failed = 0, documented = 0;
    for (const auto& r : reps) {
      if (r.passed()) continue;
      if (r.only_known_failures()) ++documented;
      else ++failed;
    }
    std::cout << "summary: " << reps.size() << " criteria, " << (reps.size() - failed - documented) << " passed, "
              << documented << " failed for documented reasons, " << failed << " failed\n";
    if (failed > 0) return 1;
    if (documented > 0 && !allow_documented) return 1;
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
