// ced: scenario runner and workload generator.
#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <iostream>

#include "ced/common/error.hpp"
#include "ced/harness/presets.hpp"
#include "ced/harness/report.hpp"

namespace fs = std::filesystem;
using namespace ced::harness;

namespace {

std::vector<ScenarioConfig> resolve(const std::string& what) {
  if (fs::exists(what)) return load_scenarios(what);
  return find_preset(what).scenarios;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cloud-edge collaborative time-series query simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a scenario file or a built-in preset");
  std::string scenario;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> scale;
  std::string scratch;
  run->add_option("--scenario", scenario, "Scenario file or preset name")->required();
  run->add_option("--out", out_dir, "Output directory for CSV files")->required();
  run->add_option("--seed", seed, "Override workload and link seeds");
  run->add_option("--scale", scale, "Multiply dataset rows (and forced-migration points)");
  run->add_option("--scratch", scratch, "Working directory for store files (default: <out>/.work)");

  auto* gen = app.add_subcommand("gen", "Generate a workload and print its shape");
  std::string workload_file;
  std::string gen_dir = "ced-data";
  gen->add_option("--workload", workload_file, "Workload file")->required()->check(CLI::ExistingFile);
  gen->add_option("--dir", gen_dir, "Store directory");

  auto* pre = app.add_subcommand("presets", "Built-in presets");
  pre->require_subcommand(1);
  auto* list = pre->add_subcommand("list", "List preset names");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      auto scenarios = resolve(scenario);
      for (auto& s : scenarios) apply_overrides(s, seed, scale);
      fs::path work = scratch.empty() ? fs::path(out_dir) / ".work" : fs::path(scratch);
      auto reports = run_all(scenarios, work);
      emit(reports, out_dir);
      if (scratch.empty()) fs::remove_all(work);
      for (const auto& r : reports) {
        std::cout << fmt::format("{:<48} {:>13} mean {:>10.3f} ms  qps {:>8.3f}\n", r.scenario, mode_name(r.mode),
                                 r.mean_latency_ms, r.qps);
      }
      std::cout << "wrote " << reports.size() << " scenario(s) to " << out_dir << "\n";
    } else if (*gen) {
      auto w = load_workload(workload_file);
      Dataset ds(w, gen_dir);
      std::uint64_t bytes = 0;
      for (const auto& s : ds.series()) bytes += ds.store().image(s).size();
      std::cout << fmt::format("{} series, {} points, {} bytes in {}\n", ds.series().size(), ds.points(), bytes,
                               gen_dir);
    } else if (*list) {
      for (const auto& p : presets()) {
        std::cout << fmt::format("{:<18} {:>3} scenarios  {}\n", p.name, p.scenarios.size(), p.description);
      }
    }
  } catch (const ced::CedError& e) {
    std::cerr << "ced: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
