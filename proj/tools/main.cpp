// puwbench: scenario simulation, measurement probes and task micro-benchmarks
// for proof-of-work task backends.
//
// Exit codes: 0 ok, 1 runtime failure, 2 configuration error, 3 task-supply
// stall, 4 missing trace/report input.

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "puw/report.hpp"
#include "puw/scenario.hpp"
#include "puw/task_types.hpp"

namespace {

// PUWBENCH_THREADS caps the probe worker pool; default = hardware threads.
unsigned thread_cap() {
  unsigned cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("PUWBENCH_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) cap = static_cast<unsigned>(std::min<long>(v, 256));
  }
  return cap;
}

std::vector<std::string> split_csv_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"proof-of-work task bench: simulate scenarios, probe properties, bench backends"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  std::string mode_str;
  std::string probes_str;

  auto* simulate =
      app.add_subcommand("simulate", "run a scenario; writes trace.csv and run_meta.txt");
  simulate->add_option("--scenario", scenario_path, "scenario file (flat key = value lines)")
      ->required();
  simulate->add_option("--out", out_dir, "output directory (default: .)");
  auto* sim_seed = simulate->add_option("--seed", seed, "override the scenario seed");
  simulate->add_option("--mode", mode_str, "override the scenario mode")
      ->check(CLI::IsMember({"analytic", "measured"}));

  auto* probe = app.add_subcommand(
      "probe", "run measurement probes; writes probe_report.csv and summary.txt");
  probe->add_option("--out", out_dir,
                    "directory holding trace.csv/run_meta.txt; receives the reports");
  probe->add_option("--scenario", scenario_path,
                    "scenario file (default: the one embedded in run_meta.txt)");
  auto* probe_seed = probe->add_option("--seed", seed, "override the micro-probe seed");
  probe->add_option("--probes", probes_str,
                    "comma-separated probe names (default: all applicable)");

  auto* bench = app.add_subcommand(
      "bench-task", "wall-clock and op-count quantiles for generate/solve/verify");
  std::string class_str = "cryptopuzzle";
  puw::report::BenchParams bp;
  bench->add_option("--class", class_str, "task class")
      ->check(CLI::IsMember({"cryptopuzzle", "kov", "tsp"}));
  bench->add_option("--trials", bp.trials, "iterations per phase (default 100)");
  bench->add_option("--seed", bp.seed, "benchmark seed");
  bench->add_option("--out", out_dir, "output directory for bench_<class>.csv");
  bench->add_option("--nonce-bits", bp.nonce_bits, "cryptopuzzle nonce-space bits")
      ->check(CLI::Range(8, 32));
  bench->add_option("--kov-k", bp.kov_k, "k-OV tuple width");
  bench->add_option("--kov-n", bp.kov_n, "k-OV vectors per set");
  bench->add_option("--kov-d", bp.kov_d, "k-OV vector dimension");
  bench->add_option("--tsp-cities", bp.tsp_cities, "tour cities");
  bench->add_option("--tsp-restarts", bp.tsp_restarts, "solver restart budget");
  bench->add_option("--tsp-alpha", bp.tsp_alpha, "decision threshold factor");

  auto* report =
      app.add_subcommand("report", "re-render summary.txt from existing outputs");
  report->add_option("--out", out_dir, "directory holding probe_report.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    (void)app.exit(e);
    return puw::report::kExitConfigError;
  }

  puw::report::RunManifest m;
  m.scenario_path = scenario_path;
  m.out_dir = out_dir;
  m.threads = thread_cap();
  if (!mode_str.empty())
    m.mode_override =
        mode_str == "analytic" ? puw::sim::SimMode::Analytic : puw::sim::SimMode::Measured;

  try {
    if (simulate->parsed()) {
      if (sim_seed->count() > 0) m.seed_override = seed;
      return puw::report::cmd_simulate(m, std::cerr);
    }
    if (probe->parsed()) {
      if (probe_seed->count() > 0) m.seed_override = seed;
      m.probes = split_csv_list(probes_str);
      return puw::report::cmd_probe(m, std::cerr);
    }
    if (bench->parsed()) {
      bp.cls = *puw::class_from_name(class_str);
      bp.out_dir = out_dir;
      return puw::report::cmd_bench_task(bp, std::cerr);
    }
    if (report->parsed()) return puw::report::cmd_report(out_dir, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return puw::report::kExitFailure;
  }
  return puw::report::kExitConfigError;
}
