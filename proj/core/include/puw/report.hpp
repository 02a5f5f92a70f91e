#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "puw/scenario.hpp"
#include "puw/task_types.hpp"

namespace puw::report {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kTraceFile = "trace.csv";
inline constexpr const char* kMetaFile = "run_meta.txt";
inline constexpr const char* kProbeFile = "probe_report.csv";
inline constexpr const char* kSummaryFile = "summary.txt";

// Exit codes shared by the CLI and the command helpers.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitSupplyStall = 3;
inline constexpr int kExitMissingTrace = 4;

struct RunManifest {
  std::string scenario_path;
  std::vector<std::string> probes;  // empty = all applicable
  std::string out_dir;
  std::optional<std::uint64_t> seed_override;
  std::optional<sim::SimMode> mode_override;
  unsigned threads = 1;  // PUWBENCH_THREADS caps the probe worker pool
};

// Runs the scenario, writes trace.csv and run_meta.txt into out_dir.
int cmd_simulate(const RunManifest& m, std::ostream& diag);

// Runs the requested probes (trace-based ones read out_dir/trace.csv; exit 4
// when missing), writes probe_report.csv and summary.txt.
int cmd_probe(const RunManifest& m, std::ostream& diag);

struct BenchParams {
  ClassId cls = ClassId::Cryptopuzzle;
  std::uint64_t trials = 100;
  std::uint64_t seed = 1;
  std::string out_dir;
  int nonce_bits = 16;
  std::uint32_t kov_k = 2, kov_n = 64, kov_d = 64;
  std::uint32_t tsp_cities = 50, tsp_restarts = 8;
  double tsp_alpha = 1.2;
};

// Wall-clock and op-count quantiles for generate/solve/verify; writes
// bench_<class>.csv into out_dir.
int cmd_bench_task(const BenchParams& p, std::ostream& diag);

// Renders summary.txt from existing trace.csv / probe_report.csv in out_dir.
int cmd_report(const std::string& out_dir, std::ostream& diag);

// Known probe names, in report order.
const std::vector<std::string>& probe_names();

std::string read_file(const std::string& path);         // throws Error
void write_file(const std::string& path, const std::string& content);

}  // namespace puw::report
