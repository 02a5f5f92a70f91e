#include "puw/report.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <ostream>
#include <sstream>

#include "puw/cryptopuzzle.hpp"
#include "puw/errors.hpp"
#include "puw/kov.hpp"
#include "puw/probe.hpp"
#include "puw/rng.hpp"
#include "puw/sim.hpp"
#include "puw/stats.hpp"
#include "puw/tsp.hpp"

namespace puw::report {

namespace fs = std::filesystem;

namespace {

// truncation depth for the common-prefix replay and the chain-quality window
constexpr std::uint64_t kCommonPrefixDepth = 6;
constexpr std::uint64_t kQualityWindow = 100;

// micro-probe workloads are property checks, not scenario replications, so
// they run at a reduced, fixed-cost shape regardless of scenario difficulty
constexpr int kMicroNonceBits = 12;
constexpr std::uint64_t kMicroTrials = 200;
// The two ratio-of-means probes compare noisy op counts (CV ~ 1), so their
// stderr must be driven well under the +/-5% pass bands: sqrt(2/n) <= 0.032
// needs n ~ 2000.
constexpr std::uint64_t kMicroRatioTrials = 2000;

std::string join_path(const std::string& dir, const std::string& name) {
  return dir.empty() ? name : (fs::path(dir) / name).string();
}

const char* mode_name(sim::SimMode m) {
  return m == sim::SimMode::Analytic ? "analytic" : "measured";
}

std::string render_meta(const RunManifest& m, const sim::Scenario& sc) {
  std::ostringstream o;
  o << "key,value\n";
  o << "tool,puwbench\n";
  o << "version," << kVersion << "\n";
  o << "seed," << sc.seed << "\n";
  o << "mode," << mode_name(sc.mode) << "\n";
  o << "scenario_path," << m.scenario_path << "\n";
  std::istringstream lines(sim::scenario_serialize(sc));
  std::string line;
  while (std::getline(lines, line)) {
    const auto pos = line.find(" = ");
    if (pos == std::string::npos) continue;
    o << "scenario." << line.substr(0, pos) << "," << line.substr(pos + 3) << "\n";
  }
  return o.str();
}

// Rebuild the scenario embedded in run_meta.txt (written by cmd_simulate).
sim::Scenario scenario_from_meta(const std::string& meta_text) {
  std::ostringstream scenario_text;
  std::istringstream lines(meta_text);
  std::string line;
  bool any = false;
  while (std::getline(lines, line)) {
    if (line.rfind("scenario.", 0) != 0) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) continue;
    scenario_text << line.substr(9, comma - 9) << " = " << line.substr(comma + 1) << "\n";
    any = true;
  }
  if (!any) throw Error("run_meta.txt carries no embedded scenario");
  return sim::scenario_parse(scenario_text.str());
}

sim::Scenario load_probe_scenario(const RunManifest& m) {
  if (!m.scenario_path.empty()) return sim::scenario_parse(read_file(m.scenario_path));
  return scenario_from_meta(read_file(join_path(m.out_dir, kMetaFile)));
}

probe::ProbeReport placeholder_row(const std::string& probe_name, const std::string& statistic,
                                   const std::string& note) {
  probe::ProbeReport r;
  r.property_id = "probe." + probe_name;
  r.statistic = statistic;
  r.verdict = probe::Verdict::ReportOnly;
  r.note = note;
  return r;
}

struct QuantileRow {
  double p50 = 0, p90 = 0, p99 = 0, mean = 0;
  std::uint64_t n = 0;
};

QuantileRow quantiles_of(const std::vector<double>& xs) {
  QuantileRow q;
  if (xs.empty()) return q;
  q.p50 = stats::quantile(xs, 0.50);
  q.p90 = stats::quantile(xs, 0.90);
  q.p99 = stats::quantile(xs, 0.99);
  q.mean = stats::mean(xs);
  q.n = xs.size();
  return q;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  const fs::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write file: " + path);
  out << content;
  out.flush();
  if (!out) throw Error("write failed: " + path);
}

const std::vector<std::string>& probe_names() {
  static const std::vector<std::string> names = {
      "interblock",   "fork_rate",    "common_prefix", "chain_quality",
      "chain_growth", "fairness",     "variability",   "amortization",
      "switchability", "verification_ratio", "soundness"};
  return names;
}

int cmd_simulate(const RunManifest& m, std::ostream& diag) {
  sim::Scenario sc;
  try {
    sc = sim::scenario_parse(read_file(m.scenario_path));
  } catch (const std::exception& e) {
    diag << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }
  if (m.seed_override) sc.seed = *m.seed_override;
  if (m.mode_override) sc.mode = *m.mode_override;
  if (sc.mode == sim::SimMode::Analytic && sc.task_class != ClassId::Cryptopuzzle) {
    diag << "config error: analytic mode supports only the cryptopuzzle class\n";
    return kExitConfigError;
  }

  sim::EventTrace trace;
  try {
    trace = sim::run_scenario(sc);
  } catch (const std::exception& e) {
    diag << "simulation failed: " << e.what() << "\n";
    return kExitFailure;
  }

  try {
    write_file(join_path(m.out_dir, kTraceFile), trace.to_csv());
    write_file(join_path(m.out_dir, kMetaFile), render_meta(m, sc));
  } catch (const Error& e) {
    diag << "output error: " << e.what() << "\n";
    return kExitFailure;
  }

  diag << "simulated " << trace.appended_height() << " canonical blocks ("
       << trace.proposed_count() << " proposed) [" << mode_name(sc.mode) << ", "
       << class_name(sc.task_class) << "]\n";
  if (trace.stalled) {
    diag << "halted: task supply stalled before the configured duration\n";
    return kExitSupplyStall;
  }
  return kExitOk;
}

int cmd_probe(const RunManifest& m, std::ostream& diag) {
  sim::Scenario sc;
  try {
    sc = load_probe_scenario(m);
  } catch (const std::exception& e) {
    diag << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }
  if (m.seed_override) sc.seed = *m.seed_override;

  // keep registry order regardless of the order names were requested in
  std::vector<std::string> selected;
  if (m.probes.empty()) {
    selected = probe_names();
  } else {
    for (const auto& want : m.probes) {
      if (std::find(probe_names().begin(), probe_names().end(), want) == probe_names().end()) {
        diag << "config error: unknown probe '" << want << "'\n";
        return kExitConfigError;
      }
    }
    for (const auto& name : probe_names())
      if (std::find(m.probes.begin(), m.probes.end(), name) != m.probes.end())
        selected.push_back(name);
  }

  const auto is_trace_probe = [](const std::string& name) {
    return name == "interblock" || name == "fork_rate" || name == "common_prefix" ||
           name == "chain_quality" || name == "chain_growth" || name == "fairness";
  };
  const bool wants_trace =
      std::any_of(selected.begin(), selected.end(), is_trace_probe);

  sim::EventTrace trace;
  if (wants_trace) {
    const std::string trace_path = join_path(m.out_dir, kTraceFile);
    if (!fs::exists(trace_path)) {
      diag << "missing trace input: " << trace_path << " (run `puwbench simulate` first)\n";
      return kExitMissingTrace;
    }
    try {
      trace = sim::EventTrace::from_csv(read_file(trace_path), sc);
    } catch (const std::exception& e) {
      diag << "trace error: " << e.what() << "\n";
      return kExitFailure;
    }
  }

  probe::MicroShape shape;
  shape.nonce_bits = kMicroNonceBits;
  shape.kov_k = sc.supply.kov_k;
  shape.kov_n = std::min<std::uint32_t>(sc.supply.kov_n, 64);
  shape.kov_d = std::min<std::uint32_t>(sc.supply.kov_d, 512);
  shape.tsp_cities = std::clamp<std::uint32_t>(sc.supply.tsp_cities, 8, 40);
  shape.tsp_alpha = sc.tsp_alpha;
  shape.tsp_restarts = std::min<std::uint32_t>(sc.tsp_restart_budget, 16);
  const Difficulty micro_diff(1, 1);
  const ClassId cls = sc.task_class;
  const std::uint64_t seed = sc.seed;

  using Result = std::vector<probe::ProbeReport>;
  struct Job {
    std::string name;
    std::function<Result()> fn;
  };
  std::vector<Job> jobs;
  for (const auto& name : selected) {
    std::function<Result()> fn;
    if (name == "interblock") {
      fn = [&trace] { return probe::probe_interblock(trace); };
    } else if (name == "fork_rate") {
      fn = [&trace] { return probe::probe_fork_rate(trace); };
    } else if (name == "common_prefix") {
      fn = [&trace] { return probe::probe_common_prefix(trace, kCommonPrefixDepth); };
    } else if (name == "chain_quality") {
      fn = [&trace] { return probe::probe_chain_quality(trace, kQualityWindow); };
    } else if (name == "chain_growth") {
      fn = [&trace] { return probe::probe_chain_growth(trace); };
    } else if (name == "fairness") {
      fn = [&trace] { return probe::probe_fairness(trace); };
    } else if (name == "variability") {
      fn = [cls, micro_diff, seed, shape] {
        return probe::probe_variability(cls, micro_diff, kMicroTrials, seed, shape);
      };
    } else if (name == "amortization") {
      if (cls == ClassId::Tsp) {
        fn = [name] {
          return Result{placeholder_row(name, "not_applicable",
                                        "probe does not cover task class tsp")};
        };
      } else {
        fn = [cls, seed, shape] {
          return probe::probe_amortization(cls, 0.5, kMicroRatioTrials, seed, shape);
        };
      }
    } else if (name == "switchability") {
      if (cls == ClassId::Tsp) {
        fn = [name] {
          return Result{placeholder_row(name, "not_applicable",
                                        "probe does not cover task class tsp")};
        };
      } else {
        fn = [cls, micro_diff, seed, shape] {
          return probe::probe_switchability(cls, micro_diff, 0.5, kMicroRatioTrials, seed, shape);
        };
      }
    } else if (name == "verification_ratio") {
      fn = [cls, micro_diff, seed, shape] {
        return probe::probe_verification_ratio(cls, micro_diff, 100, seed, shape);
      };
    } else {  // soundness
      fn = [cls, seed, shape] {
        return probe::probe_soundness_completeness(cls, kMicroTrials, seed, shape);
      };
    }
    // insufficient data is a reportable outcome of a probe, not a run failure
    jobs.push_back(Job{name, [name, fn] {
                         try {
                           return fn();
                         } catch (const InsufficientData& e) {
                           return Result{placeholder_row(name, "insufficient_data", e.what())};
                         }
                       }});
  }

  const unsigned threads = std::max(1u, m.threads);
  std::vector<Result> results(jobs.size());
  try {
    for (std::size_t base = 0; base < jobs.size(); base += threads) {
      const std::size_t end = std::min(jobs.size(), base + threads);
      std::vector<std::future<Result>> futs;
      futs.reserve(end - base);
      for (std::size_t i = base; i < end; ++i)
        futs.push_back(std::async(std::launch::async, jobs[i].fn));
      for (std::size_t i = base; i < end; ++i) results[i] = futs[i - base].get();
    }
  } catch (const std::exception& e) {
    diag << "probe failed: " << e.what() << "\n";
    return kExitFailure;
  }

  std::vector<probe::ProbeReport> reports;
  for (auto& r : results)
    for (auto& row : r) reports.push_back(std::move(row));

  std::ostringstream summary;
  summary << "puwbench " << kVersion << " probe summary\n";
  summary << "task_class=" << class_name(cls) << " mode=" << mode_name(sc.mode)
          << " seed=" << sc.seed << "\nprobes=";
  for (std::size_t i = 0; i < selected.size(); ++i)
    summary << (i ? "," : "") << selected[i];
  summary << "\n\n" << probe::reports_to_summary(reports);

  try {
    write_file(join_path(m.out_dir, kProbeFile), probe::reports_to_csv(reports));
    write_file(join_path(m.out_dir, kSummaryFile), summary.str());
  } catch (const Error& e) {
    diag << "output error: " << e.what() << "\n";
    return kExitFailure;
  }
  diag << summary.str();
  return kExitOk;
}

int cmd_bench_task(const BenchParams& p, std::ostream& diag) {
  if (p.trials < 10) {
    diag << "config error: bench-task needs at least 10 trials\n";
    return kExitConfigError;
  }
  Rng rng(seed_combine(p.seed, tag_from_name("bench.task")));
  std::vector<double> gen_ns, gen_ops, solve_ns, solve_ops, verify_ns, verify_ops;
  using clock = std::chrono::steady_clock;
  const auto elapsed_ns = [](clock::time_point a, clock::time_point b) {
    return static_cast<double>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(b - a).count());
  };
  const auto random_digest = [&rng] {
    Digest d{};
    for (int i = 0; i < 4; ++i) put_u64_be(d.data() + 8 * i, rng.next_u64());
    return d;
  };

  std::uint64_t solved = 0;
  for (std::uint64_t t = 0; t < p.trials; ++t) {
    switch (p.cls) {
      case ClassId::Cryptopuzzle: {
        const Digest dig = random_digest();
        auto t0 = clock::now();
        puzzle::PuzzleTask task = puzzle::puzzle_generate(dig, Difficulty(1, 1), p.nonce_bits);
        auto t1 = clock::now();
        gen_ns.push_back(elapsed_ns(t0, t1));
        gen_ops.push_back(0);

        // full solve latency: scan, regenerate on exhaustion, repeat
        std::uint64_t ops = 0;
        std::vector<std::uint8_t> payload;
        t0 = clock::now();
        for (int attempt = 0; attempt < 100000; ++attempt) {
          const SolveOutcome out = puzzle::puzzle_solve(task, 0);
          ops += out.elapsed_ops;
          if (out.solved()) {
            payload = out.poc->solution_payload;
            break;
          }
          task = puzzle::puzzle_generate(random_digest(), Difficulty(1, 1), p.nonce_bits);
        }
        t1 = clock::now();
        if (payload.empty()) {
          diag << "bench failed: cryptopuzzle solve did not converge\n";
          return kExitFailure;
        }
        solve_ns.push_back(elapsed_ns(t0, t1));
        solve_ops.push_back(static_cast<double>(ops));
        ++solved;

        std::uint64_t vo = 0;
        t0 = clock::now();
        const bool ok = puzzle::puzzle_verify(task, payload, &vo);
        t1 = clock::now();
        if (!ok) {
          diag << "bench failed: fresh proof rejected\n";
          return kExitFailure;
        }
        verify_ns.push_back(elapsed_ns(t0, t1));
        verify_ops.push_back(static_cast<double>(vo));
        break;
      }
      case ClassId::Kov: {
        auto t0 = clock::now();
        const kov::KovInstance inst = kov::kov_random_instance(p.kov_k, p.kov_n, p.kov_d, rng);
        auto t1 = clock::now();
        gen_ns.push_back(elapsed_ns(t0, t1));
        gen_ops.push_back(0);

        std::uint64_t so = 0;
        t0 = clock::now();
        const kov::KovProof proof = kov::kov_solve(inst, 0, &so);
        t1 = clock::now();
        solve_ns.push_back(elapsed_ns(t0, t1));
        solve_ops.push_back(static_cast<double>(so));
        ++solved;

        std::uint64_t vo = 0;
        t0 = clock::now();
        const bool ok = kov::kov_verify(inst, proof, VerifyMode::full(), &vo);
        t1 = clock::now();
        if (!ok) {
          diag << "bench failed: fresh proof rejected\n";
          return kExitFailure;
        }
        verify_ns.push_back(elapsed_ns(t0, t1));
        verify_ops.push_back(static_cast<double>(vo));
        break;
      }
      case ClassId::Tsp: {
        auto t0 = clock::now();
        tsp::TspTask task;
        task.instance = tsp::tsp_random_instance(p.tsp_cities, 1000.0, rng);
        task.t_d = tsp::tsp_derive_threshold(task.instance, p.tsp_alpha, rng.next_u64());
        auto t1 = clock::now();
        gen_ns.push_back(elapsed_ns(t0, t1));
        gen_ops.push_back(0);

        t0 = clock::now();
        const SolveOutcome out = tsp::tsp_solve(task, rng.next_u64(), p.tsp_restarts);
        t1 = clock::now();
        solve_ns.push_back(elapsed_ns(t0, t1));
        solve_ops.push_back(static_cast<double>(out.elapsed_ops));
        if (!out.solved()) break;  // exhausted tasks have nothing to verify
        ++solved;

        std::uint64_t vo = 0;
        t0 = clock::now();
        const bool ok = tsp::tsp_verify(task, out.poc->solution_payload, &vo);
        t1 = clock::now();
        if (!ok) {
          diag << "bench failed: fresh tour rejected\n";
          return kExitFailure;
        }
        verify_ns.push_back(elapsed_ns(t0, t1));
        verify_ops.push_back(static_cast<double>(vo));
        break;
      }
    }
  }

  std::ostringstream csv;
  csv << "phase,metric,p50,p90,p99,mean,n\n";
  const auto emit = [&csv](const char* phase, const char* metric,
                           const std::vector<double>& xs) {
    const QuantileRow q = quantiles_of(xs);
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s,%s,%.6g,%.6g,%.6g,%.6g,%llu\n", phase, metric, q.p50,
                  q.p90, q.p99, q.mean, static_cast<unsigned long long>(q.n));
    csv << buf;
  };
  emit("generate", "wall_ns", gen_ns);
  emit("generate", "ops", gen_ops);
  emit("solve", "wall_ns", solve_ns);
  emit("solve", "ops", solve_ops);
  emit("verify", "wall_ns", verify_ns);
  emit("verify", "ops", verify_ops);

  const std::string file =
      join_path(p.out_dir, std::string("bench_") + class_name(p.cls) + ".csv");
  try {
    write_file(file, csv.str());
  } catch (const Error& e) {
    diag << "output error: " << e.what() << "\n";
    return kExitFailure;
  }
  diag << "bench-task class=" << class_name(p.cls) << " trials=" << p.trials
       << " solved=" << solved << "\n"
       << csv.str();
  return kExitOk;
}

int cmd_report(const std::string& out_dir, std::ostream& diag) {
  const std::string probe_path = join_path(out_dir, kProbeFile);
  if (!fs::exists(probe_path)) {
    diag << "missing probe report: " << probe_path << " (run `puwbench probe` first)\n";
    return kExitMissingTrace;
  }

  std::vector<probe::ProbeReport> reports;
  try {
    const std::string text = read_file(probe_path);
    std::istringstream lines(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(lines, line)) {
      ++lineno;
      if (line.empty()) continue;
      if (lineno == 1) {
        if (line != "property_id,statistic,value,n,dispersion,verdict")
          throw ParseError(1, "unexpected probe report header");
        continue;
      }
      std::array<std::string, 6> cols;
      std::size_t start = 0;
      for (int c = 0; c < 6; ++c) {
        const std::size_t comma = line.find(',', start);
        if (c < 5 && comma == std::string::npos)
          throw ParseError(lineno, "expected 6 columns");
        cols[static_cast<std::size_t>(c)] =
            c < 5 ? line.substr(start, comma - start) : line.substr(start);
        start = comma + 1;
      }
      probe::ProbeReport r;
      r.property_id = cols[0];
      r.statistic = cols[1];
      r.value = std::stod(cols[2]);
      r.n = std::stoull(cols[3]);
      r.dispersion = std::stod(cols[4]);
      if (cols[5] == "Pass")
        r.verdict = probe::Verdict::Pass;
      else if (cols[5] == "Fail")
        r.verdict = probe::Verdict::Fail;
      else if (cols[5] == "ReportOnly")
        r.verdict = probe::Verdict::ReportOnly;
      else
        throw ParseError(lineno, "unknown verdict '" + cols[5] + "'");
      reports.push_back(std::move(r));
    }
  } catch (const std::exception& e) {
    diag << "report error: " << e.what() << "\n";
    return kExitFailure;
  }

  std::ostringstream s;
  s << "puwbench " << kVersion << " report\n";

  // chain overview when both the trace and its embedded scenario are present
  const std::string trace_path = join_path(out_dir, kTraceFile);
  const std::string meta_path = join_path(out_dir, kMetaFile);
  if (fs::exists(trace_path) && fs::exists(meta_path)) {
    try {
      const sim::Scenario sc = scenario_from_meta(read_file(meta_path));
      const sim::EventTrace trace = sim::EventTrace::from_csv(read_file(trace_path), sc);
      s << "task_class=" << class_name(sc.task_class) << " mode=" << mode_name(sc.mode)
        << " seed=" << sc.seed << "\n";
      s << "chain: " << trace.appended_height() << " canonical blocks from "
        << trace.proposed_count() << " proposals; " << trace.events.size() << " events"
        << (trace.stalled ? "; halted on supply stall" : "") << "\n";
      const auto tally = sim::reward_tally(trace);
      s << "blocks per miner:";
      for (const auto& [id, count] : tally) s << " " << id << ":" << count;
      s << "\n";
    } catch (const std::exception& e) {
      s << "chain overview unavailable: " << e.what() << "\n";
    }
  }

  s << "\n" << probe::reports_to_summary(reports);
  try {
    write_file(join_path(out_dir, kSummaryFile), s.str());
  } catch (const Error& e) {
    diag << "output error: " << e.what() << "\n";
    return kExitFailure;
  }
  diag << s.str();
  return kExitOk;
}

}  // namespace puw::report
