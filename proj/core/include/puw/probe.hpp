#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "puw/sim.hpp"
#include "puw/task_types.hpp"

namespace puw::probe {

enum class Verdict : std::uint8_t { Pass, Fail, ReportOnly };
const char* verdict_name(Verdict v);

// One measured statistic for one property. Every probe emits value together
// with sample size and a dispersion (stderr or test p-value) — never a bare
// number. Pass/Fail only where the probe declares a threshold.
struct ProbeReport {
  std::string property_id;
  std::string statistic;
  double value = 0;
  std::uint64_t n = 0;
  double dispersion = 0;
  Verdict verdict = Verdict::ReportOnly;
  std::string note;
};

std::string reports_to_csv(const std::vector<ProbeReport>& reports);
std::string reports_to_summary(const std::vector<ProbeReport>& reports);

// ---- trace-based probes -------------------------------------------------

// Interblock gaps of the canonical chain: mean, CV, KS vs exponential with
// the sample mean. CV/KS rows Pass iff CV in [0.9,1.1] and KS p > 0.01 for
// cryptopuzzle scenarios; ReportOnly otherwise. Requires >= 500 blocks.
std::vector<ProbeReport> probe_interblock(const sim::EventTrace& trace);

// orphans / appended; zero for a single well-connected miner.
std::vector<ProbeReport> probe_fork_rate(const sim::EventTrace& trace);

// Instants where two honest nodes' chains, truncated by depth T, diverge.
std::vector<ProbeReport> probe_common_prefix(const sim::EventTrace& trace, std::uint64_t T);

// Minimum honest fraction over sliding T-block windows of the main chain.
std::vector<ProbeReport> probe_chain_quality(const sim::EventTrace& trace, std::uint64_t T);

// Blocks per second overall and after the first retarget; the latter passes
// when within 10% of 1/target once a retarget happened.
std::vector<ProbeReport> probe_chain_growth(const sim::EventTrace& trace);

// Log-log slope of main-chain share vs power share. Pass iff slope in
// [0.9,1.1] for cryptopuzzle; ReportOnly for the other classes. Requires
// >= 3 distinct power levels and >= 2000 blocks.
std::vector<ProbeReport> probe_fairness(const sim::EventTrace& trace);

// ---- backend micro-probes ------------------------------------------------

struct MicroShape {
  int nonce_bits = 16;
  std::uint32_t kov_k = 2, kov_n = 64, kov_d = 64;
  std::uint32_t tsp_cities = 30;
  std::uint32_t tsp_restarts = 16;
  double tsp_alpha = 1.2;
};

// CV of solve op counts over freshly generated equal-difficulty tasks.
std::vector<ProbeReport> probe_variability(ClassId cls, const Difficulty& diff,
                                           std::uint64_t trials, std::uint64_t seed,
                                           const MicroShape& shape = {});

// cold ops / warm ops on a second task sharing overlap_fraction of structure.
// Cryptopuzzle: Pass iff ratio in [0.95, 1.05] (memoryless). k-OV: ReportOnly
// (memo cache demonstrates the speed-up).
std::vector<ProbeReport> probe_amortization(ClassId cls, double overlap_fraction,
                                            std::uint64_t trials, std::uint64_t seed,
                                            const MicroShape& shape = {});

// E[remaining | switch to fresh] - E[remaining | continue] at the given
// elapsed fraction, Monte Carlo. Pass for cryptopuzzle iff |penalty| <= 2
// stderr; ReportOnly for k-OV (penalty ~ elapsed_fraction of a full solve).
std::vector<ProbeReport> probe_switchability(ClassId cls, const Difficulty& diff,
                                             double elapsed_fraction, std::uint64_t trials,
                                             std::uint64_t seed, const MicroShape& shape = {});

// mean verify ops / mean solve ops; per verify mode for k-OV.
std::vector<ProbeReport> probe_verification_ratio(ClassId cls, const Difficulty& diff,
                                                  std::uint64_t trials, std::uint64_t seed,
                                                  const MicroShape& shape = {});

// Valid proofs plus seeded mutations; false-accept / false-reject rates per
// verify mode. Pass iff Full mode shows 0 and 0.
std::vector<ProbeReport> probe_soundness_completeness(ClassId cls, std::uint64_t trials,
                                                      std::uint64_t seed,
                                                      const MicroShape& shape = {});

// ---- coverage ------------------------------------------------------------

// Property-framework row -> probes covering it (or the documented reason it
// is out of scope). The coverage test asserts every row is present.
struct CoverageRow {
  std::string property_id;
  std::string title;
  std::vector<std::string> probes;  // empty iff excluded
  std::string exclusion_reason;     // non-empty iff excluded
};
const std::vector<CoverageRow>& coverage_manifest();

}  // namespace puw::probe
