#include "doctest.h"

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "puw/errors.hpp"
#include "puw/probe.hpp"
#include "puw/scenario.hpp"
#include "puw/sim.hpp"

using namespace puw;
using namespace puw::probe;

namespace {

const sim::EventTrace& single_miner_trace() {
  static const sim::EventTrace trace = [] {
    const sim::Scenario s = sim::scenario_parse(
        "task_class = cryptopuzzle\n"
        "mode = analytic\n"
        "seed = 19\n"
        "initial_difficulty = 1\n"
        "retarget_window = 100000\n"
        "target_interblock_s = 600\n"
        "duration_blocks = 600\n"
        "miner = 0 7158278.8266666667 honest_switch honest\n"
        "network = constant 0\n");
    return sim::run_scenario(s);
  }();
  return trace;
}

const ProbeReport& find_row(const std::vector<ProbeReport>& rows, const std::string& stat) {
  for (const auto& r : rows)
    if (r.statistic == stat) return r;
  REQUIRE_MESSAGE(false, "missing statistic row: " << stat);
  static ProbeReport dummy;
  return dummy;
}

MicroShape small_kov_shape() {
  MicroShape s;
  s.nonce_bits = 12;
  s.kov_n = 16;
  s.kov_d = 32;
  return s;
}

}  // namespace

TEST_CASE("coverage manifest names every property exactly once") {
  const auto& rows = coverage_manifest();
  CHECK(rows.size() == 30);
  std::set<std::string> ids;
  for (const auto& r : rows) {
    CHECK(ids.insert(r.property_id).second);
    CHECK_FALSE(r.title.empty());
    // a row is either covered by probes or carries an exclusion reason
    CHECK(r.probes.empty() == !r.exclusion_reason.empty());
  }
  // nothing in this build is excluded
  for (const auto& r : rows) CHECK(r.exclusion_reason.empty());

  for (const char* id :
       {"bpp.rate", "bpp.variability", "bpp.adjustable_lower", "bpp.adjustable_upper",
        "bpp.switchability", "bpp.verification_soundness", "bpp.verification_completeness",
        "bpp.verification_efficiency", "bpp.timeliness", "bpp.fairness", "btp.hardness",
        "btp.context_sensitivity", "btp.non_amortizability", "btp.variability",
        "btp.adjustable_lower", "btp.adjustable_upper", "btp.switch_solvability",
        "btp.switch_generation_time", "btp.switch_solution_time", "btp.verification_soundness",
        "btp.verification_completeness", "btp.verification_efficiency",
        "btp.generation_efficiency", "btp.solvability", "btp.tractability",
        "btp.fairness_superlinearity", "backbone.common_prefix", "backbone.chain_quality",
        "backbone.chain_growth", "backbone.future_self_consistency"})
    CHECK(ids.count(id) == 1);
}

TEST_CASE("report serialization uses the fixed six-column schema") {
  ProbeReport r;
  r.property_id = "bpp.rate";
  r.statistic = "interblock_mean_s";
  r.value = 600.25;
  r.n = 42;
  r.dispersion = 1.5;
  r.verdict = Verdict::ReportOnly;
  r.note = "context";
  const std::string csv = reports_to_csv({r});
  CHECK(csv.rfind("property_id,statistic,value,n,dispersion,verdict\n", 0) == 0);
  CHECK(csv.find("bpp.rate,interblock_mean_s,600.25,42,1.5,ReportOnly\n") != std::string::npos);

  const std::string summary = reports_to_summary({r});
  CHECK(summary.find("interblock_mean_s") != std::string::npos);
  CHECK(summary.find("context") != std::string::npos);  // notes appear in the summary
}

TEST_CASE("interblock probe on a calibrated single-miner chain") {
  const auto rows = probe_interblock(single_miner_trace());
  const auto& mean = find_row(rows, "interblock_mean_s");
  CHECK(mean.value == doctest::Approx(600.0).epsilon(0.15));
  CHECK(mean.n == 600);

  const auto& cv = find_row(rows, "interblock_cv");
  CHECK(cv.value == doctest::Approx(1.0).epsilon(0.12));
  CHECK(cv.verdict == Verdict::Pass);  // cryptopuzzle trace inside [0.9, 1.1]

  const auto& ks = find_row(rows, "interblock_ks_stat");
  CHECK(ks.dispersion > 0.01);  // p-value: consistent with exponential gaps
  CHECK(ks.verdict == Verdict::Pass);
}

TEST_CASE("interblock probe refuses short traces") {
  const sim::Scenario s = sim::scenario_parse(
      "task_class = cryptopuzzle\nmode = analytic\nseed = 1\nduration_blocks = 50\n"
      "miner = 0 7158278.8266666667 honest_switch honest\nnetwork = constant 0\n");
  CHECK_THROWS_AS((void)probe_interblock(sim::run_scenario(s)), InsufficientData);
}

TEST_CASE("fork, prefix, and quality probes are clean for one well-connected miner") {
  const auto& trace = single_miner_trace();

  const auto fork = probe_fork_rate(trace);
  CHECK(find_row(fork, "fork_rate").value == (0.0));

  const auto prefix = probe_common_prefix(trace, 6);
  CHECK(find_row(prefix, "common_prefix_violations").value == (0.0));
  CHECK(find_row(prefix, "self_divergence_violations").value == (0.0));

  const auto quality = probe_chain_quality(trace, 100);
  CHECK(find_row(quality, "honest_fraction").value == (1.0));
  CHECK(find_row(quality, "min_window_honest_fraction").value == (1.0));

  const auto growth = probe_chain_growth(trace);
  CHECK(find_row(growth, "growth_blocks_per_s").value ==
        doctest::Approx(1.0 / 600.0).epsilon(0.15));
}

TEST_CASE("fairness probe needs scale and power diversity") {
  CHECK_THROWS_AS((void)probe_fairness(single_miner_trace()), InsufficientData);
}

TEST_CASE("variability probe reports zero spread for exhaustive enumeration") {
  const auto rows = probe_variability(ClassId::Kov, Difficulty(1, 1), 120, 5, small_kov_shape());
  const auto& mean = find_row(rows, "solve_ops_mean");
  CHECK(mean.value == (16.0 * 16.0 * 32.0));  // n^2 tuples, d ops each
  const auto& cv = find_row(rows, "solve_ops_cv");
  CHECK(cv.value == (0.0));
  CHECK(cv.note.find("low_variability") != std::string::npos);
}

TEST_CASE("variability probe sees the geometric spread of hash racing") {
  MicroShape shape;
  shape.nonce_bits = 10;
  const auto rows =
      probe_variability(ClassId::Cryptopuzzle, Difficulty(1, 1), 400, 5, shape);
  const auto& cv = find_row(rows, "solve_ops_cv");
  CHECK(cv.value == doctest::Approx(1.0).epsilon(0.25));  // near-exponential ops
}

TEST_CASE("amortization probe: hash racing carries nothing between tasks") {
  MicroShape shape;
  shape.nonce_bits = 10;
  const auto rows = probe_amortization(ClassId::Cryptopuzzle, 0.5, 2000, 11, shape);
  const auto& ratio = find_row(rows, "cold_warm_ratio");
  CHECK(ratio.n == 2000);
  CHECK(ratio.value == doctest::Approx(1.0).epsilon(0.15));
  CHECK(ratio.dispersion > 0);
}

TEST_CASE("amortization probe: the memo cache exposes structural reuse") {
  const auto rows = probe_amortization(ClassId::Kov, 0.5, 40, 11, small_kov_shape());
  const auto& ratio = find_row(rows, "cold_warm_ratio");
  CHECK(ratio.verdict == Verdict::ReportOnly);
  CHECK(ratio.value > 1.05);  // warm solves are measurably cheaper
}

TEST_CASE("amortization and switchability validate their fractions and classes") {
  CHECK_THROWS_AS((void)probe_amortization(ClassId::Cryptopuzzle, 1.5, 100, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)probe_amortization(ClassId::Tsp, 0.5, 100, 1), UnknownClass);
  CHECK_THROWS_AS((void)probe_switchability(ClassId::Cryptopuzzle, Difficulty(1, 1), 1.0, 100, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)probe_switchability(ClassId::Tsp, Difficulty(1, 1), 0.5, 100, 1),
                  UnknownClass);
}

TEST_CASE("switchability probe: abandoning a partial enumeration forfeits its work") {
  const auto rows =
      probe_switchability(ClassId::Kov, Difficulty(1, 1), 0.9, 60, 13, small_kov_shape());
  const auto& penalty = find_row(rows, "switch_penalty_fraction");
  CHECK(penalty.verdict == Verdict::ReportOnly);
  // deterministic enumeration: switching at 90% elapsed costs ~0.9 of a solve
  CHECK(penalty.value == doctest::Approx(0.9).epsilon(0.06));
}

TEST_CASE("verification ratio probe shows verification is much cheaper than solving") {
  MicroShape shape;
  shape.nonce_bits = 12;
  const auto crypto =
      probe_verification_ratio(ClassId::Cryptopuzzle, Difficulty(1, 1), 40, 3, shape);
  CHECK(find_row(crypto, "verify_over_solve_ops").value < 0.01);

  const auto kv =
      probe_verification_ratio(ClassId::Kov, Difficulty(1, 1), 25, 3, small_kov_shape());
  const auto& full = find_row(kv, "verify_full_over_solve_ops");
  const auto& spot = find_row(kv, "verify_spotcheck_over_solve_ops");
  CHECK(full.value > 0);
  CHECK(spot.value > 0);
  CHECK(spot.value < full.value);  // sampling beats re-enumeration

  CHECK_THROWS_AS(
      (void)probe_verification_ratio(ClassId::Kov, Difficulty(1, 1), 5, 3, small_kov_shape()),
      InsufficientData);
}

TEST_CASE("soundness and completeness are exact for full verification") {
  for (const ClassId cls : {ClassId::Cryptopuzzle, ClassId::Kov, ClassId::Tsp}) {
    MicroShape shape = small_kov_shape();
    shape.tsp_cities = 12;
    const auto rows = probe_soundness_completeness(cls, 100, 29, shape);
    const auto& fa = find_row(rows, "full_false_accept_rate");
    CHECK(fa.value == (0.0));
    CHECK(fa.verdict == Verdict::Pass);
    const auto& fr = find_row(rows, "full_false_reject_rate");
    CHECK(fr.value == (0.0));
    CHECK(fr.verdict == Verdict::Pass);

    if (cls == ClassId::Kov) {
      // sampling 10% of a 100-tuple claim with one planted bad tuple misses
      // it with probability ~0.9
      const auto& miss = find_row(rows, "spotcheck_miss_rate_1bad_in_100");
      CHECK(miss.verdict == Verdict::ReportOnly);
      CHECK(miss.value == doctest::Approx(0.9).epsilon(0.12));
    }
  }
}
