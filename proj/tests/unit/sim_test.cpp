#include "doctest.h"

#include <algorithm>
#include <string>
#include <vector>

#include "puw/rational.hpp"
#include "puw/scenario.hpp"
#include "puw/sim.hpp"

using namespace puw;
using namespace puw::sim;

namespace {

Scenario analytic_single(std::uint64_t blocks) {
  return scenario_parse(
      "task_class = cryptopuzzle\n"
      "mode = analytic\n"
      "seed = 11\n"
      "initial_difficulty = 1\n"
      "retarget_window = 100000\n"
      "target_interblock_s = 600\n"
      "duration_blocks = " + std::to_string(blocks) + "\n"
      "nonce_bits = 32\n"
      "miner = 0 7158278.8266666667 honest_switch honest\n"
      "network = constant 0\n");
}

std::uint64_t count_kind(const EventTrace& t, EventKind k) {
  std::uint64_t c = 0;
  for (const auto& e : t.events) c += (e.kind == k) ? 1 : 0;
  return c;
}

}  // namespace

TEST_CASE("genesis id is sixty-four zero hex characters") {
  CHECK(kGenesisId.size() == 64);
  CHECK(kGenesisId.find_first_not_of('0') == std::string::npos);
}

TEST_CASE("chain state attaches, buffers out-of-order blocks, and reorgs") {
  ChainState cs;
  CHECK(cs.head() == kGenesisId);
  CHECK(cs.head_height() == 0);

  // linear growth
  CHECK(cs.apply_block("a1", kGenesisId) == std::vector<std::string>{"a1"});
  CHECK(cs.head() == "a1");
  CHECK(cs.head_height() == 1);

  // child arrives before its parent: buffered, then attached with the parent
  CHECK(cs.apply_block("a3", "a2").empty());
  CHECK(cs.head() == "a1");
  CHECK_FALSE(cs.contains("a3"));
  const auto attached = cs.apply_block("a2", "a1");
  CHECK(attached == std::vector<std::string>{"a2", "a3"});
  CHECK(cs.head() == "a3");
  CHECK(cs.head_height() == 3);

  // equal-length competitor does not displace the first-received head
  cs.apply_block("b2", "a1");
  cs.apply_block("b3", "b2");
  CHECK(cs.head() == "a3");
  CHECK(cs.on_main_chain("a2"));
  CHECK_FALSE(cs.on_main_chain("b2"));

  // longer branch wins: reorg onto the b side
  cs.apply_block("b4", "b3");
  CHECK(cs.head() == "b4");
  CHECK(cs.head_height() == 4);
  CHECK(cs.on_main_chain("b2"));
  CHECK_FALSE(cs.on_main_chain("a2"));

  const auto p = cs.path("b4");
  CHECK(p == std::vector<std::string>{kGenesisId, "a1", "b2", "b3", "b4"});
  CHECK(cs.height_of("b2") == 2);

  // replaying a known block is a no-op
  CHECK(cs.apply_block("a1", kGenesisId).empty());
  CHECK(cs.head() == "b4");
}

TEST_CASE("retarget scales by expected over actual with exact rationals") {
  const Difficulty one(1, 1);
  const Difficulty two(2, 1);

  // blocks came twice as fast as targeted -> difficulty doubles
  auto d = retarget_difficulty({0, 300, 600}, two, 600);
  CHECK(d.value.num == 4);
  CHECK(d.value.den == 1);

  // twice as slow -> halves
  d = retarget_difficulty({0, 1200, 2400}, two, 600);
  CHECK(d.value.num == 1);
  CHECK(d.value.den == 1);

  // non-trivial exact ratio: 2 * 600 / 930 = 40/31
  d = retarget_difficulty({0, 500, 930}, one, 600);
  CHECK(d.value.num == 40);
  CHECK(d.value.den == 31);

  // upward clamp at 4x
  d = retarget_difficulty({0, 1, 2}, Difficulty(3, 1), 600);
  CHECK(d.value.num == 12);
  CHECK(d.value.den == 1);

  // downward clamp at 1/4
  d = retarget_difficulty({0, 60000, 120000}, Difficulty(8, 1), 600);
  CHECK(d.value.num == 2);
  CHECK(d.value.den == 1);

  // never drops below one
  d = retarget_difficulty({0, 1200, 2400}, one, 600);
  CHECK(d.value.num == 1);
  CHECK(d.value.den == 1);

  // zero elapsed time is treated as one second, then clamped
  d = retarget_difficulty({5, 5, 5}, one, 600);
  CHECK(d.value.num == 4);
  CHECK(d.value.den == 1);

  CHECK_THROWS(retarget_difficulty({42}, one, 600));
}

TEST_CASE("a block-count duration produces exactly that many appends") {
  const EventTrace trace = run_scenario(analytic_single(100));
  CHECK_FALSE(trace.stalled);
  CHECK(count_kind(trace, EventKind::BlockAppended) == 100);
  CHECK(trace.proposed_count() == 100);  // single miner, zero delay: no orphans
  CHECK(count_kind(trace, EventKind::ForkResolved) == 0);
  CHECK(trace.appended_height() == 100);
  CHECK(trace.main_chain.size() == 101);  // genesis + 100

  // appended heights ascend 1..100 and ids are hex digests
  std::int64_t expect_h = 1;
  for (const auto& e : trace.events) {
    if (e.kind != EventKind::BlockAppended) continue;
    CHECK(e.height == expect_h++);
    CHECK(e.block_id.size() == 64);
  }

  const auto tally = reward_tally(trace);
  REQUIRE(tally.size() == 1);
  CHECK(tally.at(0) == 100);
}

TEST_CASE("a wall-clock duration cuts the run off at that simulated time") {
  Scenario s = analytic_single(1);
  s.duration_blocks = 0;
  s.duration_s = 5000;
  const EventTrace trace = run_scenario(s);
  CHECK_FALSE(trace.stalled);
  CHECK(count_kind(trace, EventKind::BlockAppended) > 0);
  for (const auto& e : trace.events) CHECK(e.t <= 5000.0);
}

TEST_CASE("trace serialization is deterministic and round trips") {
  const Scenario s = analytic_single(50);
  const EventTrace a = run_scenario(s);
  const EventTrace b = run_scenario(s);
  CHECK(a.to_csv() == b.to_csv());

  EventTrace parsed = EventTrace::from_csv(a.to_csv(), s);
  CHECK(parsed.to_csv() == a.to_csv());
  CHECK(parsed.main_chain == a.main_chain);
  CHECK(parsed.proposed_count() == a.proposed_count());
  CHECK_FALSE(parsed.stalled);
}

TEST_CASE("slow propagation relative to solve time causes orphans") {
  const Scenario s = scenario_parse(
      "task_class = cryptopuzzle\n"
      "mode = analytic\n"
      "seed = 5\n"
      "initial_difficulty = 1\n"
      "retarget_window = 100000\n"
      "target_interblock_s = 600\n"
      "duration_blocks = 200\n"
      "miner = 0 7158278.8266666667 honest_switch honest\n"
      "miner = 1 7158278.8266666667 honest_switch honest\n"
      "network = constant 400\n");
  const EventTrace trace = run_scenario(s);
  // reorgs re-announce the replacement branch, so append events exceed the
  // final canonical height
  const std::uint64_t appended = count_kind(trace, EventKind::BlockAppended);
  CHECK(trace.appended_height() == 200);
  CHECK(appended >= 200);
  CHECK(trace.proposed_count() > trace.appended_height());  // at least one orphaned proposal

  // every appended row references a proposed block, and fork resolutions are
  // followed by the replacement branch in ascending height order
  for (std::size_t i = 0; i < trace.events.size(); ++i) {
    const auto& e = trace.events[i];
    if (e.kind == EventKind::BlockAppended) CHECK(trace.blocks.count(e.block_id) == 1);
    if (e.kind == EventKind::ForkResolved) {
      REQUIRE(i + 1 < trace.events.size());
      CHECK(trace.events[i + 1].kind == EventKind::BlockAppended);
    }
  }

  // rewards across miners account for exactly the canonical chain
  std::uint64_t total = 0;
  for (const auto& [miner, blocks] : reward_tally(trace)) total += blocks;
  CHECK(total == trace.main_chain.size() - 1);
}

TEST_CASE("difficulty retargets when the hash rate overshoots the target") {
  const Scenario s = scenario_parse(
      "task_class = cryptopuzzle\n"
      "mode = analytic\n"
      "seed = 3\n"
      "initial_difficulty = 1\n"
      "retarget_window = 32\n"
      "target_interblock_s = 600\n"
      "duration_blocks = 100\n"
      "miner = 0 14316557.653333333 honest_switch honest\n"  // twice the 600 s rate
      "network = constant 0\n");
  const EventTrace trace = run_scenario(s);
  bool saw = false;
  for (const auto& e : trace.events) {
    if (e.kind != EventKind::DifficultyRetargeted) continue;
    saw = true;
    CHECK(e.miner == -1);
    const Rational r = rational_parse(e.difficulty);
    CHECK(r.to_double() > 1.0);  // blocks were too fast, difficulty must rise
  }
  CHECK(saw);
}

TEST_CASE("measured and analytic cryptopuzzle runs agree with the model mean") {
  const std::string common =
      "task_class = cryptopuzzle\n"
      "seed = 17\n"
      "initial_difficulty = 1\n"
      "retarget_window = 100000\n"
      "target_interblock_s = 2\n"
      "duration_blocks = 600\n"
      "nonce_bits = 12\n"
      "miner = 0 2048 honest_switch honest\n"
      "network = constant 0\n";
  const double expected_mean = 4096.0 / 2048.0;  // D * 2^bits / power

  auto mean_gap = [](const EventTrace& t) {
    std::vector<double> times;
    for (const auto& e : t.events)
      if (e.kind == EventKind::BlockAppended) times.push_back(e.t);
    double prev = 0, sum = 0;
    for (double v : times) {
      sum += v - prev;
      prev = v;
    }
    return sum / static_cast<double>(times.size());
  };

  const EventTrace analytic = run_scenario(scenario_parse("mode = analytic\n" + common));
  const EventTrace measured = run_scenario(scenario_parse("mode = measured\n" + common));
  CHECK(mean_gap(analytic) == doctest::Approx(expected_mean).epsilon(0.10));
  CHECK(mean_gap(measured) == doctest::Approx(expected_mean).epsilon(0.10));
}

TEST_CASE("an empty task supply stalls a supply-bound run") {
  const Scenario s = scenario_parse(
      "task_class = kov\n"
      "mode = measured\n"
      "seed = 2\n"
      "initial_difficulty = 1\n"
      "retarget_window = 100000\n"
      "target_interblock_s = 600\n"
      "duration_blocks = 5\n"
      "miner = 0 1000 honest_switch honest\n"
      "network = constant 0\n"
      "supply_initial = 0\n"
      "supply_rate_per_s = 0\n"
      "kov_k = 2\nkov_n = 8\nkov_d = 64\n");
  const EventTrace trace = run_scenario(s);
  CHECK(trace.stalled);
  CHECK(count_kind(trace, EventKind::SupplyStall) == 1);
  CHECK(count_kind(trace, EventKind::BlockAppended) == 0);
}

TEST_CASE("difficulty above one batches supply entries, rounding half up") {
  const std::string common =
      "task_class = kov\n"
      "mode = measured\n"
      "seed = 2\n"
      "initial_difficulty = 5/2\n"  // batch size rounds 2.5 up to 3 entries
      "retarget_window = 100000\n"
      "target_interblock_s = 600\n"
      "duration_blocks = 1\n"
      "miner = 0 1000 honest_switch honest\n"
      "network = constant 0\n"
      "supply_rate_per_s = 0\n"
      "kov_k = 2\nkov_n = 8\nkov_d = 64\n";

  const EventTrace starved = run_scenario(scenario_parse(common + "supply_initial = 2\n"));
  CHECK(starved.stalled);
  CHECK(count_kind(starved, EventKind::SupplyStall) == 1);
  CHECK(count_kind(starved, EventKind::BlockAppended) == 0);

  const EventTrace fed = run_scenario(scenario_parse(common + "supply_initial = 3\n"));
  CHECK_FALSE(fed.stalled);
  CHECK(count_kind(fed, EventKind::BlockAppended) == 1);
}

TEST_CASE("cryptopuzzle scenarios need no task supply") {
  Scenario s = analytic_single(20);
  s.supply.initial_count = 0;
  s.supply.arrival_rate_per_s = 0;
  const EventTrace trace = run_scenario(s);
  CHECK_FALSE(trace.stalled);
  CHECK(count_kind(trace, EventKind::BlockAppended) == 20);
}
