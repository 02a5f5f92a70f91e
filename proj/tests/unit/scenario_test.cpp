#include "doctest.h"

#include <string>

#include "puw/scenario.hpp"

using namespace puw;
using namespace puw::sim;

namespace {

const std::string kBase =
    "task_class = cryptopuzzle\n"
    "mode = analytic\n"
    "seed = 42\n"
    "initial_difficulty = 3/2\n"
    "retarget_window = 64\n"
    "target_interblock_s = 600\n"
    "duration_blocks = 100\n"
    "nonce_bits = 32\n"
    "miner = 0 5e6 honest_switch honest\n"
    "miner = 1 1e7 stubborn adversarial\n"
    "network = uniform 0.5 2.5\n"
    "selection_policy = miner_choice 3\n"
    "supply_initial = 10\n"
    "supply_rate_per_s = 0.25\n";

int parse_error_line(const std::string& text) {
  try {
    scenario_parse(text);
  } catch (const ParseError& e) {
    // the message itself must carry the line number for CLI diagnostics
    CHECK(std::string(e.what()).rfind("line " + std::to_string(e.line) + ":", 0) == 0);
    return e.line;
  }
  return -1;
}

}  // namespace

TEST_CASE("a full scenario parses field by field") {
  const Scenario s = scenario_parse(kBase);
  CHECK(s.task_class == ClassId::Cryptopuzzle);
  CHECK(s.mode == SimMode::Analytic);
  CHECK(s.seed == 42);
  CHECK(s.initial_difficulty.value.num == 3);
  CHECK(s.initial_difficulty.value.den == 2);
  CHECK(s.retarget_window == 64);
  CHECK(s.target_interblock_s == 600);
  CHECK(s.duration_blocks == 100);
  CHECK(s.nonce_bits == 32);
  REQUIRE(s.miners.size() == 2);
  CHECK(s.miners[0].id == 0);
  CHECK(s.miners[0].power == (5e6));
  CHECK(s.miners[0].strategy == Strategy::HonestSwitch);
  CHECK(s.miners[0].honesty == Honesty::Honest);
  CHECK(s.miners[1].strategy == Strategy::Stubborn);
  CHECK(s.miners[1].honesty == Honesty::Adversarial);
  CHECK(s.network.kind == NetworkSpec::Kind::Uniform);
  CHECK(s.network.delay_lo_s == (0.5));
  CHECK(s.network.delay_hi_s == (2.5));
  CHECK(s.selection_policy.kind == SelectionPolicy::Kind::MinerChoice);
  CHECK(s.selection_policy.miner_choice_index == 3);
  CHECK(s.supply.initial_count == 10);
  CHECK(s.supply.arrival_rate_per_s == (0.25));
}

TEST_CASE("comments, blank lines, and spacing are tolerated") {
  const Scenario s = scenario_parse(
      "# header comment\n"
      "\n"
      "task_class=cryptopuzzle\n"
      "  mode   =   analytic   # trailing comment\n"
      "miner = 0 1.0 honest_switch honest\n"
      "duration_blocks = 1\n");
  CHECK(s.mode == SimMode::Analytic);
  CHECK(s.miners.size() == 1);
}

TEST_CASE("serialize and parse round trip") {
  const Scenario a = scenario_parse(kBase);
  const Scenario b = scenario_parse(scenario_serialize(a));
  CHECK(scenario_serialize(a) == scenario_serialize(b));
  CHECK(b.miners.size() == a.miners.size());
  CHECK(b.initial_difficulty.value.num == a.initial_difficulty.value.num);
  CHECK(b.initial_difficulty.value.den == a.initial_difficulty.value.den);
}

TEST_CASE("parse errors carry the offending line number") {
  CHECK(parse_error_line("garbage\n") == 1);
  CHECK(parse_error_line("task_class = cryptopuzzle\nbogus_key = 1\n") == 2);
  CHECK(parse_error_line("seed = -4\nminer = 0 1 honest_switch honest\nduration_blocks = 1\n") ==
        1);
  CHECK(parse_error_line("task_class = cryptopuzzle\n\n\nmode = neither\n") == 4);
  CHECK(parse_error_line("miner = 0 1 honest_switch\nduration_blocks = 1\n") == 1);
  CHECK(parse_error_line("miner = 0 0 honest_switch honest\nduration_blocks = 1\n") == 1);
}

TEST_CASE("duplicate miner ids are rejected") {
  CHECK(parse_error_line("miner = 7 1 honest_switch honest\n"
                         "miner = 7 2 honest_switch honest\n"
                         "duration_blocks = 1\n") == 2);
}

TEST_CASE("cross-field validation") {
  // no miners
  CHECK_THROWS_AS(scenario_parse("duration_blocks = 5\n"), ParseError);
  // no duration at all
  CHECK_THROWS_AS(scenario_parse("miner = 0 1 honest_switch honest\n"), ParseError);
  // zero-block duration with no duration_s
  CHECK_THROWS_AS(scenario_parse("miner = 0 1 honest_switch honest\nduration_blocks = 0\n"),
                  ParseError);
  // duration_s alone is fine
  CHECK_NOTHROW(scenario_parse("miner = 0 1 honest_switch honest\nduration_s = 3.5\n"));
  // analytic mode is a hash-racing model: non-cryptopuzzle classes must refuse it
  CHECK_THROWS_AS(scenario_parse("task_class = kov\nmode = analytic\n"
                                 "miner = 0 1 honest_switch honest\nduration_blocks = 1\n"),
                  ParseError);
  CHECK_NOTHROW(scenario_parse("task_class = kov\nmode = measured\n"
                               "miner = 0 1 honest_switch honest\nduration_blocks = 1\n"));
  // nonce_bits range
  CHECK_THROWS_AS(scenario_parse("nonce_bits = 7\nminer = 0 1 honest_switch honest\n"
                                 "duration_blocks = 1\n"),
                  ParseError);
  CHECK_THROWS_AS(scenario_parse("nonce_bits = 33\nminer = 0 1 honest_switch honest\n"
                                 "duration_blocks = 1\n"),
                  ParseError);
  // difficulty below one
  CHECK_THROWS_AS(scenario_parse("initial_difficulty = 1/2\nminer = 0 1 honest_switch honest\n"
                                 "duration_blocks = 1\n"),
                  ParseError);
  // negative delay / inverted uniform range
  CHECK_THROWS_AS(scenario_parse("network = constant -1\nminer = 0 1 honest_switch honest\n"
                                 "duration_blocks = 1\n"),
                  ParseError);
  CHECK_THROWS_AS(scenario_parse("network = uniform 5 2\nminer = 0 1 honest_switch honest\n"
                                 "duration_blocks = 1\n"),
                  ParseError);
  // tsp city floor
  CHECK_THROWS_AS(scenario_parse("task_class = tsp\nmode = measured\ntsp_cities = 3\n"
                                 "miner = 0 1 honest_switch honest\nduration_blocks = 1\n"),
                  ParseError);
}

TEST_CASE("difficulty accepts integer, fraction, and decimal forms") {
  const std::string tail =
      "miner = 0 1 honest_switch honest\n"
      "duration_blocks = 1\n";
  CHECK(scenario_parse("initial_difficulty = 4\n" + tail).initial_difficulty.value.num == 4);
  const Scenario s = scenario_parse("initial_difficulty = 2.5\n" + tail);
  CHECK(s.initial_difficulty.value.num == 5);
  CHECK(s.initial_difficulty.value.den == 2);
}
