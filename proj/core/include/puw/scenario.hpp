#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "puw/errors.hpp"
#include "puw/supply.hpp"
#include "puw/task_types.hpp"
#include "puw/tsp.hpp"

namespace puw::sim {

enum class Strategy : std::uint8_t { HonestSwitch = 0, Stubborn = 1 };
enum class Honesty : std::uint8_t { Honest = 0, Adversarial = 1 };

struct MinerSpec {
  std::uint64_t id = 0;
  double power = 1.0;  // solve-operations per second
  Strategy strategy = Strategy::HonestSwitch;
  Honesty honesty = Honesty::Honest;
};

struct NetworkSpec {
  enum class Kind { Constant, Uniform };
  Kind kind = Kind::Constant;
  double delay_lo_s = 0;
  double delay_hi_s = 0;  // == lo for Constant
};

enum class SimMode : std::uint8_t { Analytic = 0, Measured = 1 };

struct SupplyConfig {
  std::uint32_t initial_count = 0;
  double arrival_rate_per_s = 0;
  std::uint64_t supplier_id = 1000;
  // instance shapes for generated supply
  std::uint32_t kov_k = 2, kov_n = 32, kov_d = 64;
  std::uint32_t tsp_cities = 30;
  tsp::DistanceMode tsp_mode = tsp::DistanceMode::Euc2dExact;
};

struct Scenario {
  std::vector<MinerSpec> miners;
  NetworkSpec network;
  ClassId task_class = ClassId::Cryptopuzzle;
  SimMode mode = SimMode::Analytic;
  Difficulty initial_difficulty;
  std::uint32_t retarget_window = 2016;
  std::uint64_t target_interblock_s = 600;
  SelectionPolicy selection_policy;
  SupplyConfig supply;
  std::uint64_t duration_blocks = 0;  // 0 = use duration_s
  double duration_s = 0;
  std::uint64_t seed = 0;
  int nonce_bits = 32;
  double tsp_alpha = 1.2;
  std::uint32_t tsp_restart_budget = 64;
};

// Flat key-value text: one `key = value` per line, '#' comments. Throws
// ParseError with the offending line number; also validates cross-field
// constraints (analytic mode requires the cryptopuzzle class, at least one
// miner, positive target interval, a duration).
Scenario scenario_parse(const std::string& text);
std::string scenario_serialize(const Scenario& s);

}  // namespace puw::sim
