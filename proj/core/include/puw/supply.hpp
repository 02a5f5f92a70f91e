#pragma once

#include <cstdint>
#include <deque>
#include <variant>

#include "puw/bytes.hpp"
#include "puw/kov.hpp"
#include "puw/tsp.hpp"

namespace puw {

struct SupplyEntry {
  std::uint64_t entry_id = 0;
  std::uint64_t supplier_id = 0;
  double arrival_time = 0;
  std::variant<kov::KovInstance, tsp::TspInstance> instance;
};

struct SelectionPolicy {
  enum class Kind { Fifo, UniformRandom, MinerChoice };
  Kind kind = Kind::Fifo;
  std::uint64_t miner_choice_index = 0;

  static SelectionPolicy fifo() { return {}; }
  static SelectionPolicy uniform_random() { return {Kind::UniformRandom, 0}; }
  static SelectionPolicy miner_choice(std::uint64_t idx) { return {Kind::MinerChoice, idx}; }
};

// Ordered queue of supplied-but-unsolved instances. In the simulator each
// node derives its view deterministically from arrivals and its main chain;
// here the container just keeps arrival order and selection rules.
class TaskSupplyState {
 public:
  void push(SupplyEntry e) { entries_.push_back(std::move(e)); }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  const SupplyEntry& at(std::size_t i) const { return entries_[i]; }

  // Fifo: oldest. UniformRandom: seeded by the context digest, so different
  // contexts shuffle selections. MinerChoice: configured index, clamped.
  // Throws EmptySupply when no instance is admissible.
  std::size_t select_index(const SelectionPolicy& policy, const Digest& ctx_digest) const;

  SupplyEntry take(std::size_t index);

 private:
  std::deque<SupplyEntry> entries_;
};

}  // namespace puw
