#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "puw/scenario.hpp"
#include "puw/task_types.hpp"

namespace puw::sim {

enum class EventKind : std::uint8_t {
  TaskGenerated,
  BlockProposed,
  BlockReceived,
  BlockAppended,
  ForkResolved,
  DifficultyRetargeted,
  SupplyArrived,
  SupplyStall,
};

const char* event_name(EventKind k);
std::optional<EventKind> event_from_name(const std::string& name);

// One CSV row. Missing fields print as "-" / -1. For SupplyArrived rows the
// block_id column carries the supply entry id.
struct TraceEvent {
  EventKind kind = EventKind::TaskGenerated;
  double t = 0;
  std::int64_t miner = -1;
  std::string block_id = "-";
  std::string parent_id = "-";
  std::int64_t height = -1;
  std::string difficulty = "-";
};

struct BlockRecord {
  std::string id;
  std::string parent;
  std::int64_t proposer = -1;
  std::uint64_t height = 0;
  double t_proposed = 0;
  std::string difficulty;
};

struct EventTrace {
  std::vector<TraceEvent> events;
  Scenario scenario;  // echo, so probes know powers/honesty/targets
  bool stalled = false;

  // Derived by finalize(): the global block registry and the final canonical
  // main chain (longest, ties by earliest proposal), genesis first.
  std::unordered_map<std::string, BlockRecord> blocks;
  std::vector<std::string> main_chain;

  void finalize();
  std::string to_csv() const;
  static EventTrace from_csv(const std::string& csv, const Scenario& scenario);

  std::uint64_t proposed_count() const;
  std::uint64_t appended_height() const;  // main-chain length excluding genesis
};

extern const std::string kGenesisId;  // 64 zero hex chars

// Longest-chain block tree with first-received tie-break. Blocks whose parent
// has not arrived yet are buffered and attached when it does.
class ChainState {
 public:
  ChainState();

  struct PendingBlock {
    std::string id;
    std::string parent;
  };

  // Returns ids actually attached (the block plus any unbuffered children),
  // in attach order. The caller must have verified the block already.
  std::vector<std::string> apply_block(const std::string& id, const std::string& parent);

  bool contains(const std::string& id) const;
  const std::string& head() const { return head_; }
  std::uint64_t height_of(const std::string& id) const;
  std::uint64_t head_height() const { return height_of(head_); }
  // Path genesis..id.
  std::vector<std::string> path(const std::string& id) const;
  std::vector<std::string> head_path() const { return path(head_); }
  // True when the given block is an ancestor of (or equal to) the head.
  bool on_main_chain(const std::string& id) const;

 private:
  struct Node {
    std::string parent;
    std::uint64_t height = 0;
    std::uint64_t arrival = 0;
  };
  std::unordered_map<std::string, Node> nodes_;
  std::multimap<std::string, std::string> pending_;  // parent -> buffered child
  std::string head_;
  std::uint64_t arrivals_ = 0;

  void attach(const std::string& id, const std::string& parent, std::vector<std::string>& out);
};

// new = current * (expected / actual), clamped to [current/4, current*4];
// expected = (|timestamps|-1) * target_interblock_s, actual = last - first
// (>= 1 s). Exact rational arithmetic. Requires >= 2 timestamps.
Difficulty retarget_difficulty(const std::vector<std::uint64_t>& window_timestamps,
                               const Difficulty& current, std::uint64_t target_interblock_s);

// Deterministic discrete-event run. Analytic mode draws exponential solve
// times with rate power/(diff * 2^nonce_bits); measured mode runs the real
// backend solver and converts ops to seconds via miner power. On an empty
// admissible supply the trace records SupplyStall and the run halts.
EventTrace run_scenario(const Scenario& scenario);

// Per-miner block counts on the final canonical main chain.
std::map<std::uint64_t, std::uint64_t> reward_tally(const EventTrace& trace);

}  // namespace puw::sim
