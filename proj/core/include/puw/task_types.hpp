#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "puw/bytes.hpp"
#include "puw/rational.hpp"

namespace puw {

enum class ClassId : std::uint8_t { Cryptopuzzle = 0, Kov = 1, Tsp = 2 };

const char* class_name(ClassId c);
std::optional<ClassId> class_from_name(const std::string& name);

// The block data a task is bound to. Transactions are abstracted into
// payload_digest; extra_nonce is the miner's context-variation counter,
// bumped only on nonce-space exhaustion.
struct BlockContext {
  Digest prev_block_id{};
  Digest payload_digest{};
  std::uint64_t height = 0;
  std::uint64_t timestamp = 0;  // simulated seconds
  std::uint64_t miner_id = 0;
  std::uint64_t extra_nonce = 0;
};

// Canonical serialization: fixed field order (prev_block_id, payload_digest,
// height, timestamp, miner_id, extra_nonce), fixed-width big-endian integers.
std::vector<std::uint8_t> context_serialize(const BlockContext& ctx);
Digest context_digest(const BlockContext& ctx);

// Class-specific meaning; for cryptopuzzles: expected full nonce-space scans
// per solution. Higher value = more expected work within one backend; values
// are not comparable across backends.
struct Difficulty {
  Rational value;
  Difficulty() : value(1, 1) {}
  explicit Difficulty(Rational v) : value(v) {}
  Difficulty(std::uint64_t num, std::uint64_t den) : value(num, den) {}
  double to_double() const { return value.to_double(); }
  std::string str() const { return value.str(); }
};

struct SolveStats {
  std::uint64_t elapsed_ops = 0;  // abstract work units (hashes / multiplications / distance evals)
  std::uint32_t restarts = 0;
};

struct ProofOfComputation {
  ClassId class_id = ClassId::Cryptopuzzle;
  std::vector<std::uint8_t> solution_payload;
  SolveStats solve_stats;
};

struct SolveOutcome {
  enum class Kind { Solved, Exhausted };
  Kind kind = Kind::Exhausted;
  std::optional<ProofOfComputation> poc;
  // Ops spent even when exhausted (Solved carries them in the proof too).
  std::uint64_t elapsed_ops = 0;

  bool solved() const { return kind == Kind::Solved; }
  static SolveOutcome solved_with(ProofOfComputation p) {
    SolveOutcome o;
    o.kind = Kind::Solved;
    o.elapsed_ops = p.solve_stats.elapsed_ops;
    o.poc = std::move(p);
    return o;
  }
  static SolveOutcome exhausted(std::uint64_t ops) {
    SolveOutcome o;
    o.kind = Kind::Exhausted;
    o.elapsed_ops = ops;
    return o;
  }
};

// Full: deterministic complete check. SpotCheck(fraction): k-OV only —
// samples ceil(fraction * |tuples|) claimed tuples with the given seed;
// other backends ignore the mode.
struct VerifyMode {
  enum class Kind { Full, SpotCheck };
  Kind kind = Kind::Full;
  double fraction = 1.0;
  std::uint64_t seed = 0;

  static VerifyMode full() { return {}; }
  static VerifyMode spot_check(double fraction, std::uint64_t seed = 0) {
    VerifyMode m;
    m.kind = Kind::SpotCheck;
    m.fraction = fraction;
    m.seed = seed;
    return m;
  }
};

// A solution re-expressed in the supplier's original coordinate/index space
// (inverse of any context transform applied at generation time).
struct TaskSolution {
  ClassId class_id = ClassId::Cryptopuzzle;
  std::vector<std::uint8_t> payload;
};

}  // namespace puw
