#pragma once

#include <cstdint>
#include <optional>
#include <variant>

#include "puw/cryptopuzzle.hpp"
#include "puw/errors.hpp"
#include "puw/kov.hpp"
#include "puw/supply.hpp"
#include "puw/task_types.hpp"
#include "puw/tsp.hpp"

namespace puw {

struct KovTaskPayload {
  kov::KovInstance instance;
  // Supply entries folded into this task (batching); empty when the task
  // wraps a single un-batched instance.
  std::vector<std::uint64_t> source_entry_ids;
};

struct TspTaskPayload {
  tsp::TspTask task;
  std::uint64_t source_entry_id = 0;
};

struct BlockTask {
  ClassId class_id = ClassId::Cryptopuzzle;
  std::variant<puzzle::PuzzleTask, KovTaskPayload, TspTaskPayload> payload;
  Digest bound_context{};
  Difficulty difficulty;
};

struct GenerateOptions {
  int nonce_bits = 32;
  double tsp_alpha = 1.2;
  bool contextualize_tsp = true;
};

// Cryptopuzzle: pure function of the context digest and difficulty (supply
// unused). Kov/Tsp: select a policy-admissible instance from the supply
// (consuming it), contextualizing where the backend supports it. Throws
// EmptySupply / UnknownClass.
BlockTask generate(ClassId class_id, TaskSupplyState& tss, const SelectionPolicy& policy,
                   const BlockContext& ctx, const Difficulty& diff,
                   const GenerateOptions& opts = {});

// budget: max abstract operations (cryptopuzzle: hashes; kov: multiplications)
// or restarts for tsp. Deterministic per (task, budget, seed).
SolveOutcome solve(const BlockTask& task, std::uint64_t budget, std::uint64_t seed);

// Dispatches to the backend verifier; Full mode is deterministic; SpotCheck
// applies only to the k-OV backend. Throws ClassMismatch when the proof's
// class differs from the task's.
bool verify(const BlockTask& task, const ProofOfComputation& poc, const VerifyMode& mode);

// Returns the solution in the supplier's original coordinate/index space.
// transform_record must be present iff the proof's backend contextualized the
// instance (TSP); identity for cryptopuzzle and k-OV. Throws MissingTransform.
TaskSolution reconstruct(const ProofOfComputation& poc,
                         const std::optional<tsp::TspTransform>& transform_record);

}  // namespace puw
