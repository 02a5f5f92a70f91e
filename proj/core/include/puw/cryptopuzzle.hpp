#pragma once

#include <cstdint>
#include <optional>

#include "puw/task_types.hpp"

namespace puw::puzzle {

// Find nonce < 2^nonce_bits with SHA-256(bound_context || nonce_be8) <= target.
// target is a 256-bit unsigned integer in big-endian byte form so it compares
// against digests with one memcmp.
struct PuzzleTask {
  Digest target{};
  int nonce_bits = 32;  // in [8, 32]; scaled-down spaces keep statistics desk-sized
  Digest bound_context{};
};

// target = floor(2^(256 - nonce_bits) / diff) so the per-nonce success
// probability is exactly 2^(-nonce_bits) / diff. Requires diff >= 1.
PuzzleTask puzzle_generate(const Digest& ctx_digest, const Difficulty& diff, int nonce_bits);

Digest puzzle_hash(const Digest& bound_context, std::uint64_t nonce);

// Sequential scan from nonce 0; first valid nonce wins (deterministic). The
// seed is accepted for interface uniformity and unused. Exhausted after the
// full scan; the caller then bumps extra_nonce and regenerates.
SolveOutcome puzzle_solve(const PuzzleTask& task, std::uint64_t seed,
                          std::uint64_t max_ops = UINT64_MAX);

// Exactly one hash evaluation. ops, when given, receives that count.
bool puzzle_verify(const PuzzleTask& task, const std::vector<std::uint8_t>& solution_payload,
                   std::uint64_t* ops = nullptr);

std::vector<std::uint8_t> encode_nonce(std::uint64_t nonce);
std::optional<std::uint64_t> decode_nonce(const std::vector<std::uint8_t>& payload,
                                          int nonce_bits);

// (1 - 2^(-nonce_bits)/diff)^(2^nonce_bits): probability a task has no
// solution in its nonce space.
double p_no_solution(const Difficulty& diff, int nonce_bits);

struct InterblockModel {
  double mean_s = 0;
  double p99_s = 0;
};

// mean = diff * 2^nonce_bits / hashrate; p99 = mean * ln(100) (exponential tail).
InterblockModel interblock_model(double total_hashrate, const Difficulty& diff, int nonce_bits);

}  // namespace puw::puzzle
