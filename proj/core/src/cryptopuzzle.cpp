#include "puw/cryptopuzzle.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "puw/sha256.hpp"

namespace puw::puzzle {

namespace {

// 320-bit little-endian limb scratch for floor(2^(256-bits) * den / num).
struct Wide {
  std::uint64_t limb[5] = {0, 0, 0, 0, 0};
};

Wide pow2(unsigned bit) {
  Wide w;
  w.limb[bit / 64] = 1ULL << (bit % 64);
  return w;
}

void mul_u64(Wide& w, std::uint64_t m) {
  unsigned __int128 carry = 0;
  for (int i = 0; i < 5; ++i) {
    unsigned __int128 cur = static_cast<unsigned __int128>(w.limb[i]) * m + carry;
    w.limb[i] = static_cast<std::uint64_t>(cur);
    carry = cur >> 64;
  }
}

void div_u64(Wide& w, std::uint64_t d) {
  unsigned __int128 rem = 0;
  for (int i = 4; i >= 0; --i) {
    unsigned __int128 cur = (rem << 64) | w.limb[i];
    w.limb[i] = static_cast<std::uint64_t>(cur / d);
    rem = cur % d;
  }
}

Digest to_digest_be(const Wide& w) {
  Digest d{};
  for (int byte = 0; byte < 32; ++byte) {
    int limb = 3 - byte / 8;
    int shift = 56 - 8 * (byte % 8);
    d[static_cast<std::size_t>(byte)] =
        static_cast<std::uint8_t>((w.limb[limb] >> shift) & 0xff);
  }
  return d;
}

}  // namespace

PuzzleTask puzzle_generate(const Digest& ctx_digest, const Difficulty& diff, int nonce_bits) {
  if (nonce_bits < 8 || nonce_bits > 32)
    throw std::invalid_argument("nonce_bits must be in [8, 32]");
  if (diff.value.num < diff.value.den)
    throw std::invalid_argument("cryptopuzzle difficulty must be >= 1");
  Wide w = pow2(static_cast<unsigned>(256 - nonce_bits));
  mul_u64(w, diff.value.den);
  div_u64(w, diff.value.num);
  PuzzleTask task;
  task.target = to_digest_be(w);
  task.nonce_bits = nonce_bits;
  task.bound_context = ctx_digest;
  return task;
}

Digest puzzle_hash(const Digest& bound_context, std::uint64_t nonce) {
  std::uint8_t buf[40];
  std::memcpy(buf, bound_context.data(), 32);
  put_u64_be(buf + 32, nonce);
  return sha256(buf, sizeof buf);
}

SolveOutcome puzzle_solve(const PuzzleTask& task, std::uint64_t seed, std::uint64_t max_ops) {
  (void)seed;  // scan order is fixed; the context digest already randomizes the landscape
  const std::uint64_t space = 1ULL << task.nonce_bits;
  std::uint8_t buf[40];
  std::memcpy(buf, task.bound_context.data(), 32);
  std::uint64_t ops = 0;
  for (std::uint64_t nonce = 0; nonce < space; ++nonce) {
    if (ops >= max_ops) return SolveOutcome::exhausted(ops);
    put_u64_be(buf + 32, nonce);
    Digest h = sha256(buf, sizeof buf);
    ++ops;
    if (std::memcmp(h.data(), task.target.data(), 32) <= 0) {
      ProofOfComputation poc;
      poc.class_id = ClassId::Cryptopuzzle;
      poc.solution_payload = encode_nonce(nonce);
      poc.solve_stats.elapsed_ops = ops;
      return SolveOutcome::solved_with(std::move(poc));
    }
  }
  return SolveOutcome::exhausted(ops);
}

bool puzzle_verify(const PuzzleTask& task, const std::vector<std::uint8_t>& solution_payload,
                   std::uint64_t* ops) {
  if (ops) *ops = 0;
  auto nonce = decode_nonce(solution_payload, task.nonce_bits);
  if (!nonce) return false;
  Digest h = puzzle_hash(task.bound_context, *nonce);
  if (ops) *ops = 1;
  return std::memcmp(h.data(), task.target.data(), 32) <= 0;
}

std::vector<std::uint8_t> encode_nonce(std::uint64_t nonce) {
  std::vector<std::uint8_t> v(8);
  put_u64_be(v.data(), nonce);
  return v;
}

std::optional<std::uint64_t> decode_nonce(const std::vector<std::uint8_t>& payload,
                                          int nonce_bits) {
  if (payload.size() != 8) return std::nullopt;
  std::uint64_t nonce = get_u64_be(payload.data());
  if (nonce_bits < 64 && nonce >= (1ULL << nonce_bits)) return std::nullopt;
  return nonce;
}

double p_no_solution(const Difficulty& diff, int nonce_bits) {
  if (diff.value.num < diff.value.den)
    throw std::invalid_argument("cryptopuzzle difficulty must be >= 1");
  const long double space = std::ldexp(1.0L, nonce_bits);
  const long double per_nonce = static_cast<long double>(diff.value.den) /
                                (static_cast<long double>(diff.value.num) * space);
  return static_cast<double>(std::exp(space * std::log1p(-per_nonce)));
}

InterblockModel interblock_model(double total_hashrate, const Difficulty& diff, int nonce_bits) {
  if (!(total_hashrate > 0)) throw std::invalid_argument("hashrate must be positive");
  InterblockModel m;
  m.mean_s = diff.to_double() * std::pow(2.0, nonce_bits) / total_hashrate;
  m.p99_s = m.mean_s * std::log(100.0);
  return m;
}

}  // namespace puw::puzzle
