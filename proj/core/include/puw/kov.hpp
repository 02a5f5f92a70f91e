#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "puw/rng.hpp"
#include "puw/task_types.hpp"

namespace puw::kov {

// Bit-vector packed into 64-bit words; orthogonality tests AND-accumulate
// whole words.
struct BitVec {
  std::uint32_t d = 0;
  std::vector<std::uint64_t> words;

  explicit BitVec(std::uint32_t dim = 0) : d(dim), words((dim + 63) / 64, 0) {}
  bool get(std::uint32_t i) const { return (words[i >> 6] >> (i & 63)) & 1; }
  void set(std::uint32_t i, bool v) {
    if (v)
      words[i >> 6] |= (1ULL << (i & 63));
    else
      words[i >> 6] &= ~(1ULL << (i & 63));
  }
  bool operator==(const BitVec& o) const { return d == o.d && words == o.words; }
};

// k sets of bit-vectors of dimension d. Sets normally share one size n;
// after partitioning, set 0 may be narrower than the rest (tuple space is the
// product of per-set sizes).
struct KovInstance {
  std::uint32_t k = 2;
  std::uint32_t d = 0;
  std::vector<std::vector<BitVec>> sets;

  std::uint32_t n() const { return sets.empty() ? 0 : static_cast<std::uint32_t>(sets[0].size()); }
  std::uint64_t tuple_space() const {
    std::uint64_t t = 1;
    for (const auto& s : sets) t *= s.size();
    return t;
  }
};

// A tuple (i_1..i_k) is orthogonal iff sum over coordinates of the product of
// the k vectors' entries is zero — equivalently every coordinate has a zero
// factor somewhere in the tuple.
bool tuple_orthogonal(const KovInstance& inst, const std::uint32_t* idx);

struct KovProof {
  std::uint32_t k = 2;
  std::vector<std::uint32_t> idx;  // flat, stride k, lexicographically sorted
  bool claimed_complete = false;

  std::size_t tuple_count() const { return k == 0 ? 0 : idx.size() / k; }
  const std::uint32_t* tuple(std::size_t t) const { return idx.data() + t * k; }
};

// Full n^k enumeration in lexicographic order; claimed_complete = true.
// Abstract op cost: d*(k-1) multiplications per tuple examined. Returns
// nothing early: the empty tuple list is itself a valid complete proof.
KovProof kov_solve(const KovInstance& inst, std::uint64_t seed, std::uint64_t* ops = nullptr,
                   std::uint64_t max_ops = UINT64_MAX, bool* exhausted = nullptr);

// Memo cache across solves: keys are the tuple's vector contents. A hit costs
// 1 op instead of d*(k-1). Exists to *demonstrate* amortization when task
// structure is shared — the violation the property framework looks for.
struct MemoCache {
  std::unordered_map<std::uint64_t, bool> map;
  std::uint64_t hits = 0, misses = 0;
};
KovProof kov_solve_memo(const KovInstance& inst, MemoCache& cache, std::uint64_t* ops = nullptr);

// SpotCheck(f): verifies a seeded random ceil(f*|tuples|) subset, O(d) each.
// Full: also re-enumerates the tuple space and requires exact equality when
// the proof claims completeness (verification-by-re-execution trade-off).
bool kov_verify(const KovInstance& inst, const KovProof& proof, const VerifyMode& mode,
                std::uint64_t* ops = nullptr);

std::vector<std::uint8_t> encode_proof(const KovProof& proof);
bool decode_proof(const std::vector<std::uint8_t>& payload, KovProof& out);

// Set-wise concatenation (difficulty up). Inputs must agree on k and d.
KovInstance kov_batch(const std::vector<KovInstance>& instances);

// Splits set 0 into `parts` row blocks (difficulty down); parts must divide
// the size of set 0. Solutions of the parts, with set-0 indices offset back,
// union to exactly the original solution set.
std::vector<KovInstance> kov_partition(const KovInstance& inst, std::uint32_t parts);
KovProof kov_merge_partition_solutions(const std::vector<KovProof>& proofs,
                                       const std::vector<std::uint32_t>& part_sizes);

// floor((flops*seconds)^(1/3)) under the square-matrix assumption d = n.
std::uint64_t kov_dimension_for_budget(double flops, double seconds);

KovInstance kov_random_instance(std::uint32_t k, std::uint32_t n, std::uint32_t d, Rng& rng,
                                double ones_density = 0.5);

// Text format: header "k n d", then k*n lines of d characters in {0,1}.
KovInstance kov_parse(const std::string& text);  // throws ParseError
std::string kov_serialize(const KovInstance& inst);

}  // namespace puw::kov
