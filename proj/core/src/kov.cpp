#include "puw/kov.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "puw/errors.hpp"

namespace puw::kov {

namespace {

// Cost model: a tuple check is d*(k-1) scalar multiplications, charged in
// full even when the packed-word scan short-circuits — op counts are the
// hardware-independent work unit, not an instruction count.
std::uint64_t tuple_cost(const KovInstance& inst) {
  return static_cast<std::uint64_t>(inst.d) * (inst.k - 1);
}

// Odometer over the per-set sizes, lexicographic. Returns false on wrap.
bool advance(std::vector<std::uint32_t>& idx, const KovInstance& inst) {
  for (std::size_t l = idx.size(); l-- > 0;) {
    if (++idx[l] < inst.sets[l].size()) return true;
    idx[l] = 0;
  }
  return false;
}

std::uint64_t fold_words(std::uint64_t h, const BitVec& v) {
  std::uint64_t s = h ^ (0x9e3779b97f4a7c15ULL + v.d);
  h = splitmix64(s);
  for (std::uint64_t w : v.words) {
    s ^= w;
    h ^= splitmix64(s);
  }
  return h;
}

}  // namespace

bool tuple_orthogonal(const KovInstance& inst, const std::uint32_t* idx) {
  const std::size_t nwords = inst.sets[0][0].words.size();
  for (std::size_t w = 0; w < nwords; ++w) {
    std::uint64_t acc = ~0ULL;
    for (std::uint32_t l = 0; l < inst.k; ++l) acc &= inst.sets[l][idx[l]].words[w];
    if (acc != 0) return false;  // some coordinate has all-one factors
  }
  return true;
}

KovProof kov_solve(const KovInstance& inst, std::uint64_t seed, std::uint64_t* ops,
                   std::uint64_t max_ops, bool* exhausted) {
  (void)seed;  // enumeration order is fixed by the instance
  if (exhausted) *exhausted = false;
  KovProof proof;
  proof.k = inst.k;
  proof.claimed_complete = true;
  std::uint64_t spent = 0;
  const std::uint64_t cost = tuple_cost(inst);
  std::vector<std::uint32_t> idx(inst.k, 0);
  bool any = inst.tuple_space() > 0;
  while (any) {
    if (spent + cost > max_ops) {
      if (ops) *ops = spent;
      if (exhausted) *exhausted = true;
      proof.claimed_complete = false;  // budget ran out mid-enumeration
      return proof;
    }
    spent += cost;
    if (tuple_orthogonal(inst, idx.data())) {
      proof.idx.insert(proof.idx.end(), idx.begin(), idx.end());
    }
    any = advance(idx, inst);
  }
  if (ops) *ops = spent;
  return proof;
}

KovProof kov_solve_memo(const KovInstance& inst, MemoCache& cache, std::uint64_t* ops) {
  KovProof proof;
  proof.k = inst.k;
  proof.claimed_complete = true;
  std::uint64_t spent = 0;
  const std::uint64_t cost = tuple_cost(inst);
  std::vector<std::uint32_t> idx(inst.k, 0);
  bool any = inst.tuple_space() > 0;
  while (any) {
    std::uint64_t key = 0xcbf29ce484222325ULL;
    for (std::uint32_t l = 0; l < inst.k; ++l) key = fold_words(key, inst.sets[l][idx[l]]);
    bool orth;
    auto it = cache.map.find(key);
    if (it != cache.map.end()) {
      orth = it->second;
      ++cache.hits;
      spent += 1;  // cached lookup instead of the d*(k-1) products
    } else {
      orth = tuple_orthogonal(inst, idx.data());
      cache.map.emplace(key, orth);
      ++cache.misses;
      spent += cost;
    }
    if (orth) proof.idx.insert(proof.idx.end(), idx.begin(), idx.end());
    any = advance(idx, inst);
  }
  if (ops) *ops = spent;
  return proof;
}

namespace {

bool indices_valid(const KovInstance& inst, const KovProof& proof) {
  if (proof.k != inst.k) return false;
  if (proof.idx.size() % proof.k != 0) return false;
  const std::size_t count = proof.tuple_count();
  for (std::size_t t = 0; t < count; ++t) {
    const std::uint32_t* tup = proof.tuple(t);
    for (std::uint32_t l = 0; l < inst.k; ++l) {
      if (tup[l] >= inst.sets[l].size()) return false;  // constant-time inclusion check
    }
    if (t > 0 &&
        !std::lexicographical_compare(proof.tuple(t - 1), proof.tuple(t - 1) + inst.k, tup,
                                      tup + inst.k)) {
      return false;  // must be strictly increasing lexicographically
    }
  }
  return true;
}

}  // namespace

bool kov_verify(const KovInstance& inst, const KovProof& proof, const VerifyMode& mode,
                std::uint64_t* ops) {
  std::uint64_t spent = 0;
  const std::uint64_t cost = tuple_cost(inst);
  if (!indices_valid(inst, proof)) {
    if (ops) *ops = spent;
    return false;
  }
  const std::size_t count = proof.tuple_count();
  if (mode.kind == VerifyMode::Kind::SpotCheck) {
    if (count > 0) {
      std::size_t sample =
          static_cast<std::size_t>(std::ceil(mode.fraction * static_cast<double>(count)));
      sample = std::min(std::max<std::size_t>(sample, 1), count);
      // seeded partial Fisher-Yates: the first `sample` positions
      std::vector<std::uint32_t> pos(count);
      for (std::size_t i = 0; i < count; ++i) pos[i] = static_cast<std::uint32_t>(i);
      Rng rng(seed_combine(mode.seed, tag_from_name("kov.spotcheck")));
      for (std::size_t i = 0; i < sample; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.below(count - i));
        std::swap(pos[i], pos[j]);
        spent += cost;
        if (!tuple_orthogonal(inst, proof.tuple(pos[i]))) {
          if (ops) *ops = spent;
          return false;
        }
      }
    }
    if (ops) *ops = spent;
    return true;
  }
  // Full: every listed tuple must be orthogonal...
  for (std::size_t t = 0; t < count; ++t) {
    spent += cost;
    if (!tuple_orthogonal(inst, proof.tuple(t))) {
      if (ops) *ops = spent;
      return false;
    }
  }
  // ...and a complete claim is checked by re-executing the enumeration.
  if (proof.claimed_complete) {
    std::vector<std::uint32_t> idx(inst.k, 0);
    bool any = inst.tuple_space() > 0;
    std::size_t seen = 0;
    while (any) {
      spent += cost;
      if (tuple_orthogonal(inst, idx.data())) {
        if (seen >= count ||
            !std::equal(idx.begin(), idx.end(), proof.tuple(seen))) {
          if (ops) *ops = spent;
          return false;
        }
        ++seen;
      }
      any = advance(idx, inst);
    }
    if (seen != count) {
      if (ops) *ops = spent;
      return false;
    }
  }
  if (ops) *ops = spent;
  return true;
}

std::vector<std::uint8_t> encode_proof(const KovProof& proof) {
  ByteWriter w;
  w.u32be(proof.k);
  w.u32be(static_cast<std::uint32_t>(proof.tuple_count()));
  w.u8(proof.claimed_complete ? 1 : 0);
  for (std::uint32_t v : proof.idx) w.u32be(v);
  return w.data();
}

bool decode_proof(const std::vector<std::uint8_t>& payload, KovProof& out) {
  if (payload.size() < 9) return false;
  std::uint32_t k = get_u32_be(payload.data());
  std::uint32_t count = get_u32_be(payload.data() + 4);
  std::uint8_t complete = payload[8];
  if (k == 0 || k > 16 || complete > 1) return false;
  std::uint64_t need = 9ULL + 4ULL * k * count;
  if (payload.size() != need) return false;
  out.k = k;
  out.claimed_complete = complete == 1;
  out.idx.resize(static_cast<std::size_t>(k) * count);
  for (std::size_t i = 0; i < out.idx.size(); ++i)
    out.idx[i] = get_u32_be(payload.data() + 9 + 4 * i);
  return true;
}

KovInstance kov_batch(const std::vector<KovInstance>& instances) {
  if (instances.empty()) throw DimensionMismatch("batch of zero instances");
  KovInstance out;
  out.k = instances[0].k;
  out.d = instances[0].d;
  out.sets.resize(out.k);
  for (const auto& inst : instances) {
    if (inst.k != out.k || inst.d != out.d)
      throw DimensionMismatch("batched instances must share k and d");
    for (std::uint32_t l = 0; l < out.k; ++l)
      out.sets[l].insert(out.sets[l].end(), inst.sets[l].begin(), inst.sets[l].end());
  }
  return out;
}

std::vector<KovInstance> kov_partition(const KovInstance& inst, std::uint32_t parts) {
  if (parts == 0 || inst.sets.empty() || inst.sets[0].size() % parts != 0)
    throw DimensionMismatch("parts must divide the size of set 0");
  const std::size_t rows = inst.sets[0].size() / parts;
  std::vector<KovInstance> out;
  out.reserve(parts);
  for (std::uint32_t p = 0; p < parts; ++p) {
    KovInstance part;
    part.k = inst.k;
    part.d = inst.d;
    part.sets.resize(inst.k);
    part.sets[0].assign(inst.sets[0].begin() + static_cast<std::ptrdiff_t>(p * rows),
                        inst.sets[0].begin() + static_cast<std::ptrdiff_t>((p + 1) * rows));
    for (std::uint32_t l = 1; l < inst.k; ++l) part.sets[l] = inst.sets[l];
    out.push_back(std::move(part));
  }
  return out;
}

KovProof kov_merge_partition_solutions(const std::vector<KovProof>& proofs,
                                       const std::vector<std::uint32_t>& part_sizes) {
  if (proofs.empty() || proofs.size() != part_sizes.size())
    throw DimensionMismatch("one proof per part required");
  KovProof merged;
  merged.k = proofs[0].k;
  merged.claimed_complete = true;
  std::uint32_t offset = 0;
  for (std::size_t p = 0; p < proofs.size(); ++p) {
    const KovProof& pr = proofs[p];
    if (pr.k != merged.k) throw DimensionMismatch("proofs disagree on k");
    merged.claimed_complete = merged.claimed_complete && pr.claimed_complete;
    for (std::size_t t = 0; t < pr.tuple_count(); ++t) {
      const std::uint32_t* tup = pr.tuple(t);
      merged.idx.push_back(tup[0] + offset);  // set-0 indices shift back into place
      for (std::uint32_t l = 1; l < pr.k; ++l) merged.idx.push_back(tup[l]);
    }
    offset += part_sizes[p];
  }
  return merged;
}

std::uint64_t kov_dimension_for_budget(double flops, double seconds) {
  if (!(flops > 0) || !(seconds > 0))
    throw std::invalid_argument("budget terms must be positive");
  const long double n = std::cbrt(static_cast<long double>(flops) * seconds);
  return static_cast<std::uint64_t>(std::floor(n));
}

KovInstance kov_random_instance(std::uint32_t k, std::uint32_t n, std::uint32_t d, Rng& rng,
                                double ones_density) {
  KovInstance inst;
  inst.k = k;
  inst.d = d;
  inst.sets.assign(k, {});
  for (std::uint32_t l = 0; l < k; ++l) {
    inst.sets[l].reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      BitVec v(d);
      for (std::uint32_t c = 0; c < d; ++c) v.set(c, rng.bernoulli(ones_density));
      inst.sets[l].push_back(std::move(v));
    }
  }
  return inst;
}

KovInstance kov_parse(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  };
  if (!next_line()) throw ParseError(1, "missing 'k n d' header");
  std::istringstream hdr(line);
  std::uint32_t k = 0, n = 0, d = 0;
  if (!(hdr >> k >> n >> d) || k < 2 || n == 0 || d == 0)
    throw ParseError(line_no, "header must be 'k n d' with k >= 2, n and d positive");
  KovInstance inst;
  inst.k = k;
  inst.d = d;
  inst.sets.assign(k, {});
  for (std::uint32_t l = 0; l < k; ++l) {
    for (std::uint32_t i = 0; i < n; ++i) {
      if (!next_line()) throw ParseError(line_no + 1, "expected " + std::to_string(k * n) + " vector lines");
      if (line.size() != d)
        throw ParseError(line_no, "vector line must have exactly " + std::to_string(d) + " characters");
      BitVec v(d);
      for (std::uint32_t c = 0; c < d; ++c) {
        if (line[c] != '0' && line[c] != '1')
          throw ParseError(line_no, "vector characters must be 0 or 1");
        v.set(c, line[c] == '1');
      }
      inst.sets[l].push_back(std::move(v));
    }
  }
  return inst;
}

std::string kov_serialize(const KovInstance& inst) {
  std::ostringstream out;
  out << inst.k << ' ' << inst.n() << ' ' << inst.d << '\n';
  for (const auto& set : inst.sets) {
    for (const auto& v : set) {
      for (std::uint32_t c = 0; c < inst.d; ++c) out << (v.get(c) ? '1' : '0');
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace puw::kov
