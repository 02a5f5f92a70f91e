#include "puw/task.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "puw/sha256.hpp"

namespace puw {

// ── hex helpers ─────────────────────────────────────────────────────────────

std::string to_hex(const std::uint8_t* p, std::size_t n) {
  static const char* digits = "0123456789abcdef";
  std::string s(n * 2, '0');
  for (std::size_t i = 0; i < n; ++i) {
    s[2 * i] = digits[p[i] >> 4];
    s[2 * i + 1] = digits[p[i] & 0xf];
  }
  return s;
}

static int hex_val(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::vector<std::uint8_t> from_hex(const std::string& s) {
  if (s.size() % 2 != 0) throw std::invalid_argument("hex string has odd length");
  std::vector<std::uint8_t> out(s.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = hex_val(s[2 * i]), lo = hex_val(s[2 * i + 1]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("invalid hex digit");
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

Digest digest_from_hex(const std::string& s) {
  auto v = from_hex(s);
  if (v.size() != 32) throw std::invalid_argument("digest hex must be 64 chars");
  Digest d{};
  std::copy(v.begin(), v.end(), d.begin());
  return d;
}

// ── rational ────────────────────────────────────────────────────────────────

Rational rational_approx(double x, std::uint64_t max_den) {
  if (!(x > 0) || !std::isfinite(x)) throw std::invalid_argument("rational_approx: x must be positive finite");
  // beyond the convergent loop's integer range: saturate to numerator/1
  if (x > 1e18) {
    const std::uint64_t num = x >= 1.8e19 ? UINT64_MAX : static_cast<std::uint64_t>(x);
    return Rational(num, 1);
  }
  // continued fraction expansion, tracking convergents
  std::uint64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double v = x;
  for (int it = 0; it < 64; ++it) {
    double fa = std::floor(v);
    if (fa > 1e18) break;
    std::uint64_t a = static_cast<std::uint64_t>(fa);
    // next convergent p2/q2 = a*p1 + p0 / a*q1 + q0, guarding overflow
    if (q1 != 0 && a > (max_den - q0) / q1) break;
    std::uint64_t p2 = a * p1 + p0;
    std::uint64_t q2 = a * q1 + q0;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    double frac = v - fa;
    if (frac < 1e-15) break;
    v = 1.0 / frac;
  }
  if (p1 == 0) p1 = 1;
  return Rational(p1, q1 == 0 ? 1 : q1);
}

Rational rational_mul(const Rational& a, const Rational& b) {
  // cross-reduce first so most products stay in 64 bits
  std::uint64_t g1 = std::gcd(a.num, b.den);
  std::uint64_t g2 = std::gcd(b.num, a.den);
  std::uint64_t n1 = a.num / g1, d2 = b.den / g1;
  std::uint64_t n2 = b.num / g2, d1 = a.den / g2;
  unsigned __int128 n = static_cast<unsigned __int128>(n1) * n2;
  unsigned __int128 d = static_cast<unsigned __int128>(d1) * d2;
  if (n <= UINT64_MAX && d <= UINT64_MAX) {
    return Rational(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(d));
  }
  return rational_approx(a.to_double() * b.to_double(), 1u << 20);
}

Rational rational_parse(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty rational");
  auto slash = text.find('/');
  auto parse_u64 = [](const std::string& s) -> std::uint64_t {
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); }))
      throw std::invalid_argument("expected unsigned integer, got '" + s + "'");
    return std::stoull(s);
  };
  if (slash != std::string::npos) {
    return Rational(parse_u64(text.substr(0, slash)), parse_u64(text.substr(slash + 1)));
  }
  auto dot = text.find('.');
  if (dot == std::string::npos) return Rational(parse_u64(text), 1);
  std::string frac = text.substr(dot + 1);
  if (frac.size() > 18) frac.resize(18);
  std::uint64_t den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  std::uint64_t whole = dot == 0 ? 0 : parse_u64(text.substr(0, dot));
  std::uint64_t num = whole * den + (frac.empty() ? 0 : parse_u64(frac));
  return Rational(num, den);
}

// ── task core ───────────────────────────────────────────────────────────────

const char* class_name(ClassId c) {
  switch (c) {
    case ClassId::Cryptopuzzle: return "cryptopuzzle";
    case ClassId::Kov: return "kov";
    case ClassId::Tsp: return "tsp";
  }
  return "?";
}

std::optional<ClassId> class_from_name(const std::string& name) {
  if (name == "cryptopuzzle") return ClassId::Cryptopuzzle;
  if (name == "kov") return ClassId::Kov;
  if (name == "tsp") return ClassId::Tsp;
  return std::nullopt;
}

std::vector<std::uint8_t> context_serialize(const BlockContext& ctx) {
  ByteWriter w;
  w.bytes(ctx.prev_block_id);
  w.bytes(ctx.payload_digest);
  w.u64be(ctx.height);
  w.u64be(ctx.timestamp);
  w.u64be(ctx.miner_id);
  w.u64be(ctx.extra_nonce);
  return w.data();
}

Digest context_digest(const BlockContext& ctx) { return sha256(context_serialize(ctx)); }

// ── supply selection ────────────────────────────────────────────────────────

std::size_t TaskSupplyState::select_index(const SelectionPolicy& policy,
                                          const Digest& ctx_digest) const {
  if (entries_.empty()) throw EmptySupply("task supply is empty");
  switch (policy.kind) {
    case SelectionPolicy::Kind::Fifo:
      return 0;
    case SelectionPolicy::Kind::UniformRandom: {
      Rng rng(get_u64_be(ctx_digest.data()));
      return static_cast<std::size_t>(rng.below(entries_.size()));
    }
    case SelectionPolicy::Kind::MinerChoice:
      return static_cast<std::size_t>(
          std::min<std::uint64_t>(policy.miner_choice_index, entries_.size() - 1));
  }
  return 0;
}

SupplyEntry TaskSupplyState::take(std::size_t index) {
  SupplyEntry e = std::move(entries_.at(index));
  entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(index));
  return e;
}

// ── dispatch ────────────────────────────────────────────────────────────────

BlockTask generate(ClassId class_id, TaskSupplyState& tss, const SelectionPolicy& policy,
                   const BlockContext& ctx, const Difficulty& diff, const GenerateOptions& opts) {
  BlockTask task;
  task.class_id = class_id;
  task.bound_context = context_digest(ctx);
  task.difficulty = diff;
  switch (class_id) {
    case ClassId::Cryptopuzzle: {
      task.payload = puzzle::puzzle_generate(task.bound_context, diff, opts.nonce_bits);
      return task;
    }
    case ClassId::Kov: {
      std::size_t i = tss.select_index(policy, task.bound_context);
      SupplyEntry e = tss.take(i);
      auto* inst = std::get_if<kov::KovInstance>(&e.instance);
      if (!inst) throw UnknownClass("supply entry is not a k-OV instance");
      KovTaskPayload p;
      p.instance = std::move(*inst);
      p.source_entry_ids.push_back(e.entry_id);
      task.payload = std::move(p);
      return task;
    }
    case ClassId::Tsp: {
      std::size_t i = tss.select_index(policy, task.bound_context);
      SupplyEntry e = tss.take(i);
      auto* inst = std::get_if<tsp::TspInstance>(&e.instance);
      if (!inst) throw UnknownClass("supply entry is not a TSP instance");
      TspTaskPayload p;
      p.source_entry_id = e.entry_id;
      tsp::TspTask t;
      // Threshold derives from the supplier's instance so a contextualized
      // task keeps the same bar (exact-mode transforms are isometric).
      t.t_d = tsp::tsp_derive_threshold(*inst, opts.tsp_alpha,
                                        get_u64_be(task.bound_context.data() + 8));
      if (opts.contextualize_tsp) {
        auto [moved, record] = tsp::tsp_contextualize(*inst, task.bound_context);
        t.instance = std::move(moved);
        t.transform = std::move(record);
      } else {
        t.instance = std::move(*inst);
      }
      t.bound_context = task.bound_context;
      p.task = std::move(t);
      task.payload = std::move(p);
      return task;
    }
  }
  throw UnknownClass("unknown task class id");
}

SolveOutcome solve(const BlockTask& task, std::uint64_t budget, std::uint64_t seed) {
  switch (task.class_id) {
    case ClassId::Cryptopuzzle:
      return puzzle::puzzle_solve(std::get<puzzle::PuzzleTask>(task.payload), seed, budget);
    case ClassId::Kov: {
      const auto& p = std::get<KovTaskPayload>(task.payload);
      std::uint64_t ops = 0;
      bool exhausted = false;
      kov::KovProof proof = kov::kov_solve(p.instance, seed, &ops, budget, &exhausted);
      if (exhausted) return SolveOutcome::exhausted(ops);
      ProofOfComputation poc;
      poc.class_id = ClassId::Kov;
      poc.solution_payload = kov::encode_proof(proof);
      poc.solve_stats.elapsed_ops = ops;
      return SolveOutcome::solved_with(std::move(poc));
    }
    case ClassId::Tsp: {
      const auto& p = std::get<TspTaskPayload>(task.payload);
      std::uint32_t restarts =
          budget > UINT32_MAX ? UINT32_MAX : static_cast<std::uint32_t>(budget);
      return tsp::tsp_solve(p.task, seed, restarts);
    }
  }
  throw UnknownClass("unknown task class id");
}

bool verify(const BlockTask& task, const ProofOfComputation& poc, const VerifyMode& mode) {
  if (poc.class_id != task.class_id)
    throw ClassMismatch(std::string("proof class ") + class_name(poc.class_id) +
                        " does not match task class " + class_name(task.class_id));
  switch (task.class_id) {
    case ClassId::Cryptopuzzle:
      return puzzle::puzzle_verify(std::get<puzzle::PuzzleTask>(task.payload),
                                   poc.solution_payload);
    case ClassId::Kov: {
      kov::KovProof proof;
      if (!kov::decode_proof(poc.solution_payload, proof)) return false;
      return kov::kov_verify(std::get<KovTaskPayload>(task.payload).instance, proof, mode);
    }
    case ClassId::Tsp:
      return tsp::tsp_verify(std::get<TspTaskPayload>(task.payload).task, poc.solution_payload);
  }
  throw UnknownClass("unknown task class id");
}

TaskSolution reconstruct(const ProofOfComputation& poc,
                         const std::optional<tsp::TspTransform>& transform_record) {
  TaskSolution sol;
  sol.class_id = poc.class_id;
  if (poc.class_id != ClassId::Tsp) {
    sol.payload = poc.solution_payload;  // identity: no context transform
    return sol;
  }
  if (!transform_record)
    throw MissingTransform("TSP proofs over contextualized instances need the inverse record");
  std::vector<std::uint32_t> order;
  if (!tsp::decode_tour(poc.solution_payload, order))
    throw InvalidProof("undecodable tour payload");
  sol.payload = tsp::encode_tour(tsp::tsp_reconstruct_order(order, *transform_record));
  return sol;
}

}  // namespace puw
