#include "puw/probe.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_map>

#include "puw/cryptopuzzle.hpp"
#include "puw/errors.hpp"
#include "puw/kov.hpp"
#include "puw/rng.hpp"
#include "puw/stats.hpp"
#include "puw/tsp.hpp"

namespace puw::probe {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "Pass";
    case Verdict::Fail: return "Fail";
    case Verdict::ReportOnly: return "ReportOnly";
  }
  return "?";
}

namespace {

std::string fmt_g(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

ProbeReport make_report(std::string property_id, std::string statistic, double value,
                        std::uint64_t n, double dispersion, Verdict verdict,
                        std::string note = "") {
  ProbeReport r;
  r.property_id = std::move(property_id);
  r.statistic = std::move(statistic);
  r.value = value;
  r.n = n;
  r.dispersion = dispersion;
  r.verdict = verdict;
  r.note = std::move(note);
  return r;
}

// delta-method standard error of a ratio of two sample means
double ratio_stderr(double ratio, const std::vector<double>& num, const std::vector<double>& den) {
  const double mn = stats::mean(num), md = stats::mean(den);
  if (mn == 0 || md == 0) return 0;
  const double vn = stats::variance(num), vd = stats::variance(den);
  const double n = static_cast<double>(num.size());
  return std::fabs(ratio) * std::sqrt(vn / (n * mn * mn) + vd / (n * md * md));
}

double cv_stderr(double cv, std::uint64_t n) {
  return cv * std::sqrt((0.5 + cv * cv) / static_cast<double>(n));
}

double binom_stderr(double p, std::uint64_t n) {
  return std::sqrt(std::max(p * (1 - p), 0.0) / static_cast<double>(n));
}

}  // namespace

std::string reports_to_csv(const std::vector<ProbeReport>& reports) {
  std::ostringstream o;
  o << "property_id,statistic,value,n,dispersion,verdict\n";
  for (const auto& r : reports) {
    o << r.property_id << ',' << r.statistic << ',' << fmt_g(r.value) << ',' << r.n << ','
      << fmt_g(r.dispersion) << ',' << verdict_name(r.verdict) << "\n";
  }
  return o.str();
}

std::string reports_to_summary(const std::vector<ProbeReport>& reports) {
  std::ostringstream o;
  char buf[512];
  std::snprintf(buf, sizeof buf, "%-32s %-36s %14s %8s %12s %-10s %s\n", "property_id",
                "statistic", "value", "n", "dispersion", "verdict", "note");
  o << buf;
  o << std::string(130, '-') << "\n";
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof buf, "%-32s %-36s %14.6g %8llu %12.4g %-10s %s\n",
                  r.property_id.c_str(), r.statistic.c_str(), r.value,
                  static_cast<unsigned long long>(r.n), r.dispersion, verdict_name(r.verdict),
                  r.note.c_str());
    o << buf;
  }
  return o.str();
}

// ── trace probes ─────────────────────────────────────────────────────────────

std::vector<ProbeReport> probe_interblock(const sim::EventTrace& trace) {
  const std::uint64_t height = trace.appended_height();
  if (height < 500)
    throw InsufficientData("interblock probe needs >= 500 appended blocks, got " +
                           std::to_string(height));
  std::vector<double> gaps;
  gaps.reserve(height);
  double prev = 0;
  for (std::size_t i = 1; i < trace.main_chain.size(); ++i) {
    const double t = trace.blocks.at(trace.main_chain[i]).t_proposed;
    gaps.push_back(t - prev);
    prev = t;
  }
  const double m = stats::mean(gaps);
  const double cv = stats::coefficient_of_variation(gaps);
  const stats::KsResult ks = stats::ks_exponential_fit(gaps);
  const bool crypto = trace.scenario.task_class == ClassId::Cryptopuzzle;

  std::vector<ProbeReport> out;
  out.push_back(make_report(
      "bpp.rate", "interblock_mean_s", m, gaps.size(), stats::stderr_of_mean(gaps),
      Verdict::ReportOnly,
      "target_interblock_s=" + std::to_string(trace.scenario.target_interblock_s)));

  Verdict vcv = Verdict::ReportOnly;
  std::string ncv = "pass band [0.9,1.1] applies to cryptopuzzle scenarios";
  if (crypto) {
    vcv = (cv >= 0.9 && cv <= 1.1) ? Verdict::Pass : Verdict::Fail;
    ncv = "pass band [0.9,1.1]";
  } else if (cv < 0.05) {
    ncv = "low_variability: near-deterministic solve times";
  }
  out.push_back(make_report("bpp.rate", "interblock_cv", cv, gaps.size(), cv_stderr(cv, gaps.size()),
                            vcv, ncv));

  Verdict vks = Verdict::ReportOnly;
  if (crypto) vks = ks.p_value > 0.01 ? Verdict::Pass : Verdict::Fail;
  out.push_back(make_report("bpp.rate", "interblock_ks_stat", ks.statistic, ks.n, ks.p_value, vks,
                            "dispersion column carries the KS p-value; pass requires p > 0.01"));
  return out;
}

std::vector<ProbeReport> probe_fork_rate(const sim::EventTrace& trace) {
  const std::uint64_t proposed = trace.proposed_count();
  const std::uint64_t appended = trace.appended_height();
  const std::uint64_t orphans = proposed > appended ? proposed - appended : 0;
  const double rate = appended == 0 ? 0.0 : static_cast<double>(orphans) / appended;
  const double disp =
      appended == 0 ? 0.0 : std::sqrt(static_cast<double>(orphans)) / appended;
  return {make_report("backbone.common_prefix", "fork_rate", rate, proposed, disp,
                      Verdict::ReportOnly,
                      "orphans=" + std::to_string(orphans) +
                          ";appended=" + std::to_string(appended))};
}

namespace {

// height of the deepest common ancestor of two blocks, via the trace registry
std::uint64_t common_ancestor_height(const sim::EventTrace& trace, std::string a, std::string b) {
  const auto height = [&](const std::string& id) { return trace.blocks.at(id).height; };
  const auto parent = [&](const std::string& id) -> const std::string& {
    return trace.blocks.at(id).parent;
  };
  std::uint64_t ha = height(a), hb = height(b);
  while (ha > hb) {
    a = parent(a);
    --ha;
  }
  while (hb > ha) {
    b = parent(b);
    --hb;
  }
  while (a != b) {
    a = parent(a);
    b = parent(b);
    --ha;
  }
  return ha;
}

}  // namespace

std::vector<ProbeReport> probe_common_prefix(const sim::EventTrace& trace, std::uint64_t T) {
  // honest miners' chain views, replayed from the event log
  std::map<std::uint64_t, sim::ChainState> views;
  std::unordered_map<std::uint64_t, sim::Strategy> strategy;
  for (const auto& m : trace.scenario.miners) {
    strategy[m.id] = m.strategy;
    if (m.honesty == sim::Honesty::Honest) views.emplace(m.id, sim::ChainState{});
  }

  std::uint64_t instants = 0, violations = 0, self_violations = 0, max_divergence = 0;
  for (const auto& e : trace.events) {
    if (e.kind != sim::EventKind::BlockProposed && e.kind != sim::EventKind::BlockReceived)
      continue;
    const auto vit = views.find(static_cast<std::uint64_t>(e.miner));
    if (vit == views.end()) continue;  // adversarial view: out of scope
    if (e.kind == sim::EventKind::BlockReceived &&
        strategy[static_cast<std::uint64_t>(e.miner)] == sim::Strategy::Stubborn)
      continue;  // stubborn nodes ignore incoming blocks
    sim::ChainState& view = vit->second;
    const std::string old_head = view.head();
    view.apply_block(e.block_id, e.parent_id);
    const std::string& new_head = view.head();
    if (new_head != old_head && trace.blocks.at(new_head).parent != old_head) {
      // this node reorganized its own history
      const std::uint64_t ca = common_ancestor_height(trace, old_head, new_head);
      const std::uint64_t depth = trace.blocks.at(old_head).height - ca;
      if (depth > T) ++self_violations;
    }
    ++instants;
    bool bad = false;
    for (const auto& [other_id, other] : views) {
      if (other_id == static_cast<std::uint64_t>(e.miner)) continue;
      const std::uint64_t ca = common_ancestor_height(trace, view.head(), other.head());
      const std::uint64_t ha = trace.blocks.at(view.head()).height;
      const std::uint64_t hb = trace.blocks.at(other.head()).height;
      max_divergence = std::max({max_divergence, ha - ca, hb - ca});
      if (ha > ca + T || hb > ca + T) bad = true;
    }
    if (bad) ++violations;
  }

  std::vector<ProbeReport> out;
  out.push_back(make_report("backbone.common_prefix", "common_prefix_violations",
                            static_cast<double>(violations), instants, 0, Verdict::ReportOnly,
                            "truncation_depth=" + std::to_string(T) +
                                ";max_divergence=" + std::to_string(max_divergence)));
  out.push_back(make_report("backbone.future_self_consistency", "self_divergence_violations",
                            static_cast<double>(self_violations), instants, 0,
                            Verdict::ReportOnly,
                            "reorganizations deeper than " + std::to_string(T) +
                                " on one node's own history"));
  return out;
}

std::vector<ProbeReport> probe_chain_quality(const sim::EventTrace& trace, std::uint64_t T) {
  std::unordered_map<std::uint64_t, bool> honest;
  for (const auto& m : trace.scenario.miners) honest[m.id] = m.honesty == sim::Honesty::Honest;
  std::vector<double> flags;
  for (std::size_t i = 1; i < trace.main_chain.size(); ++i) {
    const auto& rec = trace.blocks.at(trace.main_chain[i]);
    const auto it = honest.find(static_cast<std::uint64_t>(rec.proposer));
    flags.push_back(it != honest.end() && it->second ? 1.0 : 0.0);
  }
  std::vector<ProbeReport> out;
  if (flags.empty()) {
    out.push_back(make_report("backbone.chain_quality", "honest_fraction", 0, 0, 0,
                              Verdict::ReportOnly, "empty chain"));
    return out;
  }
  const double mu = stats::mean(flags);
  out.push_back(make_report("backbone.chain_quality", "honest_fraction", mu, flags.size(),
                            binom_stderr(mu, flags.size()), Verdict::ReportOnly,
                            "fraction of canonical-chain blocks from honest miners"));

  const std::size_t w = static_cast<std::size_t>(std::min<std::uint64_t>(T, flags.size()));
  double sum = 0;
  for (std::size_t i = 0; i < w; ++i) sum += flags[i];
  double min_frac = sum / static_cast<double>(w);
  for (std::size_t i = w; i < flags.size(); ++i) {
    sum += flags[i] - flags[i - w];
    min_frac = std::min(min_frac, sum / static_cast<double>(w));
  }
  const std::uint64_t windows = flags.size() - w + 1;
  out.push_back(make_report("backbone.chain_quality", "min_window_honest_fraction", min_frac,
                            windows, 0, Verdict::ReportOnly,
                            "window=" + std::to_string(w) + " blocks"));
  return out;
}

std::vector<ProbeReport> probe_chain_growth(const sim::EventTrace& trace) {
  std::vector<ProbeReport> out;
  const std::uint64_t height = trace.appended_height();
  const double t_tip =
      height == 0 ? 0.0 : trace.blocks.at(trace.main_chain.back()).t_proposed;
  const double overall = t_tip > 0 ? static_cast<double>(height) / t_tip : 0.0;
  out.push_back(make_report("backbone.chain_growth", "growth_blocks_per_s", overall, height,
                            height > 0 ? overall / std::sqrt(static_cast<double>(height)) : 0.0,
                            Verdict::ReportOnly, "whole-run average"));

  double t_retarget = -1;
  for (const auto& e : trace.events) {
    if (e.kind == sim::EventKind::DifficultyRetargeted) {
      t_retarget = e.t;
      break;
    }
  }
  if (t_retarget < 0) {
    out.push_back(make_report("backbone.chain_growth", "growth_after_first_retarget", 0, 0, 0,
                              Verdict::ReportOnly, "no DifficultyRetargeted event in trace"));
    return out;
  }
  std::size_t start = 0;  // deepest main-chain block proposed by the first retarget
  for (std::size_t i = 1; i < trace.main_chain.size(); ++i) {
    if (trace.blocks.at(trace.main_chain[i]).t_proposed <= t_retarget) start = i;
  }
  const std::uint64_t n_after = height - start;
  const double t_start = trace.blocks.at(trace.main_chain[start]).t_proposed;
  const double dt = t_tip - t_start;
  if (n_after < 2 || dt <= 0) {
    out.push_back(make_report("backbone.chain_growth", "growth_after_first_retarget", 0, n_after,
                              0, Verdict::ReportOnly, "insufficient post-retarget span"));
    return out;
  }
  const double growth = static_cast<double>(n_after) / dt;
  const double target_rate = 1.0 / static_cast<double>(trace.scenario.target_interblock_s);
  const double ratio = growth / target_rate;
  const Verdict v = (ratio >= 0.9 && ratio <= 1.1) ? Verdict::Pass : Verdict::Fail;
  out.push_back(make_report("backbone.chain_growth", "growth_after_first_retarget", growth,
                            n_after, growth / std::sqrt(static_cast<double>(n_after)), v,
                            "target_rate=" + fmt_g(target_rate) + ";ratio=" + fmt_g(ratio)));
  return out;
}

std::vector<ProbeReport> probe_fairness(const sim::EventTrace& trace) {
  const std::uint64_t height = trace.appended_height();
  if (height < 2000)
    throw InsufficientData("fairness probe needs >= 2000 blocks, got " + std::to_string(height));
  std::vector<double> distinct;
  double total_power = 0;
  for (const auto& m : trace.scenario.miners) {
    total_power += m.power;
    if (std::find(distinct.begin(), distinct.end(), m.power) == distinct.end())
      distinct.push_back(m.power);
  }
  if (distinct.size() < 3)
    throw InsufficientData("fairness probe needs >= 3 distinct power levels, got " +
                           std::to_string(distinct.size()));

  const auto tally = sim::reward_tally(trace);
  std::vector<double> power_share, chain_share;
  std::uint64_t excluded = 0;
  double top_share = 0;
  for (const auto& m : trace.scenario.miners) {
    const double share =
        static_cast<double>(tally.at(m.id)) / static_cast<double>(height);
    top_share = std::max(top_share, share);
    if (share <= 0) {
      ++excluded;
      continue;
    }
    power_share.push_back(m.power / total_power);
    chain_share.push_back(share);
  }
  if (power_share.size() < 3)
    throw InsufficientData("fairness probe needs >= 3 miners with non-zero chain share");

  const stats::LinFit fit = stats::loglog_fit(power_share, chain_share);
  const bool crypto = trace.scenario.task_class == ClassId::Cryptopuzzle;
  Verdict v = Verdict::ReportOnly;
  if (crypto) v = (fit.slope >= 0.9 && fit.slope <= 1.1) ? Verdict::Pass : Verdict::Fail;

  std::vector<ProbeReport> out;
  out.push_back(make_report("bpp.fairness", "loglog_share_slope", fit.slope, power_share.size(),
                            fit.stderr_slope, v,
                            "r2=" + fmt_g(fit.r2) +
                                ";zero_share_miners_excluded=" + std::to_string(excluded)));
  out.push_back(make_report("bpp.fairness", "top_miner_share", top_share, height,
                            binom_stderr(top_share, height), Verdict::ReportOnly,
                            "largest single-miner share of the canonical chain"));
  return out;
}

// ── backend micro-probes ─────────────────────────────────────────────────────

namespace {

Digest probe_random_digest(Rng& rng) {
  Digest d{};
  for (int i = 0; i < 4; ++i) put_u64_be(d.data() + 8 * i, rng.next_u64());
  return d;
}

struct CryptoSolveResult {
  std::uint64_t ops = 0;
  puzzle::PuzzleTask task;
  std::vector<std::uint8_t> payload;
};

// Full solve including context variation after nonce-space exhaustion, so the
// op count is one complete geometric sample.
CryptoSolveResult crypto_full_solve(Rng& rng, const Difficulty& diff, int nonce_bits) {
  CryptoSolveResult r;
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const Digest dig = probe_random_digest(rng);
    r.task = puzzle::puzzle_generate(dig, diff, nonce_bits);
    const SolveOutcome out = puzzle::puzzle_solve(r.task, 0);
    r.ops += out.elapsed_ops;
    if (out.solved()) {
      r.payload = out.poc->solution_payload;
      return r;
    }
  }
  throw Error("cryptopuzzle solve failed to converge");
}

tsp::TspTask tsp_probe_task(Rng& rng, const MicroShape& shape, tsp::TspInstance* out_inst) {
  const tsp::TspInstance inst = tsp::tsp_random_instance(shape.tsp_cities, 1000.0, rng);
  tsp::TspTask task;
  task.t_d = tsp::tsp_derive_threshold(inst, shape.tsp_alpha, rng.next_u64());
  task.instance = inst;
  if (out_inst) *out_inst = inst;
  return task;
}

}  // namespace

std::vector<ProbeReport> probe_variability(ClassId cls, const Difficulty& diff,
                                           std::uint64_t trials, std::uint64_t seed,
                                           const MicroShape& shape) {
  if (trials < 100)
    throw InsufficientData("variability probe needs >= 100 trials, got " +
                           std::to_string(trials));
  Rng rng(seed_combine(seed, tag_from_name("probe.variability")));
  std::vector<double> ops;
  ops.reserve(trials);
  std::uint64_t solved = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    switch (cls) {
      case ClassId::Cryptopuzzle: {
        ops.push_back(static_cast<double>(crypto_full_solve(rng, diff, shape.nonce_bits).ops));
        ++solved;
        break;
      }
      case ClassId::Kov: {
        const auto inst =
            kov::kov_random_instance(shape.kov_k, shape.kov_n, shape.kov_d, rng);
        std::uint64_t o = 0;
        kov::kov_solve(inst, 0, &o);
        ops.push_back(static_cast<double>(o));
        ++solved;
        break;
      }
      case ClassId::Tsp: {
        const tsp::TspTask task = tsp_probe_task(rng, shape, nullptr);
        const SolveOutcome out = tsp::tsp_solve(task, rng.next_u64(), shape.tsp_restarts);
        ops.push_back(static_cast<double>(out.elapsed_ops));
        if (out.solved()) ++solved;
        break;
      }
    }
  }
  const double m = stats::mean(ops);
  const double cv = stats::coefficient_of_variation(ops);
  std::string note = "solved=" + std::to_string(solved) + "/" + std::to_string(trials);
  if (cls == ClassId::Kov && cv < 0.05) note += ";low_variability: enumeration op count is fixed by shape";
  std::vector<ProbeReport> out;
  out.push_back(make_report("btp.variability", "solve_ops_mean", m, trials,
                            stats::stderr_of_mean(ops), Verdict::ReportOnly, note));
  out.push_back(make_report("btp.variability", "solve_ops_cv", cv, trials,
                            cv_stderr(cv, trials), Verdict::ReportOnly, note));
  return out;
}

std::vector<ProbeReport> probe_amortization(ClassId cls, double overlap_fraction,
                                            std::uint64_t trials, std::uint64_t seed,
                                            const MicroShape& shape) {
  if (cls != ClassId::Cryptopuzzle && cls != ClassId::Kov)
    throw UnknownClass("amortization probe covers cryptopuzzle and k-OV");
  if (overlap_fraction < 0 || overlap_fraction > 1)
    throw std::invalid_argument("overlap_fraction must be in [0,1]");
  Rng rng(seed_combine(seed, tag_from_name("probe.amortization")));
  std::vector<double> cold, warm;
  cold.reserve(trials);
  warm.reserve(trials);

  for (std::uint64_t t = 0; t < trials; ++t) {
    if (cls == ClassId::Cryptopuzzle) {
      // warm arm: a context sharing a digest prefix with an earlier one. Hash
      // preimage structure cannot be reused, so the arms should match.
      const Digest a = probe_random_digest(rng);
      Digest b = a;
      const std::size_t shared =
          static_cast<std::size_t>(std::llround(overlap_fraction * 32.0));
      for (std::size_t i = shared; i < 32; ++i)
        b[i] = static_cast<std::uint8_t>(rng.next_u64() & 0xff);
      // cold sample: fully fresh context
      cold.push_back(static_cast<double>(
          crypto_full_solve(rng, Difficulty(1, 1), shape.nonce_bits).ops));
      // warm sample: prefix-shared context (solved "after" A)
      puzzle::PuzzleTask tb = puzzle::puzzle_generate(b, Difficulty(1, 1), shape.nonce_bits);
      std::uint64_t wops = 0;
      for (int attempt = 0; attempt < 100000; ++attempt) {
        const SolveOutcome out = puzzle::puzzle_solve(tb, 0);
        wops += out.elapsed_ops;
        if (out.solved()) break;
        tb = puzzle::puzzle_generate(probe_random_digest(rng), Difficulty(1, 1),
                                     shape.nonce_bits);
      }
      warm.push_back(static_cast<double>(wops));
    } else {
      const std::uint32_t shared_rows =
          static_cast<std::uint32_t>(overlap_fraction * shape.kov_n);
      const auto a = kov::kov_random_instance(shape.kov_k, shape.kov_n, shape.kov_d, rng);
      auto b = kov::kov_random_instance(shape.kov_k, shape.kov_n, shape.kov_d, rng);
      for (std::uint32_t s = 0; s < shape.kov_k; ++s)
        for (std::uint32_t i = 0; i < shared_rows; ++i) b.sets[s][i] = a.sets[s][i];
      std::uint64_t cold_ops = 0;
      kov::kov_solve(b, 0, &cold_ops);
      cold.push_back(static_cast<double>(cold_ops));
      kov::MemoCache cache;
      std::uint64_t prime_ops = 0, warm_ops = 0;
      kov::kov_solve_memo(a, cache, &prime_ops);
      kov::kov_solve_memo(b, cache, &warm_ops);
      warm.push_back(static_cast<double>(warm_ops));
    }
  }

  const double ratio = stats::mean(cold) / stats::mean(warm);
  const double se = ratio_stderr(ratio, cold, warm);
  Verdict v = Verdict::ReportOnly;
  std::string note = "overlap=" + fmt_g(overlap_fraction);
  if (cls == ClassId::Cryptopuzzle) {
    v = (ratio >= 0.95 && ratio <= 1.05) ? Verdict::Pass : Verdict::Fail;
    note += ";pass band [0.95,1.05]: hashing is memoryless";
  } else {
    note += ratio > 1.2 ? ";structural reuse detected (memo cache)" : ";no significant reuse";
  }
  return {make_report("btp.non_amortizability", "cold_warm_ratio", ratio, trials, se, v, note)};
}

std::vector<ProbeReport> probe_switchability(ClassId cls, const Difficulty& diff,
                                             double elapsed_fraction, std::uint64_t trials,
                                             std::uint64_t seed, const MicroShape& shape) {
  if (!(elapsed_fraction >= 0 && elapsed_fraction < 1))
    throw std::invalid_argument("elapsed_fraction must be in [0,1)");
  if (cls == ClassId::Tsp)
    throw UnknownClass("switchability probe covers cryptopuzzle and k-OV");
  Rng rng(seed_combine(seed, tag_from_name("probe.switchability")));
  std::vector<double> rem_switch, rem_continue;
  rem_switch.reserve(trials);
  rem_continue.reserve(trials);

  if (cls == ClassId::Cryptopuzzle) {
    const double mean_ops = diff.to_double() * std::ldexp(1.0, shape.nonce_bits);
    const std::uint64_t elapsed = static_cast<std::uint64_t>(elapsed_fraction * mean_ops);
    for (std::uint64_t t = 0; t < trials; ++t)
      rem_switch.push_back(
          static_cast<double>(crypto_full_solve(rng, diff, shape.nonce_bits).ops));
    // conditional sampling: keep full solves that exceed the elapsed work
    std::uint64_t guard = 0;
    while (rem_continue.size() < trials) {
      if (++guard > 200 * trials)
        throw Error("conditional sampling failed to accept enough solves");
      const std::uint64_t ops = crypto_full_solve(rng, diff, shape.nonce_bits).ops;
      if (ops > elapsed) rem_continue.push_back(static_cast<double>(ops - elapsed));
    }
  } else {
    for (std::uint64_t t = 0; t < trials; ++t) {
      const auto inst = kov::kov_random_instance(shape.kov_k, shape.kov_n, shape.kov_d, rng);
      std::uint64_t full = 0;
      kov::kov_solve(inst, 0, &full);
      const std::uint64_t budget =
          static_cast<std::uint64_t>(elapsed_fraction * static_cast<double>(full));
      std::uint64_t done = 0;
      bool exhausted = false;
      kov::kov_solve(inst, 0, &done, budget, &exhausted);
      rem_continue.push_back(static_cast<double>(full - done));
      const auto fresh = kov::kov_random_instance(shape.kov_k, shape.kov_n, shape.kov_d, rng);
      std::uint64_t fresh_full = 0;
      kov::kov_solve(fresh, 0, &fresh_full);
      rem_switch.push_back(static_cast<double>(fresh_full));
    }
  }

  const double mean_full = stats::mean(rem_switch);
  const double penalty = (stats::mean(rem_switch) - stats::mean(rem_continue)) / mean_full;
  const double se = std::sqrt(stats::variance(rem_switch) / static_cast<double>(trials) +
                              stats::variance(rem_continue) / static_cast<double>(trials)) /
                    mean_full;
  Verdict v = Verdict::ReportOnly;
  std::string note = "elapsed_fraction=" + fmt_g(elapsed_fraction) +
                     ";units: fraction of a mean full solve";
  if (cls == ClassId::Cryptopuzzle) {
    v = std::fabs(penalty) <= 2 * se ? Verdict::Pass : Verdict::Fail;
    note += ";memorylessness predicts 0";
  } else {
    note += ";deterministic enumeration predicts the elapsed fraction";
  }
  return {make_report("btp.switch_solution_time", "switch_penalty_fraction", penalty, trials, se,
                      v, note)};
}

std::vector<ProbeReport> probe_verification_ratio(ClassId cls, const Difficulty& diff,
                                                  std::uint64_t trials, std::uint64_t seed,
                                                  const MicroShape& shape) {
  if (trials < 20)
    throw InsufficientData("verification-ratio probe needs >= 20 trials, got " +
                           std::to_string(trials));
  Rng rng(seed_combine(seed, tag_from_name("probe.verification_ratio")));
  std::vector<double> solve_ops, verify_ops, verify_spot_ops;
  std::uint64_t solved = 0;

  for (std::uint64_t t = 0; t < trials; ++t) {
    switch (cls) {
      case ClassId::Cryptopuzzle: {
        const CryptoSolveResult r = crypto_full_solve(rng, diff, shape.nonce_bits);
        std::uint64_t vo = 0;
        if (!puzzle::puzzle_verify(r.task, r.payload, &vo))
          throw Error("fresh cryptopuzzle proof failed verification");
        solve_ops.push_back(static_cast<double>(r.ops));
        verify_ops.push_back(static_cast<double>(vo));
        ++solved;
        break;
      }
      case ClassId::Kov: {
        // lower ones-density so instances carry a non-trivial orthogonal set
        // and the spot-check has tuples to sample
        const auto inst =
            kov::kov_random_instance(shape.kov_k, shape.kov_n, shape.kov_d, rng, 0.2);
        std::uint64_t so = 0;
        const kov::KovProof proof = kov::kov_solve(inst, 0, &so);
        std::uint64_t vf = 0, vs = 0;
        if (!kov::kov_verify(inst, proof, VerifyMode::full(), &vf))
          throw Error("fresh k-OV proof failed Full verification");
        if (!kov::kov_verify(inst, proof, VerifyMode::spot_check(0.1, rng.next_u64()), &vs))
          throw Error("fresh k-OV proof failed SpotCheck verification");
        solve_ops.push_back(static_cast<double>(so));
        verify_ops.push_back(static_cast<double>(vf));
        verify_spot_ops.push_back(static_cast<double>(vs));
        ++solved;
        break;
      }
      case ClassId::Tsp: {
        const tsp::TspTask task = tsp_probe_task(rng, shape, nullptr);
        const SolveOutcome out = tsp::tsp_solve(task, rng.next_u64(), shape.tsp_restarts);
        if (!out.solved()) break;  // ratio uses verifiable solves only
        std::uint64_t vo = 0;
        if (!tsp::tsp_verify(task, out.poc->solution_payload, &vo))
          throw Error("fresh tour failed verification");
        solve_ops.push_back(static_cast<double>(out.elapsed_ops));
        verify_ops.push_back(static_cast<double>(vo));
        ++solved;
        break;
      }
    }
  }
  if (solve_ops.size() < 2)
    throw InsufficientData("verification-ratio probe collected too few solved instances");

  std::vector<ProbeReport> out;
  const double ratio = stats::mean(verify_ops) / stats::mean(solve_ops);
  const std::string note = "solved=" + std::to_string(solved) + "/" + std::to_string(trials);
  const std::string stat =
      cls == ClassId::Kov ? "verify_full_over_solve_ops" : "verify_over_solve_ops";
  out.push_back(make_report("btp.verification_efficiency", stat, ratio, solve_ops.size(),
                            ratio_stderr(ratio, verify_ops, solve_ops), Verdict::ReportOnly,
                            note));
  if (cls == ClassId::Kov) {
    const double spot = stats::mean(verify_spot_ops) / stats::mean(solve_ops);
    out.push_back(make_report("btp.verification_efficiency", "verify_spotcheck_over_solve_ops",
                              spot, solve_ops.size(),
                              ratio_stderr(spot, verify_spot_ops, solve_ops),
                              Verdict::ReportOnly,
                              "SpotCheck(0.1): cheaper but incomplete (soundness trade-off)"));
  }
  return out;
}

std::vector<ProbeReport> probe_soundness_completeness(ClassId cls, std::uint64_t trials,
                                                      std::uint64_t seed,
                                                      const MicroShape& shape) {
  if (trials < 100)
    throw InsufficientData("soundness probe needs >= 100 trials, got " + std::to_string(trials));
  Rng rng(seed_combine(seed, tag_from_name("probe.soundness")));
  std::uint64_t false_accept = 0, false_reject = 0;

  for (std::uint64_t t = 0; t < trials; ++t) {
    switch (cls) {
      case ClassId::Cryptopuzzle: {
        const CryptoSolveResult r = crypto_full_solve(rng, Difficulty(1, 1), shape.nonce_bits);
        if (!puzzle::puzzle_verify(r.task, r.payload)) ++false_reject;
        // mutate to a nonce known to miss the target (checked against the raw
        // hash predicate, independent of the verifier's decode path)
        const std::uint64_t nonce =
            puzzle::decode_nonce(r.payload, shape.nonce_bits).value();
        const std::uint64_t space = 1ULL << shape.nonce_bits;
        for (std::uint64_t delta = 1; delta < space; ++delta) {
          const std::uint64_t cand = (nonce + delta) % space;
          const Digest h = puzzle::puzzle_hash(r.task.bound_context, cand);
          if (compare_digests(h, r.task.target) > 0) {
            if (puzzle::puzzle_verify(r.task, puzzle::encode_nonce(cand))) ++false_accept;
            break;
          }
        }
        break;
      }
      case ClassId::Kov: {
        // lower ones-density yields populated proofs, exercising every
        // mutation strategy rather than only the empty-proof path
        const auto inst =
            kov::kov_random_instance(shape.kov_k, shape.kov_n, shape.kov_d, rng, 0.2);
        kov::KovProof proof = kov::kov_solve(inst, 0);
        if (!kov::kov_verify(inst, proof, VerifyMode::full())) ++false_reject;
        kov::KovProof bad = proof;
        const std::uint64_t kind = rng.below(3);
        if (kind == 0 && bad.tuple_count() > 0) {
          // replace one listed tuple with a known non-orthogonal tuple
          const std::size_t at = static_cast<std::size_t>(rng.below(bad.tuple_count()));
          bool found = false;
          for (int tries = 0; tries < 256 && !found; ++tries) {
            std::vector<std::uint32_t> cand(bad.k);
            for (std::uint32_t c = 0; c < bad.k; ++c)
              cand[c] = static_cast<std::uint32_t>(rng.below(inst.sets[c].size()));
            if (!kov::tuple_orthogonal(inst, cand.data())) {
              for (std::uint32_t c = 0; c < bad.k; ++c) bad.idx[at * bad.k + c] = cand[c];
              found = true;
            }
          }
          if (!found) bad.idx[at * bad.k] = inst.n();  // out of range instead
        } else if (kind == 1) {
          // append an out-of-range tuple
          for (std::uint32_t c = 0; c < bad.k; ++c)
            bad.idx.push_back(c == 0 ? inst.n() : 0);
        } else {
          // break the completeness claim
          if (bad.tuple_count() > 0) {
            bad.idx.resize(bad.idx.size() - bad.k);  // drop a tuple, keep the claim
            bad.claimed_complete = true;
          } else {
            // claim an extra non-orthogonal tuple on an empty solution set
            bool appended = false;
            for (int tries = 0; tries < 256 && !appended; ++tries) {
              std::vector<std::uint32_t> cand(bad.k);
              for (std::uint32_t c = 0; c < bad.k; ++c)
                cand[c] = static_cast<std::uint32_t>(rng.below(inst.sets[c].size()));
              if (!kov::tuple_orthogonal(inst, cand.data())) {
                bad.idx = cand;
                appended = true;
              }
            }
            if (!appended) bad.idx.assign(bad.k, inst.n());
          }
        }
        if (kov::kov_verify(inst, bad, VerifyMode::full())) ++false_accept;
        break;
      }
      case ClassId::Tsp: {
        SolveOutcome out = SolveOutcome::exhausted(0);
        tsp::TspTask task;
        for (int attempt = 0; attempt < 32 && !out.solved(); ++attempt) {
          task = tsp_probe_task(rng, shape, nullptr);
          out = tsp::tsp_solve(task, rng.next_u64(), shape.tsp_restarts);
        }
        if (!out.solved()) throw Error("could not produce a valid tour for the soundness suite");
        const std::vector<std::uint8_t>& payload = out.poc->solution_payload;
        if (!tsp::tsp_verify(task, payload)) ++false_reject;
        std::vector<std::uint32_t> order;
        tsp::decode_tour(payload, order);
        bool mutated = false;
        for (int tries = 0; tries < 64 && !mutated; ++tries) {
          std::vector<std::uint32_t> cand = order;
          const std::size_t i = static_cast<std::size_t>(rng.below(cand.size()));
          const std::size_t j = static_cast<std::size_t>(rng.below(cand.size()));
          if (i == j) continue;
          std::swap(cand[i], cand[j]);
          if (tsp::tour_cost(task.instance, cand) > task.t_d) {
            if (tsp::tsp_verify(task, tsp::encode_tour(cand))) ++false_accept;
            mutated = true;
          }
        }
        if (!mutated) {
          // every swap stayed under threshold: break the permutation instead
          std::vector<std::uint32_t> cand = order;
          cand[0] = cand[1];
          if (tsp::tsp_verify(task, tsp::encode_tour(cand))) ++false_accept;
        }
        break;
      }
    }
  }

  const double fa = static_cast<double>(false_accept) / static_cast<double>(trials);
  const double fr = static_cast<double>(false_reject) / static_cast<double>(trials);
  std::vector<ProbeReport> out;
  out.push_back(make_report("btp.verification_soundness", "full_false_accept_rate", fa, trials,
                            binom_stderr(fa, trials),
                            false_accept == 0 ? Verdict::Pass : Verdict::Fail,
                            "mutants checked against the raw task predicate"));
  out.push_back(make_report("btp.verification_completeness", "full_false_reject_rate", fr, trials,
                            binom_stderr(fr, trials),
                            false_reject == 0 ? Verdict::Pass : Verdict::Fail,
                            "round-trip of freshly solved proofs"));

  if (cls == ClassId::Kov) {
    // crafted miss-rate experiment: 100 claimed tuples, exactly one bad
    kov::KovInstance inst;
    inst.k = 2;
    inst.d = shape.kov_d;
    inst.sets.assign(2, std::vector<kov::BitVec>(10, kov::BitVec(shape.kov_d)));
    for (std::uint32_t c = 0; c < shape.kov_d; ++c) {
      inst.sets[0][0].set(c, true);  // (0,0) is the only non-orthogonal tuple
      inst.sets[1][0].set(c, true);
    }
    kov::KovProof crafted;
    crafted.k = 2;
    crafted.claimed_complete = false;
    for (std::uint32_t i = 0; i < 10; ++i)
      for (std::uint32_t j = 0; j < 10; ++j) {
        crafted.idx.push_back(i);
        crafted.idx.push_back(j);
      }
    std::uint64_t missed = 0;
    for (std::uint64_t t = 0; t < trials; ++t)
      if (kov::kov_verify(inst, crafted, VerifyMode::spot_check(0.1, rng.next_u64()))) ++missed;
    const double miss = static_cast<double>(missed) / static_cast<double>(trials);
    out.push_back(make_report("btp.verification_soundness", "spotcheck_miss_rate_1bad_in_100",
                              miss, trials, binom_stderr(miss, trials), Verdict::ReportOnly,
                              "SpotCheck(0.1); hypergeometric expectation 0.9"));
  }
  return out;
}

// ── coverage ─────────────────────────────────────────────────────────────────

const std::vector<CoverageRow>& coverage_manifest() {
  static const std::vector<CoverageRow> rows = {
      // proposal-level properties
      {"bpp.rate", "Limited proposal rate", {"probe_interblock", "probe_chain_growth"}, ""},
      {"bpp.variability", "Non-zero proposal variability",
       {"probe_interblock", "probe_variability"}, ""},
      {"bpp.adjustable_lower", "Adjustable lower difficulty threshold",
       {"test.retarget_convergence", "test.kov_batch_monotonicity",
        "test.tsp_alpha_monotonicity"}, ""},
      {"bpp.switchability", "Block switchability", {"probe_switchability"}, ""},
      {"bpp.verification_soundness", "Proposal verification soundness",
       {"probe_soundness_completeness"}, ""},
      {"bpp.verification_efficiency", "Proposal verification efficiency",
       {"probe_verification_ratio", "cmd_bench_task"}, ""},
      {"bpp.timeliness", "Proposal timeliness",
       {"probe_interblock", "probe_chain_growth", "test.interblock_model"}, ""},
      {"bpp.adjustable_upper", "Adjustable upper difficulty threshold",
       {"test.retarget_convergence", "test.kov_partition_monotonicity",
        "test.tsp_alpha_monotonicity"}, ""},
      {"bpp.verification_completeness", "Proposal verification completeness",
       {"probe_soundness_completeness"}, ""},
      {"bpp.fairness", "Proposal fairness", {"probe_fairness"}, ""},
      // task-level properties
      {"btp.hardness", "Task hardness", {"probe_variability", "cmd_bench_task"}, ""},
      {"btp.context_sensitivity", "Context sensitivity", {"test.task_context_binding"}, ""},
      {"btp.non_amortizability", "Non-amortizability", {"probe_amortization"}, ""},
      {"btp.variability", "Non-zero solve-time variability", {"probe_variability"}, ""},
      {"btp.adjustable_lower", "Adjustable lower threshold",
       {"test.retarget_convergence", "test.kov_batch_monotonicity",
        "test.tsp_alpha_monotonicity"}, ""},
      {"btp.switch_solvability", "No reduction in solvability on switch",
       {"test.p_no_solution", "test.context_independent_solvability"}, ""},
      {"btp.switch_generation_time", "Negligible generation time on switch",
       {"cmd_bench_task"}, ""},
      {"btp.switch_solution_time", "No increase in solution time on switch",
       {"probe_switchability"}, ""},
      {"btp.verification_soundness", "Verification soundness",
       {"probe_soundness_completeness"}, ""},
      {"btp.generation_efficiency", "Generation efficiency", {"cmd_bench_task"}, ""},
      {"btp.verification_efficiency", "Verification efficiency",
       {"probe_verification_ratio", "cmd_bench_task"}, ""},
      {"btp.solvability", "Solvability", {"test.p_no_solution"}, ""},
      {"btp.tractability", "Tractability", {"test.interblock_model", "cmd_bench_task"}, ""},
      {"btp.adjustable_upper", "Adjustable upper threshold",
       {"test.retarget_convergence", "test.kov_partition_monotonicity",
        "test.tsp_alpha_monotonicity"}, ""},
      {"btp.verification_completeness", "Verification completeness",
       {"probe_soundness_completeness"}, ""},
      {"btp.fairness_superlinearity", "No superlinear dependence on resources",
       {"probe_fairness"}, ""},
      // backbone requirements
      {"backbone.common_prefix", "Common prefix", {"probe_common_prefix", "probe_fork_rate"}, ""},
      {"backbone.chain_quality", "Chain quality", {"probe_chain_quality"}, ""},
      {"backbone.chain_growth", "Chain growth", {"probe_chain_growth"}, ""},
      {"backbone.future_self_consistency", "Future self-consistency",
       {"probe_common_prefix"}, ""},
  };
  return rows;
}

}  // namespace puw::probe
