#include "puw/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <queue>
#include <sstream>
#include <unordered_set>

#include "puw/errors.hpp"
#include "puw/rng.hpp"
#include "puw/sha256.hpp"
#include "puw/task.hpp"

namespace puw::sim {

const std::string kGenesisId(64, '0');

const char* event_name(EventKind k) {
  switch (k) {
    case EventKind::TaskGenerated: return "TaskGenerated";
    case EventKind::BlockProposed: return "BlockProposed";
    case EventKind::BlockReceived: return "BlockReceived";
    case EventKind::BlockAppended: return "BlockAppended";
    case EventKind::ForkResolved: return "ForkResolved";
    case EventKind::DifficultyRetargeted: return "DifficultyRetargeted";
    case EventKind::SupplyArrived: return "SupplyArrived";
    case EventKind::SupplyStall: return "SupplyStall";
  }
  return "?";
}

std::optional<EventKind> event_from_name(const std::string& name) {
  for (EventKind k : {EventKind::TaskGenerated, EventKind::BlockProposed,
                      EventKind::BlockReceived, EventKind::BlockAppended,
                      EventKind::ForkResolved, EventKind::DifficultyRetargeted,
                      EventKind::SupplyArrived, EventKind::SupplyStall}) {
    if (name == event_name(k)) return k;
  }
  return std::nullopt;
}

// ── ChainState ───────────────────────────────────────────────────────────────

ChainState::ChainState() {
  nodes_.emplace(kGenesisId, Node{"", 0, 0});
  head_ = kGenesisId;
}

bool ChainState::contains(const std::string& id) const { return nodes_.count(id) != 0; }

std::uint64_t ChainState::height_of(const std::string& id) const {
  const auto it = nodes_.find(id);
  if (it == nodes_.end()) throw Error("unknown block id: " + id);
  return it->second.height;
}

void ChainState::attach(const std::string& id, const std::string& parent,
                        std::vector<std::string>& out) {
  Node n;
  n.parent = parent;
  n.height = nodes_.at(parent).height + 1;
  n.arrival = ++arrivals_;
  const std::uint64_t head_h = nodes_.at(head_).height;
  nodes_.emplace(id, std::move(n));
  out.push_back(id);
  // strictly greater: on equal height the earlier-received head stays
  if (nodes_.at(id).height > head_h) head_ = id;
}

std::vector<std::string> ChainState::apply_block(const std::string& id,
                                                 const std::string& parent) {
  std::vector<std::string> attached;
  if (contains(id)) return attached;
  if (!contains(parent)) {
    pending_.emplace(parent, id);
    return attached;
  }
  attach(id, parent, attached);
  // drain buffered descendants breadth-first
  for (std::size_t i = 0; i < attached.size(); ++i) {
    const std::string cur = attached[i];  // copy; attach() grows the vector
    const auto range = pending_.equal_range(cur);
    std::vector<std::string> kids;
    for (auto it = range.first; it != range.second; ++it) kids.push_back(it->second);
    pending_.erase(range.first, range.second);
    for (const std::string& kid : kids) attach(kid, cur, attached);
  }
  return attached;
}

std::vector<std::string> ChainState::path(const std::string& id) const {
  std::vector<std::string> p;
  std::string cur = id;
  while (true) {
    const auto it = nodes_.find(cur);
    if (it == nodes_.end()) throw Error("unknown block id: " + cur);
    p.push_back(cur);
    if (it->second.parent.empty()) break;
    cur = it->second.parent;
  }
  std::reverse(p.begin(), p.end());
  return p;
}

bool ChainState::on_main_chain(const std::string& id) const {
  if (!contains(id)) return false;
  const std::uint64_t h = height_of(id);
  std::string cur = head_;
  std::uint64_t cur_h = height_of(cur);
  if (h > cur_h) return false;
  while (cur_h > h) {
    cur = nodes_.at(cur).parent;
    --cur_h;
  }
  return cur == id;
}

// ── retargeting ──────────────────────────────────────────────────────────────

Difficulty retarget_difficulty(const std::vector<std::uint64_t>& window_timestamps,
                               const Difficulty& current, std::uint64_t target_interblock_s) {
  if (window_timestamps.size() < 2)
    throw std::invalid_argument("retarget window needs >= 2 timestamps");
  if (target_interblock_s == 0)
    throw std::invalid_argument("target interblock must be > 0");
  const std::uint64_t intervals = window_timestamps.size() - 1;
  const std::uint64_t expected = intervals * target_interblock_s;
  std::uint64_t actual = window_timestamps.back() > window_timestamps.front()
                             ? window_timestamps.back() - window_timestamps.front()
                             : 0;
  if (actual == 0) actual = 1;  // whole window inside one second
  const Rational scaled = rational_mul(current.value, Rational(expected, actual));
  const Rational lo = rational_mul(current.value, Rational(1, 4));
  const Rational hi = rational_mul(current.value, Rational(4, 1));
  Rational out = rational_clamp(scaled, lo, hi);
  if (rational_less(out, Rational(1, 1))) out = Rational(1, 1);  // difficulty floor
  return Difficulty(out);
}

// ── trace plumbing ───────────────────────────────────────────────────────────

namespace {

std::string fmt_t(double t) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", t);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

constexpr const char* kCsvHeader = "event,t,miner,block_id,parent_id,height,difficulty";

}  // namespace

void EventTrace::finalize() {
  blocks.clear();
  main_chain.clear();

  BlockRecord genesis;
  genesis.id = kGenesisId;
  genesis.parent = "";
  genesis.proposer = -1;
  genesis.height = 0;
  genesis.t_proposed = 0;
  genesis.difficulty = scenario.initial_difficulty.str();
  blocks.emplace(kGenesisId, genesis);

  std::string best = kGenesisId;
  std::uint64_t best_h = 0;
  for (const auto& e : events) {
    if (e.kind != EventKind::BlockProposed) continue;
    BlockRecord r;
    r.id = e.block_id;
    r.parent = e.parent_id;
    r.proposer = e.miner;
    r.height = static_cast<std::uint64_t>(e.height);
    r.t_proposed = e.t;
    r.difficulty = e.difficulty;
    blocks[e.block_id] = r;
    if (r.height > best_h) {  // ties keep the earlier proposal
      best_h = r.height;
      best = e.block_id;
    }
  }

  std::string cur = best;
  while (true) {
    main_chain.push_back(cur);
    if (cur == kGenesisId) break;
    const auto it = blocks.find(cur);
    if (it == blocks.end() || it->second.parent.empty())
      throw Error("trace references unknown parent of block " + cur);
    cur = it->second.parent;
    if (cur != kGenesisId && blocks.find(cur) == blocks.end())
      throw Error("trace references unknown block " + cur);
  }
  std::reverse(main_chain.begin(), main_chain.end());
}

std::string EventTrace::to_csv() const {
  std::ostringstream o;
  o << kCsvHeader << "\n";
  for (const auto& e : events) {
    o << event_name(e.kind) << ',' << fmt_t(e.t) << ',' << e.miner << ',' << e.block_id << ','
      << e.parent_id << ',' << e.height << ',' << e.difficulty << "\n";
  }
  return o.str();
}

EventTrace EventTrace::from_csv(const std::string& csv, const Scenario& scenario) {
  EventTrace trace;
  trace.scenario = scenario;
  std::istringstream in(csv);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != kCsvHeader)
        throw ParseError(1, std::string("expected trace header '") + kCsvHeader + "'");
      continue;
    }
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 7) throw ParseError(line_no, "expected 7 columns");
    TraceEvent e;
    const auto kind = event_from_name(f[0]);
    if (!kind) throw ParseError(line_no, "unknown event '" + f[0] + "'");
    e.kind = *kind;
    try {
      std::size_t pos = 0;
      e.t = std::stod(f[1], &pos);
      if (pos != f[1].size()) throw std::invalid_argument("t");
      e.miner = std::stoll(f[2], &pos);
      if (pos != f[2].size()) throw std::invalid_argument("miner");
      e.height = std::stoll(f[5], &pos);
      if (pos != f[5].size()) throw std::invalid_argument("height");
    } catch (const std::exception&) {
      throw ParseError(line_no, "malformed numeric column");
    }
    e.block_id = f[3];
    e.parent_id = f[4];
    e.difficulty = f[6];
    if (!trace.events.empty() && e.t < trace.events.back().t)
      throw ParseError(line_no, "timestamps must be non-decreasing");
    if (e.kind == EventKind::SupplyStall) trace.stalled = true;
    trace.events.push_back(std::move(e));
  }
  if (line_no == 0) throw ParseError(1, "empty trace");
  trace.finalize();
  return trace;
}

std::uint64_t EventTrace::proposed_count() const {
  std::uint64_t n = 0;
  for (const auto& e : events)
    if (e.kind == EventKind::BlockProposed) ++n;
  return n;
}

std::uint64_t EventTrace::appended_height() const {
  return main_chain.empty() ? 0 : main_chain.size() - 1;
}

// ── event-loop engine ────────────────────────────────────────────────────────

namespace {

std::uint64_t sub_seed(std::uint64_t seed, std::string_view name, std::uint64_t a,
                       std::uint64_t b = 0) {
  return seed_combine(seed_combine(seed_combine(seed, tag_from_name(name)), a), b);
}

Digest random_digest(Rng& rng) {
  Digest d{};
  for (int i = 0; i < 4; ++i) put_u64_be(d.data() + 8 * i, rng.next_u64());
  return d;
}

struct PendingEv {
  enum class Type { SolveDone, Deliver, Supply };
  double t = 0;
  std::uint64_t seq = 0;
  Type type = Type::Supply;
  std::size_t miner = 0;       // SolveDone / Deliver: miner index
  std::uint64_t session = 0;   // SolveDone
  std::string block_id;        // Deliver
};

struct EvAfter {
  bool operator()(const PendingEv& a, const PendingEv& b) const {
    if (a.t != b.t) return a.t > b.t;
    return a.seq > b.seq;
  }
};

class Engine {
 public:
  explicit Engine(const Scenario& sc)
      : sc_(sc),
        supply_time_rng_(sub_seed(sc.seed, "sim.supply.time", 0)),
        supply_gen_rng_(sub_seed(sc.seed, "sim.supply.gen", 0)),
        delay_rng_(sub_seed(sc.seed, "sim.delay", 0)) {
    trace_.scenario = sc_;
    next_diff_[kGenesisId] = sc_.initial_difficulty.value;
    ts_of_[kGenesisId] = 0;
    parent_of_[kGenesisId] = "";
    for (const MinerSpec& spec : sc_.miners) {
      MState m(spec, sub_seed(sc_.seed, "sim.solve", spec.id),
               sub_seed(sc_.seed, "sim.payload", spec.id));
      miners_.push_back(std::move(m));
    }
  }

  EventTrace run() {
    const bool with_supply = sc_.task_class != ClassId::Cryptopuzzle;
    if (with_supply) {
      for (std::uint32_t i = 0; i < sc_.supply.initial_count && !halted_; ++i) add_supply_entry();
      if (sc_.supply.arrival_rate_per_s > 0) schedule_next_arrival();
    }
    for (std::size_t i = 0; i < miners_.size() && !halted_; ++i) start_session(i);

    while (!heap_.empty() && !halted_) {
      const PendingEv ev = heap_.top();
      if (sc_.duration_s > 0 && ev.t > sc_.duration_s) break;
      heap_.pop();
      now_ = ev.t;
      switch (ev.type) {
        case PendingEv::Type::SolveDone: on_solve_done(ev); break;
        case PendingEv::Type::Deliver: on_deliver(ev); break;
        case PendingEv::Type::Supply: on_supply(); break;
      }
    }
    trace_.finalize();
    return std::move(trace_);
  }

 private:
  struct MState {
    MinerSpec spec;
    ChainState view;
    Rng solve_rng, payload_rng;
    std::uint64_t session = 0;  // current session; SolveDone events carry theirs
    // frozen per session:
    std::string parent;
    std::uint64_t height = 0;
    Rational diff{1, 1};
    std::uint64_t ctx_ts = 0;
    Digest ctx_digest{};
    std::vector<std::uint8_t> payload;       // measured: winning solution
    std::vector<std::uint64_t> consumed;     // measured kov/tsp: supply entry ids

    MState(const MinerSpec& s, std::uint64_t solve_seed, std::uint64_t payload_seed)
        : spec(s), solve_rng(solve_seed), payload_rng(payload_seed) {}
  };

  void log(EventKind kind, double t, std::int64_t miner, const std::string& block_id,
           const std::string& parent_id, std::int64_t height, const std::string& difficulty) {
    TraceEvent e;
    e.kind = kind;
    e.t = t;
    e.miner = miner;
    e.block_id = block_id;
    e.parent_id = parent_id;
    e.height = height;
    e.difficulty = difficulty;
    trace_.events.push_back(std::move(e));
  }

  void schedule(PendingEv ev) {
    ev.seq = seq_++;
    heap_.push(std::move(ev));
  }

  // ── supply ──
  void add_supply_entry() {
    SupplyEntry e;
    e.entry_id = next_entry_id_++;
    e.supplier_id = sc_.supply.supplier_id;
    e.arrival_time = now_;
    if (sc_.task_class == ClassId::Kov) {
      e.instance = kov::kov_random_instance(sc_.supply.kov_k, sc_.supply.kov_n, sc_.supply.kov_d,
                                            supply_gen_rng_);
    } else {
      e.instance = tsp::tsp_random_instance(sc_.supply.tsp_cities, 1000.0, supply_gen_rng_,
                                            sc_.supply.tsp_mode);
    }
    const std::uint64_t id = e.entry_id;
    entry_index_[id] = arrived_.size();
    arrived_.push_back(std::move(e));
    log(EventKind::SupplyArrived, now_, -1, std::to_string(id), "-", -1, "-");
  }

  void schedule_next_arrival() {
    PendingEv ev;
    ev.type = PendingEv::Type::Supply;
    ev.t = now_ + supply_time_rng_.exponential(1.0 / sc_.supply.arrival_rate_per_s);
    schedule(std::move(ev));
  }

  void on_supply() {
    add_supply_entry();
    schedule_next_arrival();
  }

  // Entries visible to a miner: everything arrived minus what blocks on its
  // current main chain already consumed (orphaned blocks do not consume).
  TaskSupplyState admissible_supply(const MState& m) const {
    std::unordered_set<std::uint64_t> used;
    for (const std::string& b : m.view.head_path()) {
      const auto it = consumed_of_.find(b);
      if (it != consumed_of_.end()) used.insert(it->second.begin(), it->second.end());
    }
    TaskSupplyState tss;
    for (const SupplyEntry& e : arrived_)
      if (!used.count(e.entry_id)) tss.push(e);
    return tss;
  }

  std::uint64_t kov_batch_count(const Rational& d) const {
    // round-half-up(num/den), at least one instance per block
    const unsigned __int128 b =
        (static_cast<unsigned __int128>(d.num) * 2 + d.den) / (static_cast<unsigned __int128>(d.den) * 2);
    if (b < 1) return 1;
    if (b > (1u << 20)) return 1u << 20;
    return static_cast<std::uint64_t>(b);
  }

  double tsp_alpha_for(const Rational& d) const {
    return 1.0 + (sc_.tsp_alpha - 1.0) / d.to_double();
  }

  // ── sessions ──
  void start_session(std::size_t mi) {
    MState& m = miners_[mi];
    ++m.session;
    m.parent = m.view.head();
    m.height = m.view.head_height() + 1;
    m.diff = next_diff_.at(m.parent);
    m.ctx_ts = static_cast<std::uint64_t>(now_);
    m.payload.clear();
    m.consumed.clear();

    BlockContext ctx;
    ctx.prev_block_id = digest_from_hex(m.parent);
    ctx.payload_digest = random_digest(m.payload_rng);
    ctx.height = m.height;
    ctx.timestamp = m.ctx_ts;
    ctx.miner_id = m.spec.id;
    ctx.extra_nonce = 0;

    log(EventKind::TaskGenerated, now_, static_cast<std::int64_t>(m.spec.id), "-", m.parent,
        static_cast<std::int64_t>(m.height), m.diff.str());

    double dt = 0;
    if (sc_.mode == SimMode::Analytic) {
      m.ctx_digest = context_digest(ctx);
      const double mean =
          Difficulty(m.diff).to_double() * std::ldexp(1.0, sc_.nonce_bits) / m.spec.power;
      dt = m.solve_rng.exponential(mean);
    } else {
      std::uint64_t ops = 0;
      if (!measured_solve(m, ctx, ops)) {
        log(EventKind::SupplyStall, now_, static_cast<std::int64_t>(m.spec.id), "-", "-", -1,
            m.diff.str());
        trace_.stalled = true;
        halted_ = true;
        return;
      }
      dt = static_cast<double>(ops) / m.spec.power;
    }
    PendingEv ev;
    ev.type = PendingEv::Type::SolveDone;
    ev.t = now_ + dt;
    ev.miner = mi;
    ev.session = m.session;
    schedule(std::move(ev));
  }

  // Runs the real backend; returns false on an empty/insufficient admissible
  // supply (the liveness deadlock). On success fills m.payload / m.consumed /
  // m.ctx_digest and total ops.
  bool measured_solve(MState& m, BlockContext ctx, std::uint64_t& total_ops) {
    const std::uint64_t solve_seed =
        sub_seed(sc_.seed, "sim.solve.measured", m.spec.id, m.session);
    GenerateOptions opts;
    opts.nonce_bits = sc_.nonce_bits;
    opts.tsp_alpha = tsp_alpha_for(m.diff);
    const TaskSupplyState supply_snapshot =
        sc_.task_class == ClassId::Cryptopuzzle ? TaskSupplyState{} : admissible_supply(m);

    total_ops = 0;
    for (std::uint64_t attempt = 0; attempt < 100000; ++attempt) {
      ctx.extra_nonce = attempt;
      BlockTask task;
      std::vector<std::uint64_t> consumed;
      std::uint64_t budget = UINT64_MAX;
      try {
        switch (sc_.task_class) {
          case ClassId::Cryptopuzzle: {
            TaskSupplyState unused;
            task = generate(ClassId::Cryptopuzzle, unused, sc_.selection_policy, ctx,
                            Difficulty(m.diff), opts);
            break;
          }
          case ClassId::Kov: {
            const std::uint64_t want = kov_batch_count(m.diff);
            TaskSupplyState tss = supply_snapshot;
            if (tss.size() < want) throw EmptySupply("supply short of difficulty batch");
            task.class_id = ClassId::Kov;
            task.difficulty = Difficulty(m.diff);
            task.bound_context = context_digest(ctx);
            KovTaskPayload p;
            std::vector<kov::KovInstance> parts;
            for (std::uint64_t j = 0; j < want; ++j) {
              const std::size_t at = tss.select_index(sc_.selection_policy, task.bound_context);
              SupplyEntry e = tss.take(at);
              parts.push_back(std::get<kov::KovInstance>(e.instance));
              p.source_entry_ids.push_back(e.entry_id);
            }
            p.instance = kov::kov_batch(parts);
            consumed = p.source_entry_ids;
            task.payload = std::move(p);
            break;
          }
          case ClassId::Tsp: {
            TaskSupplyState tss = supply_snapshot;
            task = generate(ClassId::Tsp, tss, sc_.selection_policy, ctx, Difficulty(m.diff),
                            opts);
            consumed = {std::get<TspTaskPayload>(task.payload).source_entry_id};
            budget = sc_.tsp_restart_budget;
            break;
          }
        }
      } catch (const EmptySupply&) {
        return false;
      }
      const SolveOutcome outcome = solve(task, budget, solve_seed);
      total_ops += outcome.elapsed_ops;
      if (outcome.solved()) {
        m.payload = outcome.poc->solution_payload;
        m.consumed = std::move(consumed);
        m.ctx_digest = task.bound_context;
        return true;
      }
      // nonce space / restart budget exhausted: vary the context and retry
    }
    throw Error("measured solve failed to converge after 100000 context variations");
  }

  // ── block proposal ──
  void on_solve_done(const PendingEv& ev) {
    MState& m = miners_[ev.miner];
    if (ev.session != m.session) return;  // abandoned session

    std::string id;
    if (sc_.mode == SimMode::Analytic) {
      id = to_hex(m.ctx_digest);
    } else {
      std::vector<std::uint8_t> buf(m.ctx_digest.begin(), m.ctx_digest.end());
      buf.insert(buf.end(), m.payload.begin(), m.payload.end());
      id = to_hex(sha256(buf));
    }

    BlockRecord rec;
    rec.id = id;
    rec.parent = m.parent;
    rec.proposer = static_cast<std::int64_t>(m.spec.id);
    rec.height = m.height;
    rec.t_proposed = now_;
    rec.difficulty = m.diff.str();
    records_[id] = rec;
    parent_of_[id] = m.parent;
    ts_of_[id] = m.ctx_ts;
    ctx_dig_of_[id] = m.ctx_digest;
    consumed_of_[id] = m.consumed;
    payload_of_[id] = m.payload;

    log(EventKind::BlockProposed, now_, rec.proposer, id, m.parent,
        static_cast<std::int64_t>(m.height), rec.difficulty);

    // consensus difficulty for children of this block
    if (m.height > 0 && m.height % sc_.retarget_window == 0) {
      std::vector<std::uint64_t> stamps(sc_.retarget_window + 1);
      std::string cur = id;
      for (std::size_t i = stamps.size(); i-- > 0;) {
        stamps[i] = ts_of_.at(cur);
        cur = parent_of_.at(cur);
      }
      const Difficulty next =
          retarget_difficulty(stamps, Difficulty(m.diff), sc_.target_interblock_s);
      next_diff_[id] = next.value;
      log(EventKind::DifficultyRetargeted, now_, -1, id, m.parent,
          static_cast<std::int64_t>(m.height), next.str());
    } else {
      next_diff_[id] = m.diff;
    }

    // canonical-chain accounting
    const std::string old_head = god_.head();
    god_.apply_block(id, m.parent);
    const std::string new_head = god_.head();
    if (new_head != old_head) {
      if (records_.at(new_head).parent == old_head) {
        log(EventKind::BlockAppended, now_, rec.proposer, id, m.parent,
            static_cast<std::int64_t>(m.height), rec.difficulty);
      } else {
        // reorganization: the new head is not a child of the old one
        log(EventKind::ForkResolved, now_, records_.at(new_head).proposer, new_head, old_head,
            static_cast<std::int64_t>(god_.head_height()), "-");
        std::unordered_set<std::string> old_path;
        for (const std::string& b : god_.path(old_head)) old_path.insert(b);
        std::vector<std::string> joined;
        std::string cur = new_head;
        while (!old_path.count(cur)) {
          joined.push_back(cur);
          cur = records_.at(cur).parent;
        }
        std::reverse(joined.begin(), joined.end());
        for (const std::string& b : joined) {
          const BlockRecord& br = records_.at(b);
          log(EventKind::BlockAppended, now_, br.proposer, br.id, br.parent,
              static_cast<std::int64_t>(br.height), br.difficulty);
        }
      }
    }

    m.view.apply_block(id, m.parent);

    if (sc_.duration_blocks > 0 && god_.head_height() >= sc_.duration_blocks) {
      halted_ = true;
      return;
    }

    // broadcast to the other miners
    for (std::size_t j = 0; j < miners_.size(); ++j) {
      if (j == ev.miner) continue;
      double delay = sc_.network.delay_lo_s;
      if (sc_.network.kind == NetworkSpec::Kind::Uniform)
        delay = delay_rng_.uniform(sc_.network.delay_lo_s, sc_.network.delay_hi_s);
      PendingEv d;
      d.type = PendingEv::Type::Deliver;
      d.t = now_ + delay;
      d.miner = j;
      d.block_id = id;
      schedule(std::move(d));
    }

    start_session(ev.miner);
  }

  // ── block receipt ──
  void on_deliver(const PendingEv& ev) {
    MState& r = miners_[ev.miner];
    const BlockRecord& rec = records_.at(ev.block_id);
    log(EventKind::BlockReceived, now_, static_cast<std::int64_t>(r.spec.id), rec.id, rec.parent,
        static_cast<std::int64_t>(rec.height), "-");
    if (sc_.mode == SimMode::Measured && !verify_block(rec))
      throw Error("block failed verification at receipt: " + rec.id);
    if (r.spec.strategy == Strategy::Stubborn) return;  // ignores competing work
    r.view.apply_block(rec.id, rec.parent);
    if (r.view.head() != r.parent) start_session(ev.miner);  // head moved: remine
  }

  // Receivers re-derive the task from the block context and consumed supply
  // entries, then run the real verifier — the acceptance path every block on
  // a main chain must have passed.
  bool verify_block(const BlockRecord& rec) {
    const Digest& dig = ctx_dig_of_.at(rec.id);
    const Rational d = next_diff_.at(rec.parent);
    const std::vector<std::uint8_t>& payload = payload_of_.at(rec.id);
    switch (sc_.task_class) {
      case ClassId::Cryptopuzzle: {
        const puzzle::PuzzleTask task =
            puzzle::puzzle_generate(dig, Difficulty(d), sc_.nonce_bits);
        return puzzle::puzzle_verify(task, payload);
      }
      case ClassId::Kov: {
        std::vector<kov::KovInstance> parts;
        for (std::uint64_t eid : consumed_of_.at(rec.id))
          parts.push_back(std::get<kov::KovInstance>(arrived_[entry_index_.at(eid)].instance));
        kov::KovProof proof;
        if (!kov::decode_proof(payload, proof)) return false;
        return kov::kov_verify(kov::kov_batch(parts), proof, VerifyMode::full());
      }
      case ClassId::Tsp: {
        const std::uint64_t eid = consumed_of_.at(rec.id).front();
        const auto& inst = std::get<tsp::TspInstance>(arrived_[entry_index_.at(eid)].instance);
        tsp::TspTask task;
        task.t_d = tsp::tsp_derive_threshold(inst, tsp_alpha_for(d), get_u64_be(dig.data() + 8));
        auto [moved, record] = tsp::tsp_contextualize(inst, dig);
        task.instance = std::move(moved);
        task.transform = std::move(record);
        task.bound_context = dig;
        return tsp::tsp_verify(task, payload);
      }
    }
    return false;
  }

  const Scenario& sc_;
  EventTrace trace_;
  std::priority_queue<PendingEv, std::vector<PendingEv>, EvAfter> heap_;
  std::uint64_t seq_ = 0;
  double now_ = 0;
  bool halted_ = false;

  ChainState god_;
  std::unordered_map<std::string, Rational> next_diff_;
  std::unordered_map<std::string, std::string> parent_of_;
  std::unordered_map<std::string, std::uint64_t> ts_of_;
  std::unordered_map<std::string, BlockRecord> records_;
  std::unordered_map<std::string, Digest> ctx_dig_of_;
  std::unordered_map<std::string, std::vector<std::uint64_t>> consumed_of_;
  std::unordered_map<std::string, std::vector<std::uint8_t>> payload_of_;

  std::vector<SupplyEntry> arrived_;
  std::unordered_map<std::uint64_t, std::size_t> entry_index_;
  std::uint64_t next_entry_id_ = 1;

  Rng supply_time_rng_, supply_gen_rng_, delay_rng_;
  std::vector<MState> miners_;
};

}  // namespace

EventTrace run_scenario(const Scenario& scenario) {
  if (scenario.miners.empty()) throw Error("scenario declares no miners");
  Engine engine(scenario);
  return engine.run();
}

std::map<std::uint64_t, std::uint64_t> reward_tally(const EventTrace& trace) {
  std::map<std::uint64_t, std::uint64_t> out;
  for (const MinerSpec& m : trace.scenario.miners) out[m.id] = 0;
  for (std::size_t i = 1; i < trace.main_chain.size(); ++i) {
    const BlockRecord& r = trace.blocks.at(trace.main_chain[i]);
    if (r.proposer >= 0) ++out[static_cast<std::uint64_t>(r.proposer)];
  }
  return out;
}

}  // namespace puw::sim
