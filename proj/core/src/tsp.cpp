#include "puw/tsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "puw/errors.hpp"

namespace puw::tsp {

namespace {
constexpr double kImproveEps = 1e-9;
}

double tsp_distance(const TspInstance& inst, std::uint32_t a, std::uint32_t b) {
  const double dx = inst.coords[a][0] - inst.coords[b][0];
  const double dy = inst.coords[a][1] - inst.coords[b][1];
  const double d = std::sqrt(dx * dx + dy * dy);
  if (inst.mode == DistanceMode::Euc2dRounded) {
    return std::floor(d + 0.5);  // TSPLIB nint
  }
  return d;
}

double tour_cost(const TspInstance& inst, const std::vector<std::uint32_t>& order) {
  double c = 0;
  const std::size_t n = order.size();
  for (std::size_t i = 0; i < n; ++i) c += tsp_distance(inst, order[i], order[(i + 1) % n]);
  return c;
}

std::vector<std::uint32_t> nearest_neighbor_tour(const TspInstance& inst, std::uint32_t start,
                                                 std::uint64_t* ops) {
  const std::uint32_t n = inst.n();
  std::vector<bool> used(n, false);
  std::vector<std::uint32_t> order;
  order.reserve(n);
  order.push_back(start);
  used[start] = true;
  std::uint64_t spent = 0;
  for (std::uint32_t step = 1; step < n; ++step) {
    std::uint32_t cur = order.back();
    double best = 0;
    std::uint32_t best_city = UINT32_MAX;
    for (std::uint32_t c = 0; c < n; ++c) {
      if (used[c]) continue;
      double d = tsp_distance(inst, cur, c);
      ++spent;
      if (best_city == UINT32_MAX || d < best) {
        best = d;
        best_city = c;
      }
    }
    order.push_back(best_city);
    used[best_city] = true;
  }
  if (ops) *ops += spent;
  return order;
}

void two_opt(const TspInstance& inst, std::vector<std::uint32_t>& order, std::uint64_t* ops) {
  const std::size_t n = order.size();
  if (n < 4) return;
  std::uint64_t spent = 0;
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t i = 0; i + 1 < n && !improved; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (i == 0 && j == n - 1) continue;  // same edge pair
        const std::uint32_t a = order[i], b = order[i + 1];
        const std::uint32_t c = order[j], d = order[(j + 1) % n];
        spent += 4;
        const double delta = tsp_distance(inst, a, c) + tsp_distance(inst, b, d) -
                             tsp_distance(inst, a, b) - tsp_distance(inst, c, d);
        if (delta < -kImproveEps) {
          std::reverse(order.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                       order.begin() + static_cast<std::ptrdiff_t>(j) + 1);
          improved = true;
          break;
        }
      }
    }
  }
  if (ops) *ops += spent;
}

namespace {

// Shared by the solver and the threshold baseline so both produce the same
// tour sequence for the same seed: restart 0 is nearest-neighbour from a
// seeded start city, later restarts descend from seeded random permutations.
std::vector<std::uint32_t> restart_tour(const TspInstance& inst, Rng& rng, std::uint32_t restart,
                                        std::uint64_t* ops) {
  const std::uint32_t n = inst.n();
  std::vector<std::uint32_t> order;
  if (restart == 0) {
    order = nearest_neighbor_tour(inst, static_cast<std::uint32_t>(rng.below(n)), ops);
  } else {
    order.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
  }
  two_opt(inst, order, ops);
  return order;
}

std::uint64_t solver_stream(std::uint64_t seed) {
  return seed_combine(seed, tag_from_name("tsp.restarts"));
}

}  // namespace

SolveOutcome tsp_solve(const TspTask& task, std::uint64_t seed, std::uint32_t budget_restarts) {
  if (budget_restarts == 0) throw std::invalid_argument("restart budget must be positive");
  Rng rng(solver_stream(seed));
  std::uint64_t ops = 0;
  for (std::uint32_t r = 0; r < budget_restarts; ++r) {
    std::vector<std::uint32_t> order = restart_tour(task.instance, rng, r, &ops);
    ops += task.instance.n();  // final cost evaluation
    if (tour_cost(task.instance, order) <= task.t_d) {
      ProofOfComputation poc;
      poc.class_id = ClassId::Tsp;
      poc.solution_payload = encode_tour(order);
      poc.solve_stats.elapsed_ops = ops;
      poc.solve_stats.restarts = r + 1;
      return SolveOutcome::solved_with(std::move(poc));
    }
  }
  return SolveOutcome::exhausted(ops);
}

bool tsp_verify(const TspTask& task, const std::vector<std::uint8_t>& solution_payload,
                std::uint64_t* ops) {
  if (ops) *ops = 0;
  std::vector<std::uint32_t> order;
  if (!decode_tour(solution_payload, order)) return false;
  const std::uint32_t n = task.instance.n();
  if (order.size() != n) return false;
  std::vector<bool> seen(n, false);
  for (std::uint32_t city : order) {
    if (city >= n || seen[city]) return false;  // not a bijection
    seen[city] = true;
  }
  if (ops) *ops = n;  // one distance evaluation per cycle edge
  return tour_cost(task.instance, order) <= task.t_d;
}

std::vector<std::uint8_t> encode_tour(const std::vector<std::uint32_t>& order) {
  ByteWriter w;
  w.u32be(static_cast<std::uint32_t>(order.size()));
  for (std::uint32_t c : order) w.u32be(c);
  return w.data();
}

bool decode_tour(const std::vector<std::uint8_t>& payload, std::vector<std::uint32_t>& out) {
  if (payload.size() < 4) return false;
  std::uint32_t n = get_u32_be(payload.data());
  if (payload.size() != 4ULL + 4ULL * n) return false;
  out.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) out[i] = get_u32_be(payload.data() + 4 + 4ULL * i);
  return true;
}

double tsp_derive_threshold(const TspInstance& inst, double alpha, std::uint64_t seed) {
  if (!(alpha >= 1.0)) throw std::invalid_argument("alpha must be >= 1");
  Rng rng(solver_stream(seed));
  double best = 0;
  for (std::uint32_t r = 0; r < 2; ++r) {  // fixed two-restart baseline
    std::vector<std::uint32_t> order = restart_tour(inst, rng, r, nullptr);
    double c = tour_cost(inst, order);
    if (r == 0 || c < best) best = c;
  }
  return alpha * best;
}

std::pair<TspInstance, TspTransform> tsp_contextualize(const TspInstance& inst,
                                                       const Digest& ctx_digest) {
  const std::uint32_t n = inst.n();
  TspTransform tr;
  tr.perm.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) tr.perm[i] = i;
  std::uint64_t seed = get_u64_be(ctx_digest.data());
  if (seed != 0) {
    Rng rng(seed_combine(seed, tag_from_name("tsp.contextualize")));
    rng.shuffle(tr.perm);
    const double theta = rng.uniform(0, 2 * std::numbers::pi);
    tr.cos_t = std::cos(theta);
    tr.sin_t = std::sin(theta);
    tr.tx = rng.uniform(-1000.0, 1000.0);
    tr.ty = rng.uniform(-1000.0, 1000.0);
  }
  TspInstance moved;
  moved.mode = inst.mode;
  moved.coords.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto& p = inst.coords[tr.perm[i]];
    moved.coords[i] = {tr.cos_t * p[0] - tr.sin_t * p[1] + tr.tx,
                       tr.sin_t * p[0] + tr.cos_t * p[1] + tr.ty};
  }
  return {std::move(moved), std::move(tr)};
}

std::vector<std::uint32_t> tsp_reconstruct_order(const std::vector<std::uint32_t>& order,
                                                 const TspTransform& transform) {
  std::vector<std::uint32_t> original;
  original.reserve(order.size());
  for (std::uint32_t i : order) {
    if (i >= transform.perm.size()) throw InvalidProof("tour index outside the instance");
    original.push_back(transform.perm[i]);
  }
  return original;
}

std::pair<std::vector<std::uint32_t>, double> brute_force_optimal(const TspInstance& inst) {
  const std::uint32_t n = inst.n();
  if (n < 3) throw TooLarge("instances need at least 3 cities");
  if (n > 11) throw TooLarge("exhaustive search is limited to 11 cities");
  std::vector<std::uint32_t> rest(n - 1);
  for (std::uint32_t i = 0; i + 1 < n; ++i) rest[i] = i + 1;
  std::vector<std::uint32_t> best_tour;
  double best = 0;
  std::vector<std::uint32_t> tour(n);
  tour[0] = 0;
  do {
    if (rest.front() > rest.back()) continue;  // each cycle once per direction
    std::copy(rest.begin(), rest.end(), tour.begin() + 1);
    double c = tour_cost(inst, tour);
    if (best_tour.empty() || c < best) {
      best = c;
      best_tour = tour;
    }
  } while (std::next_permutation(rest.begin(), rest.end()));
  return {best_tour, best};
}

TspInstance tsp_random_instance(std::uint32_t n, double extent, Rng& rng, DistanceMode mode) {
  TspInstance inst;
  inst.mode = mode;
  inst.coords.resize(n);
  for (auto& p : inst.coords) {
    p[0] = rng.uniform(0, extent);
    p[1] = rng.uniform(0, extent);
  }
  return inst;
}

TspInstance tsp_parse_tsplib(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  std::int64_t dimension = -1;
  bool saw_type = false, saw_weight = false, in_coords = false;
  TspInstance inst;
  inst.mode = DistanceMode::Euc2dRounded;
  std::vector<bool> filled;
  auto trim = [](std::string s) {
    const char* ws = " \t\r";
    auto b = s.find_first_not_of(ws);
    auto e = s.find_last_not_of(ws);
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t == "EOF") break;
    if (!in_coords) {
      auto colon = t.find(':');
      std::string key = trim(colon == std::string::npos ? t : t.substr(0, colon));
      std::string val = colon == std::string::npos ? "" : trim(t.substr(colon + 1));
      if (key == "NAME" || key == "COMMENT") continue;
      if (key == "TYPE") {
        if (val != "TSP") throw ParseError(line_no, "TYPE must be TSP");
        saw_type = true;
      } else if (key == "DIMENSION") {
        try {
          dimension = std::stoll(val);
        } catch (const std::exception&) {
          throw ParseError(line_no, "DIMENSION must be an integer");
        }
        if (dimension < 3) throw ParseError(line_no, "DIMENSION must be >= 3");
      } else if (key == "EDGE_WEIGHT_TYPE") {
        if (val != "EUC_2D") throw ParseError(line_no, "EDGE_WEIGHT_TYPE must be EUC_2D");
        saw_weight = true;
      } else if (key == "NODE_COORD_SECTION") {
        if (dimension < 0) throw ParseError(line_no, "DIMENSION must precede NODE_COORD_SECTION");
        inst.coords.assign(static_cast<std::size_t>(dimension), {0, 0});
        filled.assign(static_cast<std::size_t>(dimension), false);
        in_coords = true;
      } else {
        throw ParseError(line_no, "unsupported keyword '" + key + "'");
      }
      continue;
    }
    std::istringstream row(t);
    std::int64_t idx;
    double x, y;
    if (!(row >> idx >> x >> y)) throw ParseError(line_no, "expected 'index x y'");
    if (idx < 1 || idx > dimension) throw ParseError(line_no, "node index out of range");
    if (!std::isfinite(x) || !std::isfinite(y)) throw ParseError(line_no, "coordinates must be finite");
    inst.coords[static_cast<std::size_t>(idx - 1)] = {x, y};
    filled[static_cast<std::size_t>(idx - 1)] = true;
  }
  if (!saw_type || !saw_weight || !in_coords)
    throw ParseError(line_no, "missing TYPE, EDGE_WEIGHT_TYPE or NODE_COORD_SECTION");
  for (std::size_t i = 0; i < filled.size(); ++i) {
    if (!filled[i])
      throw ParseError(line_no, "missing coordinates for node " + std::to_string(i + 1));
  }
  return inst;
}

}  // namespace puw::tsp
