#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "puw/rng.hpp"
#include "puw/task_types.hpp"

namespace puw::tsp {

enum class DistanceMode : std::uint8_t {
  Euc2dRounded = 0,  // nearest-integer euclidean, TSPLIB convention
  Euc2dExact = 1,
};

struct TspInstance {
  std::vector<std::array<double, 2>> coords;
  DistanceMode mode = DistanceMode::Euc2dExact;

  std::uint32_t n() const { return static_cast<std::uint32_t>(coords.size()); }
};

double tsp_distance(const TspInstance& inst, std::uint32_t a, std::uint32_t b);

// Cycle cost: sums all n edges including the closing edge back to the start.
double tour_cost(const TspInstance& inst, const std::vector<std::uint32_t>& order);

// Digest-seeded relabeling + rigid rotation/translation. Exact-mode distances
// are preserved (isometry), so solution quality is context-independent while
// the task bytes are context-bound. perm maps new index -> original index.
struct TspTransform {
  std::vector<std::uint32_t> perm;
  double cos_t = 1.0, sin_t = 0.0, tx = 0.0, ty = 0.0;
};

struct TspTask {
  TspInstance instance;  // already contextualized when transform is present
  double t_d = 0;        // decision threshold: a tour is valid iff cost <= t_d
  std::optional<TspTransform> transform;
  Digest bound_context{};
};

// An all-zero leading 8 bytes of the digest yields the identity transform.
std::pair<TspInstance, TspTransform> tsp_contextualize(const TspInstance& inst,
                                                       const Digest& ctx_digest);

// Maps a tour over the contextualized instance back to original city indices.
std::vector<std::uint32_t> tsp_reconstruct_order(const std::vector<std::uint32_t>& order,
                                                 const TspTransform& transform);

// Restart loop: nearest-neighbour start (seeded start city) on the first
// restart, seeded random permutations after, each descended to a 2-opt local
// optimum; returns the first local optimum with cost <= t_d, else Exhausted
// after budget_restarts. Deterministic per (task, seed, budget).
SolveOutcome tsp_solve(const TspTask& task, std::uint64_t seed, std::uint32_t budget_restarts);

// O(n): permutation check + cost comparison against t_d.
bool tsp_verify(const TspTask& task, const std::vector<std::uint8_t>& solution_payload,
                std::uint64_t* ops = nullptr);

std::vector<std::uint8_t> encode_tour(const std::vector<std::uint32_t>& order);
bool decode_tour(const std::vector<std::uint8_t>& payload, std::vector<std::uint32_t>& out);

// t_d = alpha * cost of a fixed-budget 2-opt baseline (deterministic per seed).
double tsp_derive_threshold(const TspInstance& inst, double alpha, std::uint64_t seed);

// Exhaustive (n-1)!/2 search; n <= 11 or TooLarge.
std::pair<std::vector<std::uint32_t>, double> brute_force_optimal(const TspInstance& inst);

// Building blocks, exposed for tests and benchmarks. Both count abstract ops
// (distance evaluations) into *ops when given.
std::vector<std::uint32_t> nearest_neighbor_tour(const TspInstance& inst, std::uint32_t start,
                                                 std::uint64_t* ops = nullptr);
// First-improvement 2-opt descent in canonical scan order; returns when no
// improving 2-exchange exists.
void two_opt(const TspInstance& inst, std::vector<std::uint32_t>& order,
             std::uint64_t* ops = nullptr);

TspInstance tsp_random_instance(std::uint32_t n, double extent, Rng& rng,
                                DistanceMode mode = DistanceMode::Euc2dExact);

// TSPLIB subset: NAME, TYPE: TSP, DIMENSION, EDGE_WEIGHT_TYPE: EUC_2D,
// NODE_COORD_SECTION, EOF.
TspInstance tsp_parse_tsplib(const std::string& text);  // throws ParseError

}  // namespace puw::tsp
