#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "puw/bytes.hpp"
#include "puw/sha256.hpp"
#include "puw/tsp.hpp"

using namespace puw;
using namespace puw::tsp;

namespace {

TspInstance berlin12(DistanceMode mode) {
  TspInstance inst;
  inst.mode = mode;
  inst.coords = {{565, 575},  {25, 185},   {345, 750},  {945, 685},
                 {845, 655},  {880, 660},  {25, 230},   {525, 1000},
                 {580, 1175}, {650, 1130}, {1605, 620}, {1220, 580}};
  return inst;
}

// Precomputed rounded distance matrix for the 12 cities above.
const int kBerlinDist[12][12] = {
    {0, 666, 281, 396, 291, 326, 641, 427, 600, 561, 1041, 655},
    {666, 0, 649, 1047, 945, 978, 45, 956, 1135, 1133, 1639, 1259},
    {281, 649, 0, 604, 509, 543, 611, 308, 486, 487, 1267, 891},
    {396, 1047, 604, 0, 104, 70, 1026, 525, 611, 534, 663, 294},
    {291, 945, 509, 104, 0, 35, 924, 471, 584, 513, 761, 382},
    {326, 978, 543, 70, 35, 0, 957, 492, 596, 523, 726, 349},
    {641, 45, 611, 1026, 924, 957, 0, 918, 1096, 1096, 1627, 1245},
    {427, 956, 308, 525, 471, 492, 918, 0, 183, 180, 1145, 812},
    {600, 1135, 486, 611, 584, 596, 1096, 183, 0, 83, 1166, 874},
    {561, 1133, 487, 534, 513, 523, 1096, 180, 83, 0, 1083, 792},
    {1041, 1639, 1267, 663, 761, 726, 1627, 1145, 1166, 1083, 0, 387},
    {655, 1259, 891, 294, 382, 349, 1245, 812, 874, 792, 387, 0}};

bool is_permutation_of_n(const std::vector<std::uint32_t>& order, std::uint32_t n) {
  if (order.size() != n) return false;
  std::set<std::uint32_t> seen(order.begin(), order.end());
  return seen.size() == n && *seen.rbegin() == n - 1;
}

}  // namespace

TEST_CASE("rounded euclidean distances match the precomputed matrix") {
  const TspInstance inst = berlin12(DistanceMode::Euc2dRounded);
  for (std::uint32_t a = 0; a < inst.n(); ++a)
    for (std::uint32_t b = 0; b < inst.n(); ++b)
      CHECK(tsp_distance(inst, a, b) == (kBerlinDist[a][b]));
}

TEST_CASE("tour cost includes the closing edge") {
  const TspInstance inst = berlin12(DistanceMode::Euc2dRounded);
  const std::vector<std::uint32_t> order = {0, 1, 2};
  CHECK(tour_cost(inst, order) ==
        (kBerlinDist[0][1] + kBerlinDist[1][2] + kBerlinDist[2][0]));
}

TEST_CASE("tsplib parser reproduces the bundled coordinates") {
  std::ifstream in(std::string(PUWBENCH_TEST_DATA_DIR) + "/berlin52_subset.tsp");
  REQUIRE(in.good());
  std::stringstream buf;
  buf << in.rdbuf();
  const TspInstance parsed = tsp_parse_tsplib(buf.str());
  const TspInstance expect = berlin12(DistanceMode::Euc2dRounded);
  REQUIRE(parsed.n() == expect.n());
  CHECK(parsed.mode == DistanceMode::Euc2dRounded);
  for (std::uint32_t i = 0; i < parsed.n(); ++i) {
    CHECK(parsed.coords[i][0] == expect.coords[i][0]);
    CHECK(parsed.coords[i][1] == expect.coords[i][1]);
  }
  CHECK_THROWS(tsp_parse_tsplib("NAME: x\nEOF\n"));
}

TEST_CASE("exhaustive search finds the known optimum on nine cities") {
  TspInstance nine = berlin12(DistanceMode::Euc2dRounded);
  nine.coords.resize(9);
  const auto [tour, cost] = brute_force_optimal(nine);
  CHECK(cost == (2820));
  // canonical orientation: starts at 0; either direction is the same cycle
  const std::vector<std::uint32_t> expect = {0, 1, 6, 2, 7, 8, 3, 5, 4};
  std::vector<std::uint32_t> reversed = {expect[0]};
  for (std::size_t i = expect.size() - 1; i >= 1; --i) reversed.push_back(expect[i]);
  CHECK((tour == expect || tour == reversed));
  CHECK(tour_cost(nine, tour) == (2820));
}

TEST_CASE("exhaustive search matches a precomputed exact-mode optimum") {
  TspInstance inst;
  inst.mode = DistanceMode::Euc2dExact;
  inst.coords = {{48.9318, 53.595}, {61.9487, 31.5999}, {40.9424, 69.86},
                 {37.5209, 3.0385}, {11.4695, 79.2184}, {54.9049, 27.516},
                 {81.1846, 2.023},  {93.9813, 89.312}};
  const auto [tour, cost] = brute_force_optimal(inst);
  CHECK(cost == doctest::Approx(327.7915169495919).epsilon(1e-12));
  const std::vector<std::uint32_t> expect = {0, 1, 5, 3, 6, 7, 4, 2};
  std::vector<std::uint32_t> reversed = {expect[0]};
  for (std::size_t i = expect.size() - 1; i >= 1; --i) reversed.push_back(expect[i]);
  CHECK((tour == expect || tour == reversed));
}

TEST_CASE("exhaustive search refuses oversized instances") {
  Rng rng(5);
  const TspInstance big = tsp_random_instance(12, 100.0, rng);
  CHECK_THROWS(brute_force_optimal(big));
}

TEST_CASE("nearest neighbour emits a permutation starting at the seed city") {
  const TspInstance inst = berlin12(DistanceMode::Euc2dRounded);
  std::uint64_t ops = 0;
  const auto order = nearest_neighbor_tour(inst, 3, &ops);
  CHECK(is_permutation_of_n(order, inst.n()));
  CHECK(order[0] == 3);
  CHECK(ops > 0);
}

TEST_CASE("two-opt never increases cost and reaches a local optimum") {
  Rng rng(11);
  const TspInstance inst = tsp_random_instance(20, 1000.0, rng);
  std::vector<std::uint32_t> order(20);
  for (std::uint32_t i = 0; i < 20; ++i) order[i] = i;
  rng.shuffle(order);
  const double before = tour_cost(inst, order);
  two_opt(inst, order);
  const double after = tour_cost(inst, order);
  CHECK(after <= before);
  CHECK(is_permutation_of_n(order, 20));
  // a second descent from a local optimum changes nothing
  std::vector<std::uint32_t> again = order;
  two_opt(inst, again);
  CHECK(tour_cost(inst, again) == doctest::Approx(after).epsilon(1e-12));
}

TEST_CASE("contextualization with a zero-prefixed digest is the identity") {
  const TspInstance inst = berlin12(DistanceMode::Euc2dExact);
  Digest zero{};
  const auto [moved, transform] = tsp_contextualize(inst, zero);
  REQUIRE(moved.n() == inst.n());
  for (std::uint32_t i = 0; i < inst.n(); ++i) {
    CHECK(transform.perm[i] == i);
    CHECK(moved.coords[i][0] == doctest::Approx(inst.coords[i][0]).epsilon(1e-12));
    CHECK(moved.coords[i][1] == doctest::Approx(inst.coords[i][1]).epsilon(1e-12));
  }
}

TEST_CASE("contextualization is a relabeled isometry in exact mode") {
  const TspInstance inst = berlin12(DistanceMode::Euc2dExact);
  const Digest ctx = sha256(std::vector<std::uint8_t>{1, 2, 3});
  const auto [moved, transform] = tsp_contextualize(inst, ctx);
  REQUIRE(moved.n() == inst.n());
  CHECK(is_permutation_of_n(transform.perm, inst.n()));

  // pairwise distances are preserved up to the relabeling
  for (std::uint32_t a = 0; a < inst.n(); ++a)
    for (std::uint32_t b = a + 1; b < inst.n(); ++b)
      CHECK(tsp_distance(moved, a, b) ==
            doctest::Approx(tsp_distance(inst, transform.perm[a], transform.perm[b]))
                .epsilon(1e-9));

  // a tour over the moved instance maps back to the same cycle cost on the
  // original — solution quality is context-independent
  std::vector<std::uint32_t> order(inst.n());
  for (std::uint32_t i = 0; i < inst.n(); ++i) order[i] = i;
  Rng rng(99);
  rng.shuffle(order);
  const auto original_order = tsp_reconstruct_order(order, transform);
  CHECK(is_permutation_of_n(original_order, inst.n()));
  CHECK(tour_cost(inst, original_order) == doctest::Approx(tour_cost(moved, order)).epsilon(1e-9));
}

TEST_CASE("solve respects the decision threshold and is deterministic") {
  Rng rng(21);
  const TspInstance base = tsp_random_instance(16, 1000.0, rng);
  TspTask task;
  task.instance = base;
  task.t_d = tsp_derive_threshold(base, 1.2, 42);
  CHECK(task.t_d > 0);

  const SolveOutcome a = tsp_solve(task, 7, 16);
  const SolveOutcome b = tsp_solve(task, 7, 16);
  REQUIRE(a.solved());
  REQUIRE(b.solved());
  CHECK(a.poc->solution_payload == b.poc->solution_payload);
  CHECK(a.elapsed_ops == b.elapsed_ops);

  std::vector<std::uint32_t> tour;
  REQUIRE(decode_tour(a.poc->solution_payload, tour));
  CHECK(is_permutation_of_n(tour, base.n()));
  CHECK(tour_cost(base, tour) <= task.t_d);
  CHECK(tsp_verify(task, a.poc->solution_payload));
}

TEST_CASE("an unreachable threshold exhausts the restart budget") {
  Rng rng(22);
  const TspInstance base = tsp_random_instance(12, 1000.0, rng);
  TspTask task;
  task.instance = base;
  task.t_d = 1.0;  // no 12-city tour over a 1000-unit extent is this short
  const SolveOutcome out = tsp_solve(task, 3, 4);
  CHECK(out.kind == SolveOutcome::Kind::Exhausted);
  CHECK(out.elapsed_ops > 0);
}

TEST_CASE("verification rejects non-tours and over-threshold tours") {
  const TspInstance inst = berlin12(DistanceMode::Euc2dRounded);
  TspTask task;
  task.instance = inst;
  task.t_d = 10000.0;

  std::vector<std::uint32_t> order(inst.n());
  for (std::uint32_t i = 0; i < inst.n(); ++i) order[i] = i;
  std::uint64_t ops = 0;
  REQUIRE(tour_cost(inst, order) <= task.t_d);
  CHECK(tsp_verify(task, encode_tour(order), &ops));
  CHECK(ops > 0);

  auto dup = order;
  dup[1] = dup[0];  // duplicate city
  CHECK_FALSE(tsp_verify(task, encode_tour(dup)));

  auto short_tour = order;
  short_tour.pop_back();
  CHECK_FALSE(tsp_verify(task, encode_tour(short_tour)));

  task.t_d = tour_cost(inst, order) - 1.0;
  CHECK_FALSE(tsp_verify(task, encode_tour(order)));

  CHECK_FALSE(tsp_verify(task, std::vector<std::uint8_t>{1, 2, 3}));  // garbage bytes
}

TEST_CASE("tour encoding round trips") {
  const std::vector<std::uint32_t> order = {3, 1, 4, 1u << 20, 0};
  std::vector<std::uint32_t> back;
  REQUIRE(decode_tour(encode_tour(order), back));
  CHECK(back == order);
  std::vector<std::uint8_t> bad = encode_tour(order);
  bad.pop_back();
  CHECK_FALSE(decode_tour(bad, back));
}

TEST_CASE("threshold scales linearly with alpha") {
  Rng rng(30);
  const TspInstance inst = tsp_random_instance(20, 500.0, rng);
  const double t1 = tsp_derive_threshold(inst, 1.0, 9);
  const double t2 = tsp_derive_threshold(inst, 1.5, 9);
  const double t3 = tsp_derive_threshold(inst, 2.0, 9);
  CHECK(t2 == doctest::Approx(1.5 * t1).epsilon(1e-12));
  CHECK(t3 == doctest::Approx(2.0 * t1).epsilon(1e-12));
  // looser thresholds can only make solving easier (fewer or equal ops)
  TspTask tight, loose;
  tight.instance = inst;
  tight.t_d = t1;
  loose.instance = inst;
  loose.t_d = t3;
  const SolveOutcome hard = tsp_solve(tight, 5, 64);
  const SolveOutcome easy = tsp_solve(loose, 5, 64);
  REQUIRE(easy.solved());
  if (hard.solved()) CHECK(easy.elapsed_ops <= hard.elapsed_ops);
}
