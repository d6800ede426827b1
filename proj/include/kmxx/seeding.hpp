#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "kmxx/geometry.hpp"
#include "kmxx/rng.hpp"

namespace kmxx {

// One sampling step. Candidates are point indices into X; drops[j] is the
// total-cost decrease if candidates[j] were taken. At the very first step of
// a run without prescribed centers there is no prior cost; cost_before is
// +inf there and drops hold the negated one-center total costs, so that the
// argmax-drop selection still picks the cheapest candidate.
struct StepRecord {
  int step = 0;  // 1-based
  std::vector<int> candidates;
  std::vector<double> drops;
  int chosen_slot = 0;
  double cost_before = 0.0;
  double cost_after = 0.0;
};

struct RunTrace {
  std::vector<StepRecord> steps;
  CenterSet final_centers;
  std::uint64_t rng_seed = 0;
  std::vector<int> prescribed;  // point indices fixed before step 1
  int n_candidates = 1;
};

struct RuleInput {
  const WeightedPointSet& X;
  const CenterSet& centers;  // centers before this step's insertion
  std::span<const int> candidates;
  std::span<const double> drops;
  int step;  // 1-based
  std::uint64_t trial_seed;

  // Deterministic sub-stream keyed by step; the only randomness a rule may use.
  Mt sub_rng(std::uint64_t tag = 0) const {
    return Mt(mix_seed(trial_seed ^ tag, static_cast<std::uint64_t>(step)));
  }
};

// Picks one candidate slot in [0, n_candidates). Must be deterministic given
// its input (plus sub_rng draws).
using Rule = std::function<int(const RuleInput&)>;

Rule greedy_rule();           // argmax drop, ties to the lowest slot
Rule first_candidate_rule();  // always slot 0

// Preference rule shared by the adversarial instances: take the first
// point of `prefer` seen among the candidates; otherwise take the lowest
// slot whose point is not in `avoid`; if every candidate is avoided, give in
// and take slot 0.
Rule prefer_avoid_rule(std::vector<int> prefer, std::vector<int> avoid);

struct SeedResult {
  CenterSet centers;
  RunTrace trace;
};

// One draw with probability cost(x, C)/total; empty C draws proportional to
// weight; zero total cost draws uniformly among non-center points and throws
// "exhausted" when there is none.
int d2_sample(const WeightedPointSet& X, const CenterSet& C, Mt& rng);

SeedResult seed_kmeanspp(const WeightedPointSet& X, int k, std::uint64_t seed,
                         std::span<const int> prescribed = {});
SeedResult seed_greedy(const WeightedPointSet& X, int k, int n_candidates,
                       std::uint64_t seed, std::span<const int> prescribed = {});
SeedResult seed_with_rule(const WeightedPointSet& X, int k, int n_candidates,
                          const Rule& rule, std::uint64_t seed,
                          std::span<const int> prescribed = {});
// k distinct points drawn uniformly at random; the no-guarantees baseline.
SeedResult seed_uniform(const WeightedPointSet& X, int k, std::uint64_t seed,
                        std::span<const int> prescribed = {});

struct LloydResult {
  CenterSet centers;
  std::vector<double> cost_history;  // cost after 0,1,2,... iterations
};

// Alternate nearest-center assignment and weighted centroid updates until
// the relative improvement drops below tol or max_iters is hit. Clusters
// that lose all their points (or all their weight) keep the previous center.
LloydResult lloyd_refine(const WeightedPointSet& X, const CenterSet& C,
                         int max_iters, double tol);

}  // namespace kmxx
