#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kmxx/geometry.hpp"
#include "kmxx/seeding.hpp"

#include "json.hpp"

namespace kmxx {

// A benchmark input: the point set, how many centers to pick, centers fixed
// up front, an optional reference solution, and named points the selection
// rules care about.
struct Instance {
  WeightedPointSet X;
  int k = 1;
  std::vector<int> prescribed;
  std::optional<CenterSet> ground_truth;  // reference centers
  double ground_truth_cost = 0.0;
  std::string ground_truth_kind;  // "subset" | "partition" | ""
  std::string rule_hint;          // "", "greedy", "first", "fig1", "appendix-a"
  std::map<std::string, int> roles;
  nlohmann::json metadata;
};

// Star of heavy hub d, k-2 unit leaves at distance k, a weight-k point c at
// distance k, and a unit point b one past c on the same ray. Asking for k
// centers makes exactly one point go uncovered.
Instance gen_fig1(int k);

// Orthogonal-axes variant with a prescribed hub: k-1 unit axis points at
// distance k, a heavy point c (weight k^(1-1/l)/2) on its own axis, and b
// forming an isosceles triangle with d and c. Paired with the "appendix-a"
// rule that grabs b on sight and dodges c.
Instance gen_appendix_a(int k, int l);

// Knobs for the layered hard instance. Defaults are the construction's own
// values; desk-scale runs override t_scale to make the phase count t
// reachable at small k.
struct GreedyLbConstants {
  double t_scale = 1000.0;    // divisor constant in the phase count t
  double m_dist = 10.0;       // m_i lies at m_dist * t * k^i from n_i
  double nm_weight = 1000.0;  // w(n_i) = w(m_i) = nm_weight / t
  double w_b_scale = 1.0;     // w(b) = w_b_scale / t
  double w_c = 0.1;
  double a_count_exp = 1.2;   // |A| = floor(k^a_count_exp)
  double e_count_exp = 0.5;   // |E_i| = floor(k^e_count_exp)
  double l_cap_exp = 0.1;     // advisory cap: l <= k^l_cap_exp
  double far_exp = 2.0;       // d(b, e0) = k^(far_exp * t)
  double solved_factor = 1e5;
  std::optional<int> t_override;
};

// Layered instance against the greedy rule: clock points E_i hold each phase
// open long enough for the paired attractors (n_i, m_i) to be found, while b
// stays barely sampleable. Construction is rejected (Error) if any of its
// structural self-checks fail: the clock-weight bracket, the per-phase drop
// ordering, the pairwise separation bounds, and coordinate magnitudes.
Instance gen_greedy_lb(int k, int l, const GreedyLbConstants& c = {});

// k isotropic unit-variance clusters with pairwise mean distance at least
// `separation` (lattice placement; d == 1 gives the collinear line of
// clusters). points_per_cluster draws per cluster.
Instance gen_gaussian_mixture(int k, int points_per_cluster, int d,
                              double separation, std::uint64_t seed);

// Remove the prescribed set by making each prescribed point heavy enough
// that it is picked in the opening steps anyway.
Instance lift_prescribed(const Instance& inst, double weight_factor = 1e6);

// Replace weights by multiplicities: round(scale * w) unit-weight copies per
// point.
Instance weights_to_multiplicity(const Instance& inst, double scale,
                                 std::uint64_t point_budget = 1'000'000);

// Re-runs the layered instance's structural self-checks (clock-weight
// bracket, drop orderings, separation bounds, coordinate magnitudes) on an
// already-built instance; throws Error on any failure.
void greedy_lb_structural_checks(const Instance& inst);

// Named selection rules; instance roles resolve the point indices.
Rule make_rule(const std::string& name, const Instance& inst);

nlohmann::json instance_to_json(const Instance& inst);
Instance instance_from_json(const nlohmann::json& j);
void save_instance(const Instance& inst, const std::string& path);
Instance load_instance(const std::string& path);

}  // namespace kmxx
