#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kmxx/geometry.hpp"

namespace kmxx {

struct ExactOptResult {
  double opt_cost = 0.0;
  std::vector<int> centers;  // subset-enum: chosen point indices
  std::vector<int> labels;   // partition-enum: point index -> part
  std::string method;        // "subset-enum" | "partition-enum"
};

// Exact minimum over all k-subsets of X taken as centers. Throws when the
// number of subsets exceeds the budget; the message carries the required
// count so callers can downscale.
ExactOptResult opt_subset(const WeightedPointSet& X, int k,
                          std::uint64_t budget = 2'000'000);

// Exact continuous optimum: minimum over partitions of X into at most k
// parts of the summed one-center optima. Budget counts enumerated
// partitions.
ExactOptResult opt_partition(const WeightedPointSet& X, int k,
                             std::uint64_t budget = 2'000'000);

// Average of the one-center cost over a uniformly random member center.
// Requires unit weights.
double expected_uniform_cost(const WeightedPointSet& X,
                             std::span<const int> members);

// Exact expectation of the cluster cost after adding one member sampled
// with probability proportional to its current cost. Requires positive
// current cluster cost.
double expected_d2_cost(const WeightedPointSet& X, std::span<const int> members,
                        const CenterSet& C);

// Number of partitions of an n-set into at most k nonempty parts.
std::uint64_t partition_count(int n, int k);
std::uint64_t subset_count(int n, int k);

}  // namespace kmxx
