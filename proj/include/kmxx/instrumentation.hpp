#pragma once

#include <string>
#include <vector>

#include "kmxx/geometry.hpp"
#include "kmxx/seeding.hpp"

namespace kmxx {

// A reference clustering against which runs are measured. Clusters are the
// nearest-center partition of the reference centers (ties to the lowest
// center index); opt_cost is the cost of X under those centers.
struct OptimalPartition {
  std::vector<ClusterRef> clusters;
  CenterSet reference_centers;
  double opt_cost = 0.0;
  std::vector<int> cluster_of;  // point index -> cluster label
  std::string source;           // "exact" | "ground-truth" | "heuristic"
};

OptimalPartition partition_from_centers(const WeightedPointSet& X,
                                        const CenterSet& ref,
                                        std::string source);

constexpr double kSolvedFactor = 1e5;

struct ClusterStatus {
  bool covered = false;
  bool solved = false;
};

// covered: some center coincides with a member point; solved: current cost
// within solved_factor of the one-center optimum.
ClusterStatus cluster_status(const WeightedPointSet& X,
                             std::span<const int> members, const CenterSet& C,
                             double solved_factor = kSolvedFactor);

struct HitSeries {
  std::vector<long> total_per_cluster;
  // per cluster: (step, hits at that step), steps ascending
  std::vector<std::vector<std::pair<int, int>>> events_per_cluster;
  std::vector<int> per_step_total;  // index step-1

  long total() const;
  long hits_from(int cluster, int step) const;  // hits at steps >= step
};

// Counts candidate samples landing in a cluster while that cluster is
// neither covered nor solved with respect to the centers before the step.
HitSeries hit_series(const WeightedPointSet& X, const RunTrace& trace,
                     const OptimalPartition& part,
                     double solved_factor = kSolvedFactor);

struct NeighborhoodRow {
  int step = 0;
  double radius = 0.0;  // hysteresis-tracked distance to the centers
  long small_count = 0;
  long big_count = 0;
  double small_weight = 0.0;
  double big_weight = 0.0;
};

struct NeighborhoodSeries {
  bool start_defined = false;
  int start_step = 0;  // first step where the cluster cost is >= total/k
  std::vector<NeighborhoodRow> rows;
};

// Tracks, for one cluster, the distance from its centroid to the chosen
// centers with sticky updates (the radius only moves when it shrinks by a
// factor of 10), plus the sizes of the balls of radius R/100 and R/10.
NeighborhoodSeries neighborhood_series(const WeightedPointSet& X,
                                       const RunTrace& trace,
                                       const OptimalPartition& part,
                                       int cluster_label);

// true = the chosen center landed in a cluster that was still uncovered.
std::vector<bool> step_classes(const WeightedPointSet& X, const RunTrace& trace,
                               const OptimalPartition& part);

// cost of points in uncovered clusters divided by the number of uncovered
// clusters, after 1, 2, ... centers; the series stops when all clusters are
// covered.
std::vector<double> avg_uncovered_cost(const WeightedPointSet& X,
                                       const RunTrace& trace,
                                       const OptimalPartition& part);

// Partition built directly from labels (the exact enumeration path);
// reference centers are the part centroids, opt_cost is taken as given.
OptimalPartition partition_from_labels(const WeightedPointSet& X,
                                       std::span<const int> labels,
                                       double opt_cost, std::string source);

// One-center optima per cluster, precomputed once per reference partition.
std::vector<double> cluster_opt1(const WeightedPointSet& X,
                                 const OptimalPartition& part);

// Per-trial counters from one replay pass: good/bad step counts and the
// per-cluster hit totals (same accounting as step_classes + hit_series).
struct TrialMeasures {
  long good_steps = 0;
  long bad_steps = 0;
  std::vector<long> hit_per_cluster;
};

TrialMeasures measure_trial(const WeightedPointSet& X, const RunTrace& trace,
                            const OptimalPartition& part,
                            std::span<const double> opt1,
                            double solved_factor = kSolvedFactor);

}  // namespace kmxx
