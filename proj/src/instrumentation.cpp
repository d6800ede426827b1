#include "kmxx/instrumentation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kmxx {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Step-by-step reconstruction of a run from its trace: per-point costs,
// per-cluster cost sums and coverage flags, in point-index order.
struct Replay {
  const WeightedPointSet& X;
  const RunTrace& trace;
  const OptimalPartition& part;
  std::vector<double> cur;
  std::vector<double> norms;
  std::vector<double> cluster_cost;
  std::vector<char> covered;
  std::size_t next = 0;  // next step to apply

  Replay(const WeightedPointSet& x, const RunTrace& t, const OptimalPartition& p)
      : X(x), trace(t), part(p), cur(x.size(), kInf), norms(x.size(), 0.0),
        cluster_cost(p.clusters.size(), kInf),
        covered(p.clusters.size(), 0) {
    for (std::size_t i = 0; i < X.size(); ++i)
      norms[i] = std::sqrt(X[i].coords.sqnorm());
    for (int idx : trace.prescribed) apply_point(idx);
    refresh_cluster_costs();
  }

  void apply_point(int idx) {
    const auto& cp = X[static_cast<std::size_t>(idx)].coords;
    const double cn = norms[static_cast<std::size_t>(idx)];
    for (std::size_t i = 0; i < X.size(); ++i) {
      const double cu = cur[i];
      if (cu == 0.0) continue;
      const double gap = norms[i] - cn;
      if (cu != kInf && X[i].weight * gap * gap >= cu) continue;
      const double nd = X[i].weight * sqdist(X[i].coords, cp);
      if (nd < cur[i]) cur[i] = nd;
    }
    covered[static_cast<std::size_t>(part.cluster_of[static_cast<std::size_t>(idx)])] = 1;
  }

  void refresh_cluster_costs() {
    std::fill(cluster_cost.begin(), cluster_cost.end(), 0.0);
    for (std::size_t i = 0; i < X.size(); ++i)
      cluster_cost[static_cast<std::size_t>(part.cluster_of[i])] += cur[i];
  }

  // applies step `next` (0-based into trace.steps)
  void advance() {
    const auto& rec = trace.steps[next];
    apply_point(rec.candidates[static_cast<std::size_t>(rec.chosen_slot)]);
    refresh_cluster_costs();
    ++next;
  }
};

}  // namespace

OptimalPartition partition_from_centers(const WeightedPointSet& X,
                                        const CenterSet& ref,
                                        std::string source) {
  if (ref.empty()) throw Error("partition: no reference centers");
  OptimalPartition part;
  part.reference_centers = ref;
  part.source = std::move(source);
  part.cluster_of.resize(X.size());
  part.clusters.resize(ref.size());
  for (std::size_t c = 0; c < ref.size(); ++c)
    part.clusters[c].label = static_cast<int>(c);
  double cost = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const auto [c, d2] = nearest_center(X[i].coords, ref);
    part.cluster_of[i] = c;
    part.clusters[static_cast<std::size_t>(c)].members.push_back(static_cast<int>(i));
    cost += X[i].weight * d2;
  }
  part.opt_cost = cost;
  return part;
}

ClusterStatus cluster_status(const WeightedPointSet& X,
                             std::span<const int> members, const CenterSet& C,
                             double solved_factor) {
  ClusterStatus st;
  if (C.empty()) return st;  // nothing covered, nothing solved
  for (std::size_t c = 0; c < C.size() && !st.covered; ++c) {
    const auto& prov = C.provenance(c);
    if (prov && prov->point_index >= 0) {
      for (int m : members)
        if (m == prov->point_index) {
          st.covered = true;
          break;
        }
      if (st.covered) break;
    }
    for (int m : members)
      if (X[static_cast<std::size_t>(m)].coords == C.coords(c)) {
        st.covered = true;
        break;
      }
  }
  double cost = 0.0;
  for (int m : members) cost += point_cost(X[static_cast<std::size_t>(m)], C);
  const double opt1 = centroid_and_opt1(X, members).cost;
  st.solved = cost <= solved_factor * opt1;
  return st;
}

long HitSeries::total() const {
  long t = 0;
  for (long v : total_per_cluster) t += v;
  return t;
}

long HitSeries::hits_from(int cluster, int step) const {
  long t = 0;
  for (const auto& [s, n] : events_per_cluster[static_cast<std::size_t>(cluster)])
    if (s >= step) t += n;
  return t;
}

HitSeries hit_series(const WeightedPointSet& X, const RunTrace& trace,
                     const OptimalPartition& part, double solved_factor) {
  const std::size_t kc = part.clusters.size();
  std::vector<double> opt1(kc);
  for (std::size_t c = 0; c < kc; ++c)
    opt1[c] = centroid_and_opt1(X, part.clusters[c].members).cost;

  HitSeries out;
  out.total_per_cluster.assign(kc, 0);
  out.events_per_cluster.resize(kc);
  out.per_step_total.assign(trace.steps.size(), 0);

  Replay rp(X, trace, part);
  for (std::size_t s = 0; s < trace.steps.size(); ++s) {
    const auto& rec = trace.steps[s];
    // status with respect to the centers before this step's insertion
    for (int cand : rec.candidates) {
      const auto c = static_cast<std::size_t>(
          part.cluster_of[static_cast<std::size_t>(cand)]);
      if (rp.covered[c]) continue;
      if (rp.cluster_cost[c] <= solved_factor * opt1[c]) continue;
      ++out.total_per_cluster[c];
      ++out.per_step_total[s];
      auto& ev = out.events_per_cluster[c];
      if (!ev.empty() && ev.back().first == rec.step)
        ++ev.back().second;
      else
        ev.emplace_back(rec.step, 1);
    }
    rp.advance();
  }
  return out;
}

NeighborhoodSeries neighborhood_series(const WeightedPointSet& X,
                                       const RunTrace& trace,
                                       const OptimalPartition& part,
                                       int cluster_label) {
  const auto& K = part.clusters.at(static_cast<std::size_t>(cluster_label));
  const SparseVec mu = centroid_and_opt1(X, K.members).centroid;
  const int k_total = static_cast<int>(trace.steps.size() + trace.prescribed.size());

  NeighborhoodSeries out;
  Replay rp(X, trace, part);
  double radius = 0.0;
  double dist = kInf;  // d(mu, C_i), min over all centers so far
  for (int idx : trace.prescribed)
    dist = std::min(dist,
                    std::sqrt(sqdist(mu, X[static_cast<std::size_t>(idx)].coords)));
  for (std::size_t s = 0; s < trace.steps.size(); ++s) {
    rp.advance();
    const auto& rec = trace.steps[s];
    const auto& chosen =
        X[static_cast<std::size_t>(
              rec.candidates[static_cast<std::size_t>(rec.chosen_slot)])]
            .coords;
    dist = std::min(dist, std::sqrt(sqdist(mu, chosen)));
    const int step = rec.step;
    const double total = [&] {
      double t = 0.0;
      for (double c : rp.cur) t += c;
      return t;
    }();
    const double kcost = rp.cluster_cost[static_cast<std::size_t>(cluster_label)];
    if (!out.start_defined) {
      if (kcost < total / static_cast<double>(k_total)) continue;
      out.start_defined = true;
      out.start_step = step;
      radius = dist;
    } else {
      // sticky update: the radius moves only when the distance fell to a
      // tenth of it or less
      if (dist <= radius / 10.0) radius = dist;
    }
    NeighborhoodRow row;
    row.step = step;
    row.radius = radius;
    const double rs = radius / 100.0, rb = radius / 10.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
      const double d2 = sqdist(X[i].coords, mu);
      if (d2 <= rb * rb) {
        ++row.big_count;
        row.big_weight += X[i].weight;
        if (d2 <= rs * rs) {
          ++row.small_count;
          row.small_weight += X[i].weight;
        }
      }
    }
    out.rows.push_back(row);
  }
  return out;
}

std::vector<bool> step_classes(const WeightedPointSet& X, const RunTrace& trace,
                               const OptimalPartition& part) {
  std::vector<bool> good;
  good.reserve(trace.steps.size());
  Replay rp(X, trace, part);
  for (const auto& rec : trace.steps) {
    const int chosen = rec.candidates[static_cast<std::size_t>(rec.chosen_slot)];
    const auto c = static_cast<std::size_t>(
        part.cluster_of[static_cast<std::size_t>(chosen)]);
    good.push_back(rp.covered[c] == 0);
    rp.advance();
  }
  return good;
}

std::vector<double> avg_uncovered_cost(const WeightedPointSet& X,
                                       const RunTrace& trace,
                                       const OptimalPartition& part) {
  std::vector<double> out;
  Replay rp(X, trace, part);
  for (std::size_t s = 0; s < trace.steps.size(); ++s) {
    rp.advance();
    long u = 0;
    double cost = 0.0;
    for (std::size_t c = 0; c < part.clusters.size(); ++c) {
      if (rp.covered[c]) continue;
      ++u;
      cost += rp.cluster_cost[c];
    }
    if (u == 0) break;
    out.push_back(cost / static_cast<double>(u));
  }
  return out;
}

OptimalPartition partition_from_labels(const WeightedPointSet& X,
                                       std::span<const int> labels,
                                       double opt_cost, std::string source) {
  if (labels.size() != X.size()) throw Error("partition: label size mismatch");
  int parts = 0;
  for (int l : labels) parts = std::max(parts, l + 1);
  OptimalPartition part;
  part.source = std::move(source);
  part.opt_cost = opt_cost;
  part.cluster_of.assign(labels.begin(), labels.end());
  part.clusters.resize(static_cast<std::size_t>(parts));
  for (int p = 0; p < parts; ++p)
    part.clusters[static_cast<std::size_t>(p)].label = p;
  for (std::size_t i = 0; i < X.size(); ++i)
    part.clusters[static_cast<std::size_t>(labels[i])].members.push_back(
        static_cast<int>(i));
  CenterSet ref(X.dim());
  for (const auto& cl : part.clusters) {
    if (cl.members.empty())
      ref.add(SparseVec{});
    else
      ref.add(centroid_and_opt1(X, cl.members).centroid);
  }
  part.reference_centers = std::move(ref);
  return part;
}

std::vector<double> cluster_opt1(const WeightedPointSet& X,
                                 const OptimalPartition& part) {
  std::vector<double> opt1(part.clusters.size(), 0.0);
  for (std::size_t c = 0; c < part.clusters.size(); ++c) {
    const auto& members = part.clusters[c].members;
    if (members.empty()) continue;
    double w = 0.0;
    for (int m : members) w += X[static_cast<std::size_t>(m)].weight;
    if (w > 0.0) opt1[c] = centroid_and_opt1(X, members).cost;
  }
  return opt1;
}

TrialMeasures measure_trial(const WeightedPointSet& X, const RunTrace& trace,
                            const OptimalPartition& part,
                            std::span<const double> opt1,
                            double solved_factor) {
  TrialMeasures out;
  out.hit_per_cluster.assign(part.clusters.size(), 0);
  Replay rp(X, trace, part);
  for (const auto& rec : trace.steps) {
    for (int cand : rec.candidates) {
      const auto c = static_cast<std::size_t>(
          part.cluster_of[static_cast<std::size_t>(cand)]);
      if (rp.covered[c]) continue;
      if (rp.cluster_cost[c] <= solved_factor * opt1[c]) continue;
      ++out.hit_per_cluster[c];
    }
    const int chosen = rec.candidates[static_cast<std::size_t>(rec.chosen_slot)];
    const auto cc = static_cast<std::size_t>(
        part.cluster_of[static_cast<std::size_t>(chosen)]);
    if (rp.covered[cc])
      ++out.bad_steps;
    else
      ++out.good_steps;
    rp.advance();
  }
  return out;
}

}  // namespace kmxx
