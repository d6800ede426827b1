#include "test_support.hpp"

#include <algorithm>

#include "kmxx/geometry.hpp"
#include "kmxx/instances.hpp"
#include "kmxx/instrumentation.hpp"
#include "kmxx/oracle.hpp"
#include "kmxx/seeding.hpp"
#include "kmxx/stats.hpp"

using namespace kmxx;

namespace {

WeightedPoint wp(std::vector<double> coords, double w) {
  return {SparseVec::from_dense(coords), w};
}

// Fully independent hit counter: rebuilds the center set step by step and
// recomputes coverage and cluster costs from the public API.
std::vector<long> naive_hits(const WeightedPointSet& X, const RunTrace& trace,
                             const OptimalPartition& part, double factor) {
  std::vector<long> hits(part.clusters.size(), 0);
  std::vector<int> taken(trace.prescribed.begin(), trace.prescribed.end());
  for (const auto& rec : trace.steps) {
    for (int cand : rec.candidates) {
      const auto c = static_cast<std::size_t>(
          part.cluster_of[static_cast<std::size_t>(cand)]);
      const auto& members = part.clusters[c].members;
      bool covered = false;
      for (int t : taken)
        covered = covered || std::find(members.begin(), members.end(), t) !=
                                 members.end();
      bool solved = false;
      if (!taken.empty()) {
        const CenterSet C = CenterSet::from_points(X, taken);
        double cost = 0.0;
        for (int m : members) cost += point_cost(X[static_cast<std::size_t>(m)], C);
        solved = cost <= factor * centroid_and_opt1(X, members).cost;
      }
      if (!covered && !solved) ++hits[c];
    }
    taken.push_back(rec.candidates[static_cast<std::size_t>(rec.chosen_slot)]);
  }
  return hits;
}

OptimalPartition exact_partition(const WeightedPointSet& X, int k) {
  const auto r = opt_partition(X, k);
  return partition_from_labels(X, r.labels, r.opt_cost, "exact");
}

void test_cluster_status() {
  WeightedPointSet X(1, {wp({-1}, 1), wp({1}, 1), wp({50}, 1)});
  const std::vector<int> K = {0, 1};
  {
    CenterSet C(1);
    C.add(X[0].coords, Provenance{1, 0, 0});
    CHECK(cluster_status(X, K, C).covered);
  }
  {
    // centroid of K is not a member: uncovered but solved on the spot
    CenterSet C(1);
    C.add(centroid_and_opt1(X, K).centroid);
    const auto st = cluster_status(X, K, C);
    CHECK(!st.covered);
    CHECK(st.solved);
  }
  {
    // a very remote center leaves the cluster unsolved
    CenterSet C(1);
    C.add(SparseVec::from_dense(std::vector<double>{2e5}));
    const auto st = cluster_status(X, K, C);
    CHECK(!st.covered);
    CHECK(!st.solved);
  }
  {
    // the solved factor is configurable
    CenterSet C(1);
    C.add(SparseVec::from_dense(std::vector<double>{5.0}));
    CHECK(cluster_status(X, K, C, 1e5).solved);
    CHECK(!cluster_status(X, K, C, 1.0).solved);
  }
  {
    // empty center set: neither covered nor solved
    const auto st = cluster_status(X, K, CenterSet(1));
    CHECK(!st.covered);
    CHECK(!st.solved);
  }
}

void test_hit_series() {
  Mt rng(41);
  // single cluster: only first-step candidates can hit, at most l of them
  {
    const auto X = random_pointset(rng, 6, 2, true);
    const auto part = exact_partition(X, 1);
    const auto r = seed_greedy(X, 3, 4, 99);
    const auto hs = hit_series(X, r.trace, part);
    CHECK(hs.total_per_cluster.size() == 1);
    CHECK(hs.total() <= 4);
    CHECK(hs.per_step_total[1] == 0);  // covered after step 1
    CHECK(hs.per_step_total[2] == 0);
  }
  // a cluster covered by a prescribed center never counts hits
  {
    const auto X = random_pointset(rng, 8, 2, true);
    const auto part = exact_partition(X, 2);
    const int inside = part.clusters[0].members.front();
    const std::vector<int> prescribed = {inside};
    const auto r = seed_greedy(X, 3, 3, 7, prescribed);
    const auto hs = hit_series(X, r.trace, part);
    CHECK(hs.total_per_cluster[0] == 0);
  }
  // agreement with the independent naive counter, several shapes
  for (int rep = 0; rep < 12; ++rep) {
    const auto X = random_pointset(rng, 9, 2, rep % 2 == 0);
    const auto part = exact_partition(X, 3);
    const auto r = seed_greedy(X, 4, 1 + rep % 4, 1000 + rep);
    const auto hs = hit_series(X, r.trace, part);
    const auto expected = naive_hits(X, r.trace, part, kSolvedFactor);
    CHECK(hs.total_per_cluster == expected);
    // trivial cap and suffix accounting
    CHECK(hs.total() <= static_cast<long>((1 + rep % 4)) * 4);
    long per_cluster_from_events = 0;
    for (std::size_t c = 0; c < part.clusters.size(); ++c)
      per_cluster_from_events += hs.hits_from(static_cast<int>(c), 1);
    CHECK(per_cluster_from_events == hs.total());
  }
  // tighter solved factor stops counting earlier
  for (int rep = 0; rep < 6; ++rep) {
    const auto X = random_pointset(rng, 9, 2, true);
    const auto part = exact_partition(X, 3);
    const auto r = seed_greedy(X, 4, 2, 2000 + rep);
    const auto tight = hit_series(X, r.trace, part, 1.0);
    const auto expected = naive_hits(X, r.trace, part, 1.0);
    CHECK(tight.total_per_cluster == expected);
  }
}

void test_neighborhood_series() {
  // center planted exactly at the cluster centroid: the radius collapses
  {
    WeightedPointSet X(1, {wp({-1}, 1), wp({1}, 1), wp({30}, 1), wp({60}, 1)});
    const auto part = exact_partition(X, 2);
    // build a synthetic trace: take point 2, then the centroid twin 3... use
    // a run and then check generic invariants instead of hand-picking.
    const auto r = seed_greedy(X, 3, 2, 5);
    for (std::size_t cl = 0; cl < part.clusters.size(); ++cl) {
      const auto ns = neighborhood_series(X, r.trace, part, static_cast<int>(cl));
      if (!ns.start_defined) continue;
      for (std::size_t i = 1; i < ns.rows.size(); ++i) {
        CHECK(ns.rows[i].radius <= ns.rows[i - 1].radius);
        // a radius change is a collapse by 10x or more
        if (ns.rows[i].radius != ns.rows[i - 1].radius)
          CHECK(ns.rows[i].radius <= ns.rows[i - 1].radius / 10.0);
      }
      for (const auto& row : ns.rows) {
        CHECK(row.small_count <= row.big_count);
        CHECK(row.small_weight <= row.big_weight + 1e-12);
      }
    }
  }
  // balls count points: hand-checkable line. The optimal 2-partition is
  // {-1, 1, 45} (centroid 15) against {600, 1000}; with centers at 1000 and
  // then 600 the tracked radius is 585, so the small ball (5.85) is empty
  // and the big ball (58.5) holds the whole cluster.
  {
    WeightedPointSet X(1, {wp({-1}, 1), wp({1}, 1), wp({45}, 1), wp({600}, 1),
                           wp({1000}, 1)});
    const auto part = exact_partition(X, 2);
    const int cl0 = part.cluster_of[0];
    CHECK(part.clusters[static_cast<std::size_t>(cl0)].members.size() == 3);
    RunTrace tr;
    tr.prescribed = {4};
    StepRecord s1;
    s1.step = 1;
    s1.candidates = {3};
    s1.drops = {0.0};
    s1.chosen_slot = 0;
    s1.cost_before = 1.0;
    s1.cost_after = 1.0;
    tr.steps.push_back(s1);
    const auto ns = neighborhood_series(X, tr, part, cl0);
    CHECK(ns.start_defined);
    if (ns.start_defined) {
      CHECK(near_rel(ns.rows[0].radius, 585.0, 1e-12));
      CHECK(ns.rows[0].small_count == 0);
      CHECK(ns.rows[0].big_count == 3);
    }
  }
  // band check on an unsolved step: points in the small ball carry cost
  // between R^2/200 and 3R^2 (per unit weight)
  {
    Mt rng(42);
    int checked = 0;
    for (int rep = 0; rep < 20; ++rep) {
      const auto X = random_pointset(rng, 10, 2, true);
      const auto part = exact_partition(X, 3);
      const auto r = seed_greedy(X, 3, 2, 300 + rep);
      const auto opt1 = cluster_opt1(X, part);
      for (std::size_t cl = 0; cl < part.clusters.size(); ++cl) {
        const auto ns = neighborhood_series(X, r.trace, part, static_cast<int>(cl));
        if (!ns.start_defined) continue;
        const auto mu = centroid_and_opt1(X, part.clusters[cl].members).centroid;
        for (const auto& row : ns.rows) {
          // rebuild centers up to this step
          std::vector<int> taken(r.trace.prescribed.begin(),
                                 r.trace.prescribed.end());
          for (const auto& rec : r.trace.steps) {
            if (rec.step > row.step) break;
            taken.push_back(
                rec.candidates[static_cast<std::size_t>(rec.chosen_slot)]);
          }
          const CenterSet C = CenterSet::from_points(X, taken);
          double kc = 0.0;
          for (int m : part.clusters[cl].members)
            kc += point_cost(X[static_cast<std::size_t>(m)], C);
          if (kc <= kSolvedFactor * opt1[cl]) continue;  // solved: band not claimed
          const double R = row.radius;
          for (std::size_t i = 0; i < X.size(); ++i) {
            if (sqdist(X[i].coords, mu) <= (R / 100.0) * (R / 100.0)) {
              const double cost = point_cost(X[i], C);
              CHECK(cost >= R * R / 200.0 - 1e-12);
              CHECK(cost <= 3.0 * R * R + 1e-12);
              ++checked;
            }
          }
        }
      }
    }
    CHECK(checked > 0);
  }
}

void test_step_classes() {
  Mt rng(43);
  for (int rep = 0; rep < 10; ++rep) {
    const auto X = random_pointset(rng, 9, 2, true);
    const auto part = exact_partition(X, 3);
    const auto r = seed_greedy(X, 5, 2, 50 + rep);
    const auto classes = step_classes(X, r.trace, part);
    CHECK(classes.size() == 5);
    CHECK(classes[0]);  // nothing is covered before the first step
    // good-step count equals the number of clusters covered at the end
    long good = 0;
    for (bool g : classes) good += g;
    std::vector<char> covered(part.clusters.size(), 0);
    for (const auto& rec : r.trace.steps)
      covered[static_cast<std::size_t>(part.cluster_of[static_cast<std::size_t>(
          rec.candidates[static_cast<std::size_t>(rec.chosen_slot)])])] = 1;
    long ncov = 0;
    for (char c : covered) ncov += c;
    CHECK(good == ncov);
  }
  // all clusters covered: every later step is bad
  {
    WeightedPointSet X(1, {wp({0}, 1), wp({0.1}, 1), wp({10}, 1), wp({10.1}, 1)});
    const auto part = exact_partition(X, 2);
    const auto r = seed_greedy(X, 4, 1, 3);
    const auto classes = step_classes(X, r.trace, part);
    bool both_covered = false;
    std::vector<char> covered(2, 0);
    for (std::size_t s = 0; s < classes.size(); ++s) {
      if (both_covered) CHECK(!classes[s]);
      covered[static_cast<std::size_t>(
          part.cluster_of[static_cast<std::size_t>(r.trace.steps[s].candidates
              [static_cast<std::size_t>(r.trace.steps[s].chosen_slot)])])] = 1;
      both_covered = covered[0] && covered[1];
    }
  }
}

void test_avg_uncovered() {
  // three singleton unit clusters covered one per step: the series is the
  // remaining-cluster cost averaged over the remaining count
  {
    WeightedPointSet X(1, {wp({0}, 1), wp({100}, 1), wp({203}, 1)});
    const auto part = exact_partition(X, 3);
    const auto r = seed_kmeanspp(X, 3, 8);
    const auto series = avg_uncovered_cost(X, r.trace, part);
    // series ends when everything is covered; for singletons coverage is one
    // cluster per step, so there are exactly two entries
    CHECK(series.size() == 2);
    // entries recomputable by hand: after i centers the uncovered singletons
    // each pay their squared distance to the nearest center
    std::vector<int> taken;
    for (std::size_t s = 0; s + 1 < r.trace.steps.size(); ++s) {
      taken.push_back(r.trace.steps[s].candidates[static_cast<std::size_t>(
          r.trace.steps[s].chosen_slot)]);
      const CenterSet C = CenterSet::from_points(X, taken);
      double cost = 0.0;
      long u = 0;
      for (std::size_t p = 0; p < X.size(); ++p) {
        if (std::find(taken.begin(), taken.end(), static_cast<int>(p)) !=
            taken.end())
          continue;
        cost += point_cost(X[p], C);
        ++u;
      }
      CHECK(near_rel(series[s], cost / static_cast<double>(u), 1e-12));
    }
  }
  // one-candidate drift: the mean of the series is nonincreasing within
  // 3 sigma at every index
  {
    Mt rng(44);
    const auto X = random_pointset(rng, 12, 2, true);
    const auto part = exact_partition(X, 4);
    const int N = 10000;
    const int k = 4;
    std::vector<std::vector<double>> diffs(static_cast<std::size_t>(k - 1));
    for (int i = 0; i < N; ++i) {
      const auto r = seed_kmeanspp(X, k, 500000 + i);
      const auto series = avg_uncovered_cost(X, r.trace, part);
      for (std::size_t s = 0; s + 1 < series.size(); ++s)
        diffs[s].push_back(series[s + 1] - series[s]);
    }
    for (const auto& d : diffs) {
      if (d.size() < 100) continue;
      const double m = kmxx::mean(d);
      const double sd = kmxx::sample_sd(d);
      CHECK_MSG(m <= 3.0 * sd / std::sqrt(static_cast<double>(d.size())),
                "drift " << m);
    }
  }
}

void test_measure_trial_and_cap() {
  Mt rng(45);
  // measure_trial agrees with the separate functions
  for (int rep = 0; rep < 10; ++rep) {
    const auto X = random_pointset(rng, 10, 2, true);
    const auto part = exact_partition(X, 3);
    const auto opt1 = cluster_opt1(X, part);
    const int l = 1 + rep % 3;
    const auto r = seed_greedy(X, 4, l, 9000 + rep);
    const auto tm = measure_trial(X, r.trace, part, opt1);
    const auto hs = hit_series(X, r.trace, part);
    const auto classes = step_classes(X, r.trace, part);
    long good = 0;
    for (bool g : classes) good += g;
    CHECK(tm.good_steps == good);
    CHECK(tm.bad_steps == static_cast<long>(classes.size()) - good);
    long ht = 0;
    for (long h : tm.hit_per_cluster) ht += h;
    CHECK(ht == hs.total());
    CHECK(ht <= static_cast<long>(l) * 4);
  }
}

void test_big_ball_bound() {
  // on unit-weight data, for steps past the tracking start the big ball
  // holds at most 4 * k * |K| points
  Mt rng(46);
  int rows_checked = 0;
  for (int rep = 0; rep < 15; ++rep) {
    const auto X = random_pointset(rng, 12, 2, true);
    const auto part = exact_partition(X, 3);
    const int k = 4;
    const auto r = seed_greedy(X, k, 2, 700 + rep);
    for (std::size_t cl = 0; cl < part.clusters.size(); ++cl) {
      const auto ns = neighborhood_series(X, r.trace, part, static_cast<int>(cl));
      if (!ns.start_defined) continue;
      const long cap = 4L * k * static_cast<long>(part.clusters[cl].members.size());
      for (const auto& row : ns.rows) {
        CHECK_MSG(row.big_count <= cap, row.big_count << " > " << cap);
        ++rows_checked;
      }
    }
  }
  CHECK(rows_checked > 0);
}

}  // namespace

int main() {
  test_cluster_status();
  test_hit_series();
  test_neighborhood_series();
  test_step_classes();
  test_avg_uncovered();
  test_measure_trial_and_cap();
  test_big_ball_bound();
  RUN_SUMMARY("instrumentation");
}
