#include "kmxx/seeding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kmxx {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Incremental run state. cur[i] is the current cost of point i; +inf before
// any center exists so that the first min-update installs the exact value.
struct Engine {
  const WeightedPointSet& X;
  CenterSet centers;
  std::vector<double> cur;
  std::vector<char> is_center;
  std::vector<double> norms;  // ||x||, lower-bound filter for distances
  std::vector<double> cums;   // scratch for cumulative sums

  explicit Engine(const WeightedPointSet& x)
      : X(x),
        centers(x.dim()),
        cur(x.size(), kInf),
        is_center(x.size(), 0),
        norms(x.size(), 0.0),
        cums(x.size(), 0.0) {
    for (std::size_t i = 0; i < X.size(); ++i)
      norms[i] = std::sqrt(X[i].coords.sqnorm());
  }

  double current_total() const {
    double s = 0.0;
    for (double c : cur) s += c;
    return s;
  }

  // Cost of X if c were the only center (used for the first step of a run
  // with no prescribed centers).
  double one_center_cost(int cand) const {
    const SparseVec& cp = X[static_cast<std::size_t>(cand)].coords;
    double s = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i)
      s += X[i].weight * sqdist(X[i].coords, cp);
    return s;
  }

  // Total-cost decrease if cand became a center. Terms that are provably
  // zero (already-zero cost, or the norm gap alone exceeds the current
  // cost) are skipped; skipping exact zeros leaves the float sum unchanged.
  double drop_of(int cand) const {
    const SparseVec& cp = X[static_cast<std::size_t>(cand)].coords;
    const double cn = norms[static_cast<std::size_t>(cand)];
    double s = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
      const double cu = cur[i];
      if (cu == 0.0) continue;
      const double gap = norms[i] - cn;
      if (X[i].weight * gap * gap >= cu) continue;
      const double nd = X[i].weight * sqdist(X[i].coords, cp);
      if (nd < cu) s += cu - nd;
    }
    return s;
  }

  void add_center(int cand, Provenance prov) {
    const SparseVec& cp = X[static_cast<std::size_t>(cand)].coords;
    const double cn = norms[static_cast<std::size_t>(cand)];
    for (std::size_t i = 0; i < X.size(); ++i) {
      const double cu = cur[i];
      if (cu == 0.0) continue;
      const double gap = norms[i] - cn;
      if (cu != kInf && X[i].weight * gap * gap >= cu) continue;
      const double nd = X[i].weight * sqdist(X[i].coords, cp);
      if (nd < cu) cur[i] = nd;
    }
    is_center[static_cast<std::size_t>(cand)] = 1;
    centers.add(cp, prov);
  }

  // One draw: cost-proportional once centers exist (weight-proportional
  // before), uniform over non-center points when the total mass is zero.
  int sample(Mt& rng) {
    double total = 0.0;
    if (centers.empty()) {
      for (std::size_t i = 0; i < X.size(); ++i) {
        total += X[i].weight;
        cums[i] = total;
      }
    } else {
      for (std::size_t i = 0; i < X.size(); ++i) {
        total += cur[i];
        cums[i] = total;
      }
    }
    const double u = uniform01(rng);
    if (total > 0.0) {
      const double target = u * total;
      auto it = std::upper_bound(cums.begin(), cums.end(), target);
      if (it == cums.end()) {
        // u*total rounded up to the full mass; take the last positive slot
        for (std::size_t i = cums.size(); i-- > 0;)
          if (i == 0 || cums[i - 1] < total) return static_cast<int>(i);
      }
      return static_cast<int>(it - cums.begin());
    }
    std::size_t m = 0;
    for (char c : is_center) m += c == 0;
    if (m == 0) throw Error("exhausted");
    std::size_t pick = std::min(static_cast<std::size_t>(u * static_cast<double>(m)),
                                m - 1);
    for (std::size_t i = 0; i < X.size(); ++i) {
      if (is_center[i]) continue;
      if (pick == 0) return static_cast<int>(i);
      --pick;
    }
    throw Error("exhausted");
  }
};

SeedResult run_seeding(const WeightedPointSet& X, int k, int n_candidates,
                       const Rule& rule, std::uint64_t seed,
                       std::span<const int> prescribed) {
  if (k < 1) throw Error("seeding: k must be at least 1");
  if (n_candidates < 1) throw Error("seeding: need at least one candidate");
  const std::size_t want =
      static_cast<std::size_t>(k) + prescribed.size();
  if (want > X.distinct_points())
    throw Error("seeding: k exceeds the number of distinct points");

  Engine eng(X);
  for (int idx : prescribed) {
    if (idx < 0 || static_cast<std::size_t>(idx) >= X.size())
      throw Error("seeding: prescribed index out of range");
    eng.add_center(idx, Provenance{0, 0, idx});
  }

  Mt rng(seed);
  RunTrace trace;
  trace.rng_seed = seed;
  trace.prescribed.assign(prescribed.begin(), prescribed.end());
  trace.n_candidates = n_candidates;

  for (int step = 1; step <= k; ++step) {
    StepRecord rec;
    rec.step = step;
    const bool cold = eng.centers.empty();
    rec.cost_before = cold ? kInf : eng.current_total();
    rec.candidates.resize(static_cast<std::size_t>(n_candidates));
    rec.drops.resize(static_cast<std::size_t>(n_candidates));
    for (int j = 0; j < n_candidates; ++j)
      rec.candidates[static_cast<std::size_t>(j)] = eng.sample(rng);
    for (int j = 0; j < n_candidates; ++j) {
      const int cand = rec.candidates[static_cast<std::size_t>(j)];
      rec.drops[static_cast<std::size_t>(j)] =
          cold ? -eng.one_center_cost(cand) : eng.drop_of(cand);
    }
    const RuleInput in{X,         eng.centers, rec.candidates, rec.drops,
                       step,      seed};
    const int slot = rule(in);
    if (slot < 0 || slot >= n_candidates) throw Error("rule violation");
    rec.chosen_slot = slot;
    eng.add_center(rec.candidates[static_cast<std::size_t>(slot)],
                   Provenance{step, slot,
                              rec.candidates[static_cast<std::size_t>(slot)]});
    rec.cost_after = eng.current_total();
    trace.steps.push_back(std::move(rec));
  }
  trace.final_centers = eng.centers;
  return SeedResult{std::move(eng.centers), std::move(trace)};
}

}  // namespace

Rule greedy_rule() {
  return [](const RuleInput& in) {
    int best = 0;
    for (std::size_t j = 1; j < in.drops.size(); ++j)
      if (in.drops[j] > in.drops[static_cast<std::size_t>(best)])
        best = static_cast<int>(j);
    return best;
  };
}

Rule first_candidate_rule() {
  return [](const RuleInput&) { return 0; };
}

Rule prefer_avoid_rule(std::vector<int> prefer, std::vector<int> avoid) {
  return [prefer = std::move(prefer), avoid = std::move(avoid)](const RuleInput& in) {
    for (int want : prefer)
      for (std::size_t j = 0; j < in.candidates.size(); ++j)
        if (in.candidates[j] == want) return static_cast<int>(j);
    for (std::size_t j = 0; j < in.candidates.size(); ++j) {
      const int c = in.candidates[j];
      if (std::find(avoid.begin(), avoid.end(), c) == avoid.end())
        return static_cast<int>(j);
    }
    return 0;  // every candidate is avoided: no other choice
  };
}

int d2_sample(const WeightedPointSet& X, const CenterSet& C, Mt& rng) {
  Engine eng(X);
  if (!C.empty() && C.dim() != X.dim()) throw Error("d2 sample: dimension mismatch");
  for (std::size_t i = 0; i < C.size(); ++i) {
    // match member points so the degenerate path knows what to exclude
    bool matched = false;
    for (std::size_t p = 0; p < X.size(); ++p) {
      if (X[p].coords == C.coords(i)) {
        if (!matched)
          eng.add_center(static_cast<int>(p), Provenance{0, 0, static_cast<int>(p)});
        else
          eng.is_center[p] = 1;
        matched = true;
      }
    }
    if (!matched) {
      // center that is not a point of X: update costs only
      for (std::size_t p = 0; p < X.size(); ++p) {
        const double nd = X[p].weight * sqdist(X[p].coords, C.coords(i));
        if (nd < eng.cur[p]) eng.cur[p] = nd;
      }
      eng.centers.add(C.coords(i));
    }
  }
  return eng.sample(rng);
}

SeedResult seed_kmeanspp(const WeightedPointSet& X, int k, std::uint64_t seed,
                         std::span<const int> prescribed) {
  return run_seeding(X, k, 1, greedy_rule(), seed, prescribed);
}

SeedResult seed_greedy(const WeightedPointSet& X, int k, int n_candidates,
                       std::uint64_t seed, std::span<const int> prescribed) {
  return run_seeding(X, k, n_candidates, greedy_rule(), seed, prescribed);
}

SeedResult seed_with_rule(const WeightedPointSet& X, int k, int n_candidates,
                          const Rule& rule, std::uint64_t seed,
                          std::span<const int> prescribed) {
  return run_seeding(X, k, n_candidates, rule, seed, prescribed);
}

SeedResult seed_uniform(const WeightedPointSet& X, int k, std::uint64_t seed,
                        std::span<const int> prescribed) {
  if (k < 1) throw Error("seeding: k must be at least 1");
  const std::size_t want = static_cast<std::size_t>(k) + prescribed.size();
  if (want > X.distinct_points())
    throw Error("seeding: k exceeds the number of distinct points");

  Engine eng(X);
  for (int idx : prescribed) eng.add_center(idx, Provenance{0, 0, idx});

  Mt rng(seed);
  RunTrace trace;
  trace.rng_seed = seed;
  trace.prescribed.assign(prescribed.begin(), prescribed.end());
  trace.n_candidates = 1;

  for (int step = 1; step <= k; ++step) {
    StepRecord rec;
    rec.step = step;
    const bool cold = eng.centers.empty();
    rec.cost_before = cold ? kInf : eng.current_total();
    // uniform over points whose coordinates are not yet a center
    std::size_t m = 0;
    for (std::size_t i = 0; i < X.size(); ++i) m += eng.is_center[i] == 0;
    if (m == 0) throw Error("exhausted");
    const double u = uniform01(rng);
    std::size_t pick = std::min(static_cast<std::size_t>(u * static_cast<double>(m)),
                                m - 1);
    int cand = -1;
    for (std::size_t i = 0; i < X.size(); ++i) {
      if (eng.is_center[i]) continue;
      if (pick == 0) {
        cand = static_cast<int>(i);
        break;
      }
      --pick;
    }
    rec.candidates = {cand};
    rec.drops = {cold ? -eng.one_center_cost(cand) : eng.drop_of(cand)};
    rec.chosen_slot = 0;
    eng.add_center(cand, Provenance{step, 0, cand});
    rec.cost_after = eng.current_total();
    trace.steps.push_back(std::move(rec));
  }
  trace.final_centers = eng.centers;
  return SeedResult{std::move(eng.centers), std::move(trace)};
}

LloydResult lloyd_refine(const WeightedPointSet& X, const CenterSet& C,
                         int max_iters, double tol) {
  if (C.empty()) throw Error("lloyd: no centers");
  if (C.dim() != X.dim()) throw Error("lloyd: dimension mismatch");

  std::vector<SparseVec> centers;
  centers.reserve(C.size());
  for (std::size_t i = 0; i < C.size(); ++i) centers.push_back(C.coords(i));

  auto assign_and_cost = [&](std::vector<int>& labels) {
    double cost = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
      int best = 0;
      double bestd = sqdist(X[i].coords, centers[0]);
      for (std::size_t c = 1; c < centers.size(); ++c) {
        const double d = sqdist(X[i].coords, centers[c]);
        if (d < bestd) {
          bestd = d;
          best = static_cast<int>(c);
        }
      }
      labels[i] = best;
      cost += X[i].weight * bestd;
    }
    return cost;
  };

  LloydResult out;
  std::vector<int> labels(X.size(), 0);
  double cost = assign_and_cost(labels);
  out.cost_history.push_back(cost);

  for (int it = 0; it < max_iters; ++it) {
    // weighted centroid per cluster; empty or weightless clusters keep
    // their previous center
    std::vector<double> wsum(centers.size(), 0.0);
    std::vector<std::vector<double>> acc(
        centers.size(), std::vector<double>(static_cast<std::size_t>(X.dim()), 0.0));
    for (std::size_t i = 0; i < X.size(); ++i) {
      const auto c = static_cast<std::size_t>(labels[i]);
      wsum[c] += X[i].weight;
      for (const auto& [d, v] : X[i].coords.entries())
        acc[c][static_cast<std::size_t>(d)] += X[i].weight * v;
    }
    for (std::size_t c = 0; c < centers.size(); ++c) {
      if (wsum[c] > 0.0) {
        for (double& a : acc[c]) a /= wsum[c];
        centers[c] = SparseVec::from_dense(acc[c]);
      }
    }
    const double next = assign_and_cost(labels);
    out.cost_history.push_back(next);
    const double prev = cost;
    cost = next;
    if (prev == 0.0 || (prev - next) / prev < tol) break;
  }

  CenterSet refined(X.dim());
  for (auto& c : centers) refined.add(std::move(c));
  out.centers = std::move(refined);
  return out;
}

}  // namespace kmxx
