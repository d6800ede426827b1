#include "kmxx/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kmxx {

std::uint64_t subset_count(int n, int k) {
  if (k < 0 || k > n) return 0;
  constexpr std::uint64_t cap = std::numeric_limits<std::uint64_t>::max() / 4;
  std::uint64_t c = 1;
  for (int i = 1; i <= k; ++i) {
    if (c > cap) return cap;  // saturate, callers only compare to budgets
    c = c * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  }
  return c;
}

std::uint64_t partition_count(int n, int k) {
  // Stirling numbers of the second kind, summed over part counts 1..k.
  constexpr std::uint64_t cap = std::numeric_limits<std::uint64_t>::max() / 4;
  std::vector<std::vector<std::uint64_t>> s(
      static_cast<std::size_t>(n + 1),
      std::vector<std::uint64_t>(static_cast<std::size_t>(k + 1), 0));
  s[0][0] = 1;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= std::min(i, k); ++j) {
      const std::uint64_t a = s[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)];
      const std::uint64_t b = s[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)];
      const std::uint64_t v = a + static_cast<std::uint64_t>(j) * b;
      s[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = std::min(v, cap);
    }
  std::uint64_t total = 0;
  for (int j = 1; j <= k; ++j)
    total = std::min(total + s[static_cast<std::size_t>(n)][static_cast<std::size_t>(j)], cap);
  return total;
}

ExactOptResult opt_subset(const WeightedPointSet& X, int k, std::uint64_t budget) {
  const int n = static_cast<int>(X.size());
  if (k < 1 || k > n) throw Error("opt subset: k out of range");
  const std::uint64_t need = subset_count(n, k);
  if (need > budget)
    throw Error("opt subset: budget exceeded, need " + std::to_string(need) +
                " subsets");

  // cost[i][j] = cost of point i served by point j
  std::vector<std::vector<double>> cost(
      static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          X[static_cast<std::size_t>(i)].weight *
          sqdist(X[static_cast<std::size_t>(i)].coords,
                 X[static_cast<std::size_t>(j)].coords);

  std::vector<int> pick(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) pick[static_cast<std::size_t>(i)] = i;

  ExactOptResult best;
  best.method = "subset-enum";
  best.opt_cost = std::numeric_limits<double>::infinity();

  while (true) {
    double c = 0.0;
    for (int i = 0; i < n; ++i) {
      double m = cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(pick[0])];
      for (int j = 1; j < k; ++j)
        m = std::min(m, cost[static_cast<std::size_t>(i)]
                         [static_cast<std::size_t>(pick[static_cast<std::size_t>(j)])]);
      c += m;
    }
    if (c < best.opt_cost) {
      best.opt_cost = c;
      best.centers = pick;
    }
    // next lexicographic combination
    int pos = k - 1;
    while (pos >= 0 && pick[static_cast<std::size_t>(pos)] == n - k + pos) --pos;
    if (pos < 0) break;
    ++pick[static_cast<std::size_t>(pos)];
    for (int j = pos + 1; j < k; ++j)
      pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
  }
  return best;
}

ExactOptResult opt_partition(const WeightedPointSet& X, int k, std::uint64_t budget) {
  const int n = static_cast<int>(X.size());
  if (k < 1) throw Error("opt partition: k out of range");
  const std::uint64_t need = partition_count(n, std::min(k, n));
  if (need > budget)
    throw Error("opt partition: budget exceeded, need " + std::to_string(need) +
                " partitions");

  // restricted-growth strings: a[i] <= 1 + max(a[0..i-1]), parts <= k
  std::vector<int> a(static_cast<std::size_t>(n), 0);
  std::vector<int> maxp(static_cast<std::size_t>(n), 0);  // max of a[0..i]

  ExactOptResult best;
  best.method = "partition-enum";
  best.opt_cost = std::numeric_limits<double>::infinity();

  const int dim = X.dim();
  std::vector<double> wsum(static_cast<std::size_t>(n));
  std::vector<std::vector<double>> acc(
      static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(dim)));

  auto eval = [&]() {
    const int parts = maxp[static_cast<std::size_t>(n - 1)] + 1;
    for (int p = 0; p < parts; ++p) {
      wsum[static_cast<std::size_t>(p)] = 0.0;
      std::fill(acc[static_cast<std::size_t>(p)].begin(),
                acc[static_cast<std::size_t>(p)].end(), 0.0);
    }
    for (int i = 0; i < n; ++i) {
      const auto& pt = X[static_cast<std::size_t>(i)];
      const auto p = static_cast<std::size_t>(a[static_cast<std::size_t>(i)]);
      wsum[p] += pt.weight;
      for (const auto& [d, v] : pt.coords.entries())
        acc[p][static_cast<std::size_t>(d)] += pt.weight * v;
    }
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto& pt = X[static_cast<std::size_t>(i)];
      const auto p = static_cast<std::size_t>(a[static_cast<std::size_t>(i)]);
      if (!(wsum[p] > 0.0)) continue;  // weightless part costs nothing
      double d2 = 0.0;
      int next = 0;
      for (const auto& [d, v] : pt.coords.entries()) {
        for (; next < d; ++next) {
          const double mu = acc[p][static_cast<std::size_t>(next)] / wsum[p];
          d2 += mu * mu;
        }
        const double diff = v - acc[p][static_cast<std::size_t>(d)] / wsum[p];
        d2 += diff * diff;
        next = d + 1;
      }
      for (; next < dim; ++next) {
        const double mu = acc[p][static_cast<std::size_t>(next)] / wsum[p];
        d2 += mu * mu;
      }
      total += pt.weight * d2;
    }
    if (total < best.opt_cost) {
      best.opt_cost = total;
      best.labels = a;
    }
  };

  // iterate all restricted-growth strings with at most k parts
  while (true) {
    eval();
    int i = n - 1;
    while (i > 0) {
      const int lim = std::min(maxp[static_cast<std::size_t>(i - 1)] + 1, k - 1);
      if (a[static_cast<std::size_t>(i)] < lim) break;
      --i;
    }
    if (i == 0) break;
    ++a[static_cast<std::size_t>(i)];
    maxp[static_cast<std::size_t>(i)] =
        std::max(maxp[static_cast<std::size_t>(i - 1)], a[static_cast<std::size_t>(i)]);
    for (int j = i + 1; j < n; ++j) {
      a[static_cast<std::size_t>(j)] = 0;
      maxp[static_cast<std::size_t>(j)] = maxp[static_cast<std::size_t>(i)];
    }
  }
  return best;
}

double expected_uniform_cost(const WeightedPointSet& X,
                             std::span<const int> members) {
  if (members.empty()) throw Error("expected uniform cost: empty subset");
  for (int m : members)
    if (X[static_cast<std::size_t>(m)].weight != 1.0)
      throw Error("lemma requires unit weights");
  double sum = 0.0;
  for (int c : members) {
    const auto& cp = X[static_cast<std::size_t>(c)].coords;
    for (int m : members)
      sum += sqdist(X[static_cast<std::size_t>(m)].coords, cp);
  }
  return sum / static_cast<double>(members.size());
}

double expected_d2_cost(const WeightedPointSet& X, std::span<const int> members,
                        const CenterSet& C) {
  if (members.empty()) throw Error("expected d2 cost: empty subset");
  std::vector<double> cur(members.size());
  double total = 0.0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    cur[i] = point_cost(X[static_cast<std::size_t>(members[i])], C);
    total += cur[i];
  }
  if (!(total > 0.0)) throw Error("degenerate: subset fully covered");
  double expectation = 0.0;
  for (std::size_t c = 0; c < members.size(); ++c) {
    if (cur[c] == 0.0) continue;
    const auto& cp = X[static_cast<std::size_t>(members[c])].coords;
    double after = 0.0;
    for (std::size_t i = 0; i < members.size(); ++i) {
      const double nd = X[static_cast<std::size_t>(members[i])].weight *
                        sqdist(X[static_cast<std::size_t>(members[i])].coords, cp);
      after += std::min(cur[i], nd);
    }
    expectation += (cur[c] / total) * after;
  }
  return expectation;
}

}  // namespace kmxx
