#include "kmxx/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kmxx {

SparseVec::SparseVec(std::vector<std::pair<int, double>> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  e_.reserve(entries.size());
  for (const auto& [idx, val] : entries) {
    if (idx < 0) throw Error("SparseVec: negative index");
    if (!e_.empty() && e_.back().first == idx)
      throw Error("SparseVec: duplicate index");
    if (val != 0.0) e_.emplace_back(idx, val);
  }
  dense0_ = e_.size() == static_cast<std::size_t>(max_index() + 1);
}

SparseVec SparseVec::from_dense(std::span<const double> v) {
  SparseVec s;
  s.e_.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] != 0.0) s.e_.emplace_back(static_cast<int>(i), v[i]);
  s.dense0_ = s.e_.size() == static_cast<std::size_t>(s.max_index() + 1);
  return s;
}

std::vector<double> SparseVec::to_dense(int dim) const {
  std::vector<double> out(static_cast<std::size_t>(dim), 0.0);
  for (const auto& [idx, val] : e_) out.at(static_cast<std::size_t>(idx)) = val;
  return out;
}

double SparseVec::at(int index) const {
  auto it = std::lower_bound(
      e_.begin(), e_.end(), index,
      [](const auto& p, int i) { return p.first < i; });
  return (it != e_.end() && it->first == index) ? it->second : 0.0;
}

double SparseVec::sqnorm() const {
  double s = 0.0;
  for (const auto& [idx, val] : e_) s += val * val;
  return s;
}

double sqdist(const SparseVec& a, const SparseVec& b) {
  const auto& ea = a.e_;
  const auto& eb = b.e_;
  double s = 0.0;
  if (a.dense0_ && b.dense0_) {
    const std::size_t m = std::min(ea.size(), eb.size());
    for (std::size_t i = 0; i < m; ++i) {
      const double d = ea[i].second - eb[i].second;
      s += d * d;
    }
    for (std::size_t i = m; i < ea.size(); ++i) s += ea[i].second * ea[i].second;
    for (std::size_t i = m; i < eb.size(); ++i) s += eb[i].second * eb[i].second;
    return s;
  }
  std::size_t i = 0, j = 0;
  while (i < ea.size() && j < eb.size()) {
    if (ea[i].first == eb[j].first) {
      const double d = ea[i].second - eb[j].second;
      s += d * d;
      ++i;
      ++j;
    } else if (ea[i].first < eb[j].first) {
      s += ea[i].second * ea[i].second;
      ++i;
    } else {
      s += eb[j].second * eb[j].second;
      ++j;
    }
  }
  for (; i < ea.size(); ++i) s += ea[i].second * ea[i].second;
  for (; j < eb.size(); ++j) s += eb[j].second * eb[j].second;
  return s;
}

WeightedPointSet::WeightedPointSet(int dim, std::vector<WeightedPoint> pts)
    : dim_(dim), pts_(std::move(pts)) {
  if (dim_ <= 0) throw Error("point set: dimension must be positive");
  if (pts_.empty()) throw Error("point set: empty");
  for (const auto& p : pts_) {
    if (!(p.weight >= 0.0) || !std::isfinite(p.weight))
      throw Error("point set: weight must be a finite nonnegative real");
    if (p.coords.max_index() >= dim_)
      throw Error("point set: coordinate index exceeds dimension");
    total_weight_ += p.weight;
  }
  if (!(total_weight_ > 0.0)) throw Error("point set: total weight must be positive");
}

std::size_t WeightedPointSet::distinct_points() const {
  std::vector<const SparseVec*> v;
  v.reserve(pts_.size());
  for (const auto& p : pts_) v.push_back(&p.coords);
  std::sort(v.begin(), v.end(), [](const SparseVec* a, const SparseVec* b) {
    return a->entries() < b->entries();
  });
  std::size_t n = 0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (i == 0 || !(v[i]->entries() == v[i - 1]->entries())) ++n;
  return n;
}

CenterSet CenterSet::from_points(const WeightedPointSet& X,
                                 std::span<const int> point_indices) {
  CenterSet c(X.dim());
  int step = 0;
  for (int idx : point_indices) {
    if (idx < 0 || static_cast<std::size_t>(idx) >= X.size())
      throw Error("center set: point index out of range");
    c.add(X[static_cast<std::size_t>(idx)].coords, Provenance{step++, 0, idx});
  }
  return c;
}

void CenterSet::add(SparseVec coords, std::optional<Provenance> prov) {
  if (coords.max_index() >= dim_)
    throw Error("center set: coordinate index exceeds dimension");
  coords_.push_back(std::move(coords));
  prov_.push_back(prov);
}

double point_cost(const WeightedPoint& x, const CenterSet& C) {
  if (C.empty()) throw Error("no centers");
  if (x.coords.max_index() >= C.dim())
    throw Error("point cost: dimension mismatch");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < C.size(); ++i)
    best = std::min(best, sqdist(x.coords, C.coords(i)));
  return x.weight * best;
}

double total_cost(const WeightedPointSet& X, const CenterSet& C) {
  if (C.empty()) throw Error("no centers");
  if (X.dim() != C.dim()) throw Error("total cost: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) s += point_cost(X[i], C);
  return s;
}

std::pair<int, double> nearest_center(const SparseVec& x, const CenterSet& C) {
  if (C.empty()) throw Error("no centers");
  int best = 0;
  double bestd = sqdist(x, C.coords(0));
  for (std::size_t i = 1; i < C.size(); ++i) {
    const double d = sqdist(x, C.coords(i));
    if (d < bestd) {
      bestd = d;
      best = static_cast<int>(i);
    }
  }
  return {best, bestd};
}

Opt1 centroid_and_opt1(const WeightedPointSet& X, std::span<const int> members) {
  if (members.empty()) throw Error("centroid: empty subset");
  double wsum = 0.0;
  for (int idx : members) wsum += X[static_cast<std::size_t>(idx)].weight;
  if (!(wsum > 0.0)) throw Error("centroid: zero total weight");
  std::vector<double> acc(static_cast<std::size_t>(X.dim()), 0.0);
  for (int idx : members) {
    const auto& p = X[static_cast<std::size_t>(idx)];
    for (const auto& [d, v] : p.coords.entries())
      acc[static_cast<std::size_t>(d)] += p.weight * v;
  }
  for (double& a : acc) a /= wsum;
  Opt1 r;
  r.centroid = SparseVec::from_dense(acc);
  for (int idx : members) {
    const auto& p = X[static_cast<std::size_t>(idx)];
    r.cost += p.weight * sqdist(p.coords, r.centroid);
  }
  return r;
}

Opt1 centroid_and_opt1(const WeightedPointSet& X) {
  std::vector<int> all(X.size());
  for (std::size_t i = 0; i < X.size(); ++i) all[i] = static_cast<int>(i);
  return centroid_and_opt1(X, all);
}

std::vector<SparseVec> simplex_vectors(int d) {
  if (d < 2) throw Error("simplex vectors: need d >= 2");
  // Cholesky-style construction of the Gram matrix with unit diagonal and
  // off-diagonal -1/(d-1); the d-th vector closes in dimension d-1.
  const double off = -1.0 / static_cast<double>(d - 1);
  std::vector<std::vector<double>> v(
      static_cast<std::size_t>(d),
      std::vector<double>(static_cast<std::size_t>(d - 1), 0.0));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < std::min(i, d - 1); ++j) {
      double dot = 0.0;
      for (int m = 0; m < j; ++m)
        dot += v[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)] *
               v[static_cast<std::size_t>(j)][static_cast<std::size_t>(m)];
      v[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          (off - dot) / v[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)];
    }
    if (i < d - 1) {
      double s = 0.0;
      for (int m = 0; m < i; ++m)
        s += v[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)] *
             v[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)];
      v[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] =
          std::sqrt(std::max(0.0, 1.0 - s));
    }
  }
  std::vector<SparseVec> out;
  out.reserve(static_cast<std::size_t>(d));
  for (const auto& row : v) out.push_back(SparseVec::from_dense(row));
  return out;
}

}  // namespace kmxx
