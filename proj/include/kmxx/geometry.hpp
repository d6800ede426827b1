#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kmxx {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Coordinate vector stored as sorted (index, value) pairs with implicit
// zeros elsewhere. The adversarial instances live in thousands of dimensions
// with a handful of nonzero coordinates per point; ordinary dense data pays
// one int per coordinate and takes the dense fast path in sqdist.
class SparseVec {
 public:
  SparseVec() = default;
  explicit SparseVec(std::vector<std::pair<int, double>> entries);
  static SparseVec from_dense(std::span<const double> v);

  std::vector<double> to_dense(int dim) const;
  double at(int index) const;  // 0.0 where no entry
  int max_index() const { return e_.empty() ? -1 : e_.back().first; }
  bool empty() const { return e_.empty(); }
  double sqnorm() const;
  const std::vector<std::pair<int, double>>& entries() const { return e_; }

  bool operator==(const SparseVec&) const = default;

  friend double sqdist(const SparseVec& a, const SparseVec& b);

 private:
  std::vector<std::pair<int, double>> e_;
  bool dense0_ = true;  // entries are exactly indices 0..size-1
};

// Squared Euclidean distance, accumulated term by term as sum((x_i - y_i)^2)
// over the union of supports. No norm expansion: the hard instances mix
// coordinate scales that would cancel catastrophically.
double sqdist(const SparseVec& a, const SparseVec& b);

struct WeightedPoint {
  SparseVec coords;
  double weight = 1.0;
};

class WeightedPointSet {
 public:
  WeightedPointSet(int dim, std::vector<WeightedPoint> pts);

  int dim() const { return dim_; }
  std::size_t size() const { return pts_.size(); }
  const WeightedPoint& operator[](std::size_t i) const { return pts_[i]; }
  const std::vector<WeightedPoint>& points() const { return pts_; }
  double total_weight() const { return total_weight_; }
  std::size_t distinct_points() const;

 private:
  int dim_ = 0;
  std::vector<WeightedPoint> pts_;
  double total_weight_ = 0.0;
};

// Where a center came from: the step that chose it, the candidate slot that
// won, and the index of the source point in X (-1 if not a point of X).
struct Provenance {
  int step = 0;
  int candidate_slot = 0;
  int point_index = -1;
};

class CenterSet {
 public:
  CenterSet() = default;
  explicit CenterSet(int dim) : dim_(dim) {}
  static CenterSet from_points(const WeightedPointSet& X,
                               std::span<const int> point_indices);

  void add(SparseVec coords, std::optional<Provenance> prov = std::nullopt);
  std::size_t size() const { return coords_.size(); }
  bool empty() const { return coords_.empty(); }
  int dim() const { return dim_; }
  const SparseVec& coords(std::size_t i) const { return coords_[i]; }
  const std::optional<Provenance>& provenance(std::size_t i) const {
    return prov_[i];
  }

 private:
  int dim_ = 0;
  std::vector<SparseVec> coords_;
  std::vector<std::optional<Provenance>> prov_;
};

struct ClusterRef {
  std::vector<int> members;
  int label = 0;
};

// w(x) * min_c ||x - c||^2. Throws on empty centers or dimension mismatch.
double point_cost(const WeightedPoint& x, const CenterSet& C);

// Sum of point_cost over X in point-index order.
double total_cost(const WeightedPointSet& X, const CenterSet& C);

// Index of the closest center and the squared distance; ties go to the
// lowest center index.
std::pair<int, double> nearest_center(const SparseVec& x, const CenterSet& C);

struct Opt1 {
  SparseVec centroid;  // weighted center of mass
  double cost = 0.0;   // cost of the subset served by its centroid
};

Opt1 centroid_and_opt1(const WeightedPointSet& X, std::span<const int> members);
Opt1 centroid_and_opt1(const WeightedPointSet& X);  // whole set

// d unit vectors in (d-1)-dimensional ambient space with all pairwise inner
// products equal to -1/(d-1); requires d >= 2.
std::vector<SparseVec> simplex_vectors(int d);

}  // namespace kmxx
