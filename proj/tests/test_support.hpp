#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "kmxx/geometry.hpp"
#include "kmxx/rng.hpp"

// Minimal always-on test scaffolding: counts failures, keeps going so one
// run reports everything, exits nonzero from RUN_SUMMARY.

namespace testing_detail {
inline int failures = 0;
inline int checks = 0;
}  // namespace testing_detail

#define CHECK(cond)                                                          \
  do {                                                                       \
    ++testing_detail::checks;                                                \
    if (!(cond)) {                                                           \
      ++testing_detail::failures;                                            \
      std::cerr << "[FAIL] " << __FILE__ << ":" << __LINE__ << "  " << #cond \
                << "\n";                                                     \
    }                                                                        \
  } while (0)

#define CHECK_MSG(cond, msg)                                                 \
  do {                                                                       \
    ++testing_detail::checks;                                                \
    if (!(cond)) {                                                           \
      ++testing_detail::failures;                                            \
      std::cerr << "[FAIL] " << __FILE__ << ":" << __LINE__ << "  " << #cond \
                << "  (" << msg << ")\n";                                    \
    }                                                                        \
  } while (0)

#define CHECK_THROWS(expr, substr)                                            \
  do {                                                                        \
    ++testing_detail::checks;                                                 \
    bool caught_ = false;                                                     \
    try {                                                                     \
      (void)(expr);                                                           \
    } catch (const std::exception& e_) {                                      \
      caught_ = std::string(e_.what()).find(substr) != std::string::npos;     \
      if (!caught_)                                                           \
        std::cerr << "[FAIL] " << __FILE__ << ":" << __LINE__                 \
                  << "  wrong message: " << e_.what() << "\n";                \
    }                                                                         \
    if (!caught_) {                                                           \
      ++testing_detail::failures;                                             \
      std::cerr << "[FAIL] " << __FILE__ << ":" << __LINE__ << "  expected '" \
                << substr << "' from " << #expr << "\n";                      \
    }                                                                         \
  } while (0)

#define RUN_SUMMARY(name)                                                  \
  do {                                                                     \
    if (testing_detail::failures == 0) {                                   \
      std::cout << name << ": " << testing_detail::checks << " checks ok\n"; \
      return 0;                                                            \
    }                                                                      \
    std::cerr << name << ": " << testing_detail::failures << " of "        \
              << testing_detail::checks << " checks FAILED\n";             \
    return 1;                                                              \
  } while (0)

inline bool near_rel(double a, double b, double tol) {
  if (a == b) return true;
  const double scale = std::max({std::fabs(a), std::fabs(b), 1e-300});
  return std::fabs(a - b) / scale <= tol;
}

inline bool near_abs(double a, double b, double tol) {
  return std::fabs(a - b) <= tol;
}

// Random weighted point set for property tests.
inline kmxx::WeightedPointSet random_pointset(kmxx::Mt& rng, int n, int d,
                                              bool unit_weights = false,
                                              double spread = 1.0) {
  std::vector<kmxx::WeightedPoint> pts;
  for (int i = 0; i < n; ++i) {
    std::vector<double> coords(static_cast<std::size_t>(d));
    for (auto& c : coords) c = spread * (2.0 * kmxx::uniform01(rng) - 1.0);
    const double w = unit_weights ? 1.0 : 0.1 + 2.0 * kmxx::uniform01(rng);
    pts.push_back({kmxx::SparseVec::from_dense(coords), w});
  }
  return kmxx::WeightedPointSet(d, std::move(pts));
}

inline kmxx::SparseVec random_vec(kmxx::Mt& rng, int d, double spread = 1.0) {
  std::vector<double> coords(static_cast<std::size_t>(d));
  for (auto& c : coords) c = spread * (2.0 * kmxx::uniform01(rng) - 1.0);
  return kmxx::SparseVec::from_dense(coords);
}
