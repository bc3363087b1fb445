#pragma once

// Shared helpers for the test suites.

#include <random>
#include <vector>

#include "avgop/avgop.hpp"

namespace testsupport {

// Three unit-weight points at 0, 1, 2 on a line.
inline avgop::MetricMeasureSpace make_s3() { return avgop::line_grid(3); }

// Dense oracle: entries recomputed independently of the sparse assembly,
// full n x n matrix-vector product with zeros included.
inline std::vector<std::vector<double>> dense_matrix(const avgop::MetricMeasureSpace& space,
                                                     double r) {
  const int n = space.size();
  std::vector<std::vector<double>> dense(static_cast<std::size_t>(n),
                                         std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (int i = 0; i < n; ++i) {
    const avgop::IndexSet b = avgop::ball(space, i, r);
    for (int j : b.members)
      dense[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = space.weight(j) / b.mass;
  }
  return dense;
}

inline avgop::FunctionVec dense_apply(const std::vector<std::vector<double>>& dense,
                                      const avgop::FunctionVec& f) {
  avgop::FunctionVec out(dense.size(), 0.0);
  for (std::size_t i = 0; i < dense.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < dense[i].size(); ++j) acc += dense[i][j] * f[j];
    out[i] = acc;
  }
  return out;
}

inline avgop::FunctionVec random_vec(std::mt19937_64& rng, int n, double lo = -1.0,
                                     double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  avgop::FunctionVec f(static_cast<std::size_t>(n));
  for (auto& v : f) v = dist(rng);
  return f;
}

}  // namespace testsupport
