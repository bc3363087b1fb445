#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "avgop/space.hpp"

namespace avgop {

/// Function on the space's atoms, one value per point index.
using FunctionVec = std::vector<double>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Sparse row form of the ball-averaging operator at a fixed radius:
/// row i holds the members of B(i, radius), the matrix coefficients
/// weight(j) / mu(B(i, radius)), and 1 / mu(B(i, radius)).
///
/// Immutable once assembled; `apply` is pure.
struct AveragingOperator {
  double radius = 0.0;
  int n = 0;
  std::vector<std::vector<int>> rows;
  std::vector<std::vector<double>> coeffs;
  std::vector<double> inv_mass;

  /// Value of the averaged function at one point; accumulation runs in
  /// ascending member index order.
  double row_value(int i, const FunctionVec& f) const {
    const auto& row = rows[static_cast<std::size_t>(i)];
    const auto& coeff = coeffs[static_cast<std::size_t>(i)];
    double acc = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k)
      acc += coeff[k] * f[static_cast<std::size_t>(row[k])];
    return acc;
  }

  /// Averaged function, bit-reproducible across applications.
  FunctionVec apply(const FunctionVec& f) const {
    if (static_cast<int>(f.size()) != n)
      throw std::invalid_argument("apply: function length does not match operator dimension");
    FunctionVec out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = row_value(i, f);
    return out;
  }
};

/// Row i encodes f -> (1 / mu(B(i, r))) * sum_{j in B(i, r)} weight(j) f(j).
inline AveragingOperator assemble(const MetricMeasureSpace& space, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("assemble: radius must be positive");
  AveragingOperator op;
  op.radius = r;
  op.n = space.size();
  op.rows.resize(static_cast<std::size_t>(op.n));
  op.coeffs.resize(static_cast<std::size_t>(op.n));
  op.inv_mass.resize(static_cast<std::size_t>(op.n));
  for (int i = 0; i < op.n; ++i) {
    IndexSet b = ball(space, i, r);
    const double inv = 1.0 / b.mass;
    auto& coeff = op.coeffs[static_cast<std::size_t>(i)];
    coeff.reserve(b.members.size());
    for (int j : b.members) coeff.push_back(space.weight(j) * inv);
    op.rows[static_cast<std::size_t>(i)] = std::move(b.members);
    op.inv_mass[static_cast<std::size_t>(i)] = inv;
  }
  return op;
}

/// Two-pass composite: averages at radius r first, then at radius s. The
/// product matrix is never materialized.
inline FunctionVec compose_apply(const MetricMeasureSpace& space, double s, double r,
                                 const FunctionVec& f) {
  return assemble(space, s).apply(assemble(space, r).apply(f));
}

/// Weighted p-norm: (sum_i weight(i) |f_i|^p)^(1/p) for finite p, max |f_i|
/// for p = infinity (every atom has positive mass, so the essential sup is
/// the max).
inline double norm_p(const MetricMeasureSpace& space, const FunctionVec& f, double p) {
  if (static_cast<int>(f.size()) != space.size())
    throw std::invalid_argument("norm_p: function length does not match space");
  if (std::isinf(p) && p > 0.0) {
    double best = 0.0;
    for (double v : f) best = std::max(best, std::abs(v));
    return best;
  }
  if (!(p >= 1.0)) throw std::invalid_argument("norm_p: p must lie in [1, inf]");
  double acc = 0.0;
  if (p == 1.0) {
    for (int i = 0; i < space.size(); ++i)
      acc += space.weight(i) * std::abs(f[static_cast<std::size_t>(i)]);
    return acc;
  }
  if (p == 2.0) {
    for (int i = 0; i < space.size(); ++i) {
      const double v = f[static_cast<std::size_t>(i)];
      acc += space.weight(i) * v * v;
    }
    return std::sqrt(acc);
  }
  for (int i = 0; i < space.size(); ++i)
    acc += space.weight(i) * std::pow(std::abs(f[static_cast<std::size_t>(i)]), p);
  return std::pow(acc, 1.0 / p);
}

/// Weighted p-norm restricted to a subset: values outside `set` are ignored.
inline double norm_p_on(const MetricMeasureSpace& space, const FunctionVec& f, double p,
                        const IndexSet& set) {
  if (static_cast<int>(f.size()) != space.size())
    throw std::invalid_argument("norm_p_on: function length does not match space");
  if (std::isinf(p) && p > 0.0) {
    double best = 0.0;
    for (int m : set.members) best = std::max(best, std::abs(f[static_cast<std::size_t>(m)]));
    return best;
  }
  if (!(p >= 1.0)) throw std::invalid_argument("norm_p_on: p must lie in [1, inf]");
  double acc = 0.0;
  for (int m : set.members) {
    const double v = std::abs(f[static_cast<std::size_t>(m)]);
    acc += space.weight(m) * (p == 1.0 ? v : std::pow(v, p));
  }
  return p == 1.0 ? acc : std::pow(acc, 1.0 / p);
}

/// Exact operator norm on the weighted Lebesgue space, p in {1, inf} only.
///   p = inf: max over rows of the row sum of coefficients (rows are convex
///            averages, so the value is 1).
///   p = 1:   max over columns j of sum_{i : j in B(i, r)} weight(i) / mu(B(i, r)).
inline double operator_norm(const MetricMeasureSpace& space, const AveragingOperator& op,
                            double p) {
  if (space.size() != op.n)
    throw std::invalid_argument("operator_norm: operator does not match space");
  if (std::isinf(p) && p > 0.0) {
    double best = 0.0;
    for (int i = 0; i < op.n; ++i) {
      double row_sum = 0.0;
      for (double c : op.coeffs[static_cast<std::size_t>(i)]) row_sum += c;
      best = std::max(best, row_sum);
    }
    return best;
  }
  if (p == 1.0) {
    std::vector<double> col(static_cast<std::size_t>(op.n), 0.0);
    for (int i = 0; i < op.n; ++i) {
      const double contrib = space.weight(i) * op.inv_mass[static_cast<std::size_t>(i)];
      for (int j : op.rows[static_cast<std::size_t>(i)]) col[static_cast<std::size_t>(j)] += contrib;
    }
    double best = 0.0;
    for (double c : col) best = std::max(best, c);
    return best;
  }
  throw std::invalid_argument("operator_norm: exact norms are available for p = 1 and p = inf only");
}

/// Pointwise oscillation of the averaged function at a pair of points,
/// together with its two-term upper bound:
///   |Af(x) - Af(y)| <= |1/mu(B(x,t)) - 1/mu(B(y,t))| * int_{B(x,t)} |f| dmu
///                      + (1/mu(B(y,t))) * int_{B(x,t) Delta B(y,t)} |f| dmu.
struct OscillationBound {
  double actual = 0.0;
  double bound = 0.0;
  double term_inverse_gap = 0.0;
  double term_symdiff = 0.0;
};

inline OscillationBound oscillation_bound(const MetricMeasureSpace& space,
                                          const AveragingOperator& op, const FunctionVec& f,
                                          int x, int y) {
  if (space.size() != op.n || static_cast<int>(f.size()) != op.n)
    throw std::invalid_argument("oscillation_bound: dimension mismatch");
  space.check_index(x);
  space.check_index(y);

  OscillationBound r;
  r.actual = std::abs(op.row_value(x, f) - op.row_value(y, f));

  const auto& bx = op.rows[static_cast<std::size_t>(x)];
  const auto& by = op.rows[static_cast<std::size_t>(y)];

  double int_abs_x = 0.0;
  for (int j : bx) int_abs_x += space.weight(j) * std::abs(f[static_cast<std::size_t>(j)]);

  // integral of |f| over the symmetric difference of the two ball index lists
  double int_abs_sym = 0.0;
  std::size_t ix = 0, iy = 0;
  while (ix < bx.size() || iy < by.size()) {
    int j;
    if (iy == by.size() || (ix < bx.size() && bx[ix] < by[iy])) {
      j = bx[ix++];
    } else if (ix == bx.size() || by[iy] < bx[ix]) {
      j = by[iy++];
    } else {
      ++ix;
      ++iy;
      continue;
    }
    int_abs_sym += space.weight(j) * std::abs(f[static_cast<std::size_t>(j)]);
  }

  r.term_inverse_gap =
      std::abs(op.inv_mass[static_cast<std::size_t>(x)] - op.inv_mass[static_cast<std::size_t>(y)]) *
      int_abs_x;
  r.term_symdiff = op.inv_mass[static_cast<std::size_t>(y)] * int_abs_sym;
  r.bound = r.term_inverse_gap + r.term_symdiff;
  return r;
}

}  // namespace avgop
