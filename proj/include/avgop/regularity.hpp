#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "avgop/space.hpp"

namespace avgop {

struct ValueArg {
  double value = 0.0;
  int arg = -1;
};

struct ValueArgPair {
  double value = 0.0;
  int x = -1;
  int y = -1;
};

/// Smallest ball mass at scale s over the whole space (positive: every ball
/// contains its center and all weights are positive).
inline double inf_ball_mass(const MetricMeasureSpace& space, double s) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < space.size(); ++i) best = std::min(best, ball(space, i, s).mass);
  return best;
}

/// gamma(s) = max_x mu(B(x, 2s)) / mu(B(x, s)), with the lowest maximizing
/// index. Always >= 1 since B(x, s) is contained in B(x, 2s).
inline ValueArg doubling_constant(const MetricMeasureSpace& space, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("doubling_constant: s must be positive");
  ValueArg best{0.0, -1};
  for (int i = 0; i < space.size(); ++i) {
    const double ratio = ball(space, i, 2.0 * s).mass / ball(space, i, s).mass;
    if (ratio > best.value) best = {ratio, i};
  }
  return best;
}

/// Annulus modulus: max_x mu(B(x, s + delta) \ B(x, s - delta)).
inline ValueArg star_modulus(const MetricMeasureSpace& space, double s, double delta) {
  ValueArg best{0.0, -1};
  for (int i = 0; i < space.size(); ++i) {
    const double m = annulus(space, i, s, delta).mass;
    if (best.arg < 0 || m > best.value) best = {m, i};
  }
  return best;
}

struct StarDelta {
  double delta = 0.0;
  double modulus = 0.0;
};

/// Smallest delta on the canonical grid { s*k/K : k = 1..K-1 } whose annulus
/// modulus is below epsilon; absent when no grid value qualifies.
inline std::optional<StarDelta> star_delta_for(const MetricMeasureSpace& space, double s,
                                               double epsilon, int grid = 64) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("star_delta_for: epsilon must be positive");
  if (grid < 2) throw std::invalid_argument("star_delta_for: grid must be >= 2");
  for (int k = 1; k < grid; ++k) {
    const double delta = s * k / grid;
    const double value = star_modulus(space, s, delta).value;
    if (value < epsilon) return StarDelta{delta, value};
  }
  return std::nullopt;
}

/// Symmetric-difference modulus: max over pairs with d(x, y) < delta
/// (strict IEEE comparison) of mu(B(x, s) Delta B(y, s)). Zero when only
/// the diagonal qualifies.
inline ValueArgPair symdiff_modulus(const MetricMeasureSpace& space, double s, double delta) {
  if (!(s > 0.0) || !(delta > 0.0))
    throw std::invalid_argument("symdiff_modulus: s and delta must be positive");
  ValueArgPair best{0.0, -1, -1};
  for (int x = 0; x < space.size(); ++x)
    for (int y = x + 1; y < space.size(); ++y) {
      if (!(space.distance(x, y) < delta)) continue;
      const double m = sym_diff(space, x, y, s).mass;
      if (best.x < 0 || m > best.value) best = {m, x, y};
    }
  if (best.x < 0) best = {0.0, -1, -1};
  return best;
}

/// Containment check behind the annulus-to-symmetric-difference implication:
/// for every pair with d(x, y) < delta,
///   mu(B(x,s) Delta B(y,s)) <= mu(ann(x,s,delta)) + mu(ann(y,s,delta)).
/// This holds whenever the metric satisfies the triangle inequality, so a
/// violation indicates a bug (or an invalid matrix metric).
struct ContainmentReport {
  long pairs_checked = 0;
  double max_excess = 0.0;  // max of lhs - rhs over checked pairs; <= 0 when the check holds
  int worst_x = -1;
  int worst_y = -1;
  bool violated = false;
};

inline ContainmentReport annulus_containment_check(const MetricMeasureSpace& space, double s,
                                           double delta) {
  if (!(delta > 0.0) || !(delta < s))
    throw std::invalid_argument("annulus_containment_check: requires 0 < delta < s");
  std::vector<double> ann_mass(static_cast<std::size_t>(space.size()));
  for (int i = 0; i < space.size(); ++i)
    ann_mass[static_cast<std::size_t>(i)] = annulus(space, i, s, delta).mass;

  ContainmentReport rep;
  rep.max_excess = -std::numeric_limits<double>::infinity();
  for (int x = 0; x < space.size(); ++x)
    for (int y = x + 1; y < space.size(); ++y) {
      if (!(space.distance(x, y) < delta)) continue;
      ++rep.pairs_checked;
      const double lhs = sym_diff(space, x, y, s).mass;
      const double rhs =
          ann_mass[static_cast<std::size_t>(x)] + ann_mass[static_cast<std::size_t>(y)];
      const double excess = lhs - rhs;
      if (rep.worst_x < 0 || excess > rep.max_excess) {
        rep.max_excess = excess;
        rep.worst_x = x;
        rep.worst_y = y;
      }
    }
  if (rep.pairs_checked == 0) rep.max_excess = 0.0;
  rep.violated = rep.max_excess > 1e-10;
  return rep;
}

/// Largest gap of inverse ball masses over close pairs, with the bound it
/// must respect: max_gap <= symdiff_modulus(s, delta) / inf_ball(s)^2.
struct InverseGapReport {
  double max_gap = 0.0;
  double bound = 0.0;
  int x = -1;
  int y = -1;
};

inline InverseGapReport inverse_measure_gap(const MetricMeasureSpace& space, double s,
                                            double delta) {
  if (!(s > 0.0) || !(delta > 0.0))
    throw std::invalid_argument("inverse_measure_gap: s and delta must be positive");
  std::vector<double> mass(static_cast<std::size_t>(space.size()));
  double a = std::numeric_limits<double>::infinity();
  for (int i = 0; i < space.size(); ++i) {
    mass[static_cast<std::size_t>(i)] = ball(space, i, s).mass;
    a = std::min(a, mass[static_cast<std::size_t>(i)]);
  }
  InverseGapReport rep;
  for (int x = 0; x < space.size(); ++x)
    for (int y = x + 1; y < space.size(); ++y) {
      if (!(space.distance(x, y) < delta)) continue;
      const double gap = std::abs(1.0 / mass[static_cast<std::size_t>(x)] -
                                  1.0 / mass[static_cast<std::size_t>(y)]);
      if (rep.x < 0 || gap > rep.max_gap) {
        rep.max_gap = gap;
        rep.x = x;
        rep.y = y;
      }
    }
  rep.bound = symdiff_modulus(space, s, delta).value / (a * a);
  return rep;
}

/// Finite-space witness of the net / positive-infimum / doubling equivalence
/// for a bounded subset: all three quantities at once.
struct TotalBoundednessReport {
  std::vector<int> net;
  int net_size = 0;
  double inf_ball = 0.0;
  double doubling = 0.0;
};

inline TotalBoundednessReport total_boundedness_report(const MetricMeasureSpace& space, const IndexSet& E, double s) {
  if (E.empty()) throw std::invalid_argument("total_boundedness_report: subset must be nonempty");
  TotalBoundednessReport rep;
  rep.net = greedy_net(space, E, s);
  rep.net_size = static_cast<int>(rep.net.size());
  rep.inf_ball = std::numeric_limits<double>::infinity();
  rep.doubling = 0.0;
  for (int x : E.members) {
    const double m1 = ball(space, x, s).mass;
    const double m2 = ball(space, x, 2.0 * s).mass;
    rep.inf_ball = std::min(rep.inf_ball, m1);
    rep.doubling = std::max(rep.doubling, m2 / m1);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Distance-sorted pair cache: amortizes modulus sweeps over many deltas.
// Pairs are stored in lexicographic (x, y) order with x < y, so scanning the
// cache reproduces exactly the arithmetic and tie-breaking of the standalone
// modulus operations.
// ---------------------------------------------------------------------------

struct PairEntry {
  int x = 0;
  int y = 0;
  double dist = 0.0;
  double symdiff_mass = 0.0;
};

struct PairCache {
  double s = 0.0;
  std::vector<PairEntry> pairs;   // x < y, lexicographic order
  std::vector<double> ball_mass;  // mu(B(i, s)) per point
  double inf_ball = 0.0;
};

inline PairCache make_pair_cache(const MetricMeasureSpace& space, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("make_pair_cache: s must be positive");
  const int n = space.size();
  std::vector<IndexSet> balls(static_cast<std::size_t>(n));
  PairCache cache;
  cache.s = s;
  cache.ball_mass.resize(static_cast<std::size_t>(n));
  cache.inf_ball = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    balls[static_cast<std::size_t>(i)] = ball(space, i, s);
    cache.ball_mass[static_cast<std::size_t>(i)] = balls[static_cast<std::size_t>(i)].mass;
    cache.inf_ball = std::min(cache.inf_ball, balls[static_cast<std::size_t>(i)].mass);
  }
  cache.pairs.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y) {
      const auto& bx = balls[static_cast<std::size_t>(x)].members;
      const auto& by = balls[static_cast<std::size_t>(y)].members;
      double m = 0.0;
      std::size_t ix = 0, iy = 0;
      while (ix < bx.size() || iy < by.size()) {
        if (iy == by.size() || (ix < bx.size() && bx[ix] < by[iy])) {
          m += space.weight(bx[ix++]);
        } else if (ix == bx.size() || by[iy] < bx[ix]) {
          m += space.weight(by[iy++]);
        } else {
          ++ix;
          ++iy;
        }
      }
      cache.pairs.push_back(PairEntry{x, y, space.distance(x, y), m});
    }
  return cache;
}

/// symdiff_modulus evaluated from a pair cache; identical value and argmax
/// as the direct operation.
inline ValueArgPair symdiff_modulus(const PairCache& cache, double delta) {
  ValueArgPair best{0.0, -1, -1};
  for (const auto& p : cache.pairs) {
    if (!(p.dist < delta)) continue;
    if (best.x < 0 || p.symdiff_mass > best.value) best = {p.symdiff_mass, p.x, p.y};
  }
  if (best.x < 0) best = {0.0, -1, -1};
  return best;
}

// ---------------------------------------------------------------------------
// Per-scale report for the diagnose pipeline.
// ---------------------------------------------------------------------------

struct ModulusRow {
  double delta = 0.0;
  double value = 0.0;
  int arg_x = -1;
  int arg_y = -1;  // -1 for annulus rows (single-point argmax)
};

struct InverseGapRow {
  double delta = 0.0;
  double max_gap = 0.0;
  double bound = 0.0;
};

struct RegularityReport {
  double s = 0.0;
  ValueArg gamma;
  double inf_ball = 0.0;
  std::vector<ModulusRow> star_rows;     // delta in { s*k/K : k = 1..K-1 }
  std::vector<ModulusRow> symdiff_rows;  // delta in { s*k/K : k = 1..K }
  std::vector<InverseGapRow> gap_rows;   // same grid as symdiff_rows
  TotalBoundednessReport boundedness;             // over the whole space
};

inline RegularityReport build_regularity_report(const MetricMeasureSpace& space, double s,
                                                int grid = 64) {
  if (grid < 2) throw std::invalid_argument("build_regularity_report: grid must be >= 2");
  RegularityReport rep;
  rep.s = s;
  rep.gamma = doubling_constant(space, s);
  rep.inf_ball = inf_ball_mass(space, s);
  for (int k = 1; k < grid; ++k) {
    const double delta = s * k / grid;
    const ValueArg v = star_modulus(space, s, delta);
    rep.star_rows.push_back(ModulusRow{delta, v.value, v.arg, -1});
  }
  const PairCache cache = make_pair_cache(space, s);
  const double a2 = cache.inf_ball * cache.inf_ball;
  for (int k = 1; k <= grid; ++k) {
    const double delta = s * k / grid;
    const ValueArgPair v = symdiff_modulus(cache, delta);
    rep.symdiff_rows.push_back(ModulusRow{delta, v.value, v.x, v.y});
    double max_gap = 0.0;
    for (const auto& p : cache.pairs) {
      if (!(p.dist < delta)) continue;
      const double gap = std::abs(1.0 / cache.ball_mass[static_cast<std::size_t>(p.x)] -
                                  1.0 / cache.ball_mass[static_cast<std::size_t>(p.y)]);
      max_gap = std::max(max_gap, gap);
    }
    rep.gap_rows.push_back(InverseGapRow{delta, max_gap, v.value / a2});
  }
  rep.boundedness = total_boundedness_report(space, full_set(space), s);
  return rep;
}

}  // namespace avgop
