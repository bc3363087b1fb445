#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "avgop/compactness.hpp"
#include "avgop/operator.hpp"
#include "avgop/regularity.hpp"
#include "avgop/space.hpp"

namespace avgop {

struct BatteryViolation {
  std::string check;
  double s = 0.0;
  double delta = 0.0;
  int x = -1;
  int y = -1;
  double lhs = 0.0;
  double rhs = 0.0;
  FunctionVec f;
};

struct BatteryReport {
  long trials = 0;
  std::map<std::string, long> checks_run;
  std::vector<BatteryViolation> violations;
  bool pass() const { return violations.empty(); }
};

namespace battery_detail {

inline bool leq_tol(double lhs, double rhs, double tol) {
  return lhs <= rhs + tol * std::max(1.0, std::abs(rhs));
}

inline std::optional<BatteryViolation> check_oscillation(const MetricMeasureSpace& space,
                                                         const AveragingOperator& op,
                                                         const FunctionVec& f, int x, int y,
                                                         double tol) {
  const OscillationBound ob = oscillation_bound(space, op, f, x, y);
  if (leq_tol(ob.actual, ob.bound, tol)) return std::nullopt;
  return BatteryViolation{"oscillation_bound", op.radius, 0.0, x, y, ob.actual, ob.bound, f};
}

inline std::optional<BatteryViolation> check_containment(const MetricMeasureSpace& space,
                                                         double s, double delta, int x, int y,
                                                         double tol) {
  const double lhs = sym_diff(space, x, y, s).mass;
  const double rhs = annulus(space, x, s, delta).mass + annulus(space, y, s, delta).mass;
  if (leq_tol(lhs, rhs, tol)) return std::nullopt;
  return BatteryViolation{"annulus_containment", s, delta, x, y, lhs, rhs, {}};
}

inline std::optional<BatteryViolation> check_inverse_gap(const MetricMeasureSpace& space, double s,
                                                         int x, int y, double inf_ball,
                                                         double tol) {
  const double mx = ball(space, x, s).mass;
  const double my = ball(space, y, s).mass;
  const double lhs = std::abs(1.0 / mx - 1.0 / my);
  const double rhs = sym_diff(space, x, y, s).mass / (inf_ball * inf_ball);
  if (leq_tol(lhs, rhs, tol)) return std::nullopt;
  return BatteryViolation{"inverse_gap_bound", s, 0.0, x, y, lhs, rhs, {}};
}

inline std::optional<BatteryViolation> check_sup_contraction(const MetricMeasureSpace& space,
                                                             const AveragingOperator& op,
                                                             const FunctionVec& f, double tol) {
  const double lhs = norm_p(space, op.apply(f), kInfinity);
  const double rhs = norm_p(space, f, kInfinity);
  if (leq_tol(lhs, rhs, tol)) return std::nullopt;
  return BatteryViolation{"sup_norm_contraction", op.radius, 0.0, -1, -1, lhs, rhs, f};
}

inline std::optional<BatteryViolation> check_l1_norm_vs_doubling(const MetricMeasureSpace& space,
                                                                 const AveragingOperator& op,
                                                                 double tol) {
  const double lhs = operator_norm(space, op, 1.0);
  const double rhs = doubling_constant(space, op.radius).value;
  if (leq_tol(lhs, rhs, tol)) return std::nullopt;
  return BatteryViolation{"l1_norm_vs_doubling", op.radius, 0.0, -1, -1, lhs, rhs, {}};
}

inline std::optional<BatteryViolation> check_hoelder(const MetricMeasureSpace& space,
                                                     const FunctionVec& f, const FunctionVec& g,
                                                     double p, double tol) {
  double lhs = 0.0;
  for (int i = 0; i < space.size(); ++i)
    lhs += space.weight(i) * std::abs(f[static_cast<std::size_t>(i)] *
                                      g[static_cast<std::size_t>(i)]);
  const double q = std::isinf(p) ? 1.0 : (p == 1.0 ? kInfinity : p / (p - 1.0));
  const double rhs = norm_p(space, f, p) * norm_p(space, g, q);
  if (leq_tol(lhs, rhs, tol)) return std::nullopt;
  return BatteryViolation{"weighted_hoelder", p, 0.0, -1, -1, lhs, rhs, f};
}

}  // namespace battery_detail

/// Randomized inequality battery over one space. Each trial draws a scale,
/// a half-width, a pair of points, and a function, then checks the
/// oscillation bound, the annulus containment and inverse-gap bound (when
/// the pair is close enough to qualify), sup-norm contraction, the
/// L1-operator-norm-vs-doubling bound, and the weighted Hoelder inequality.
/// Every hundredth trial also runs the whole-space inverse-gap report and
/// a composite-averaging bound check on a small sampled family.
/// Deterministic for a fixed seed.
inline BatteryReport run_inequality_battery(const MetricMeasureSpace& space, std::uint64_t seed,
                                            long trials, double tol = 1e-10) {
  if (trials < 1) throw std::invalid_argument("run_inequality_battery: trials must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, space.size() - 1);

  const double diam = diameter(space);
  const double scale = diam > 0.0 ? diam : 1.0;

  BatteryReport rep;
  rep.trials = trials;
  auto record = [&rep](const std::optional<BatteryViolation>& v, const char* name) {
    ++rep.checks_run[name];
    if (v) rep.violations.push_back(*v);
  };

  const std::vector<double> hoelder_ps = {1.0, 1.5, 2.0, 3.0, kInfinity};

  for (long trial = 0; trial < trials; ++trial) {
    const double s = (0.05 + 0.55 * unit(rng)) * scale;
    const double delta = (0.1 + 0.8 * unit(rng)) * s;
    const int x = pick(rng);
    const int y = pick(rng);
    FunctionVec f(static_cast<std::size_t>(space.size()));
    FunctionVec g(static_cast<std::size_t>(space.size()));
    for (auto& v : f) v = 4.0 * unit(rng) - 2.0;
    for (auto& v : g) v = 4.0 * unit(rng) - 2.0;

    const AveragingOperator op = assemble(space, s);
    record(battery_detail::check_oscillation(space, op, f, x, y, tol), "oscillation_bound");
    if (space.distance(x, y) < delta) {
      record(battery_detail::check_containment(space, s, delta, x, y, tol),
             "annulus_containment");
      record(battery_detail::check_inverse_gap(space, s, x, y, inf_ball_mass(space, s), tol),
             "inverse_gap_bound");
    }
    record(battery_detail::check_sup_contraction(space, op, f, tol), "sup_norm_contraction");
    record(battery_detail::check_l1_norm_vs_doubling(space, op, tol), "l1_norm_vs_doubling");
    const double p = hoelder_ps[static_cast<std::size_t>(trial) % hoelder_ps.size()];
    record(battery_detail::check_hoelder(space, f, g, p, tol), "weighted_hoelder");

    if (trial % 100 == 0) {
      ++rep.checks_run["inverse_gap_report"];
      const InverseGapReport gap = inverse_measure_gap(space, s, delta);
      if (!battery_detail::leq_tol(gap.max_gap, gap.bound, tol))
        rep.violations.push_back(BatteryViolation{"inverse_gap_report", s, delta, gap.x, gap.y,
                                                  gap.max_gap, gap.bound, {}});

      ++rep.checks_run["composite_bound"];
      const FamilySpec fam = unit_ball_sample(space, 1.0, 8, rng());
      const double eps = 0.3 + 0.7 * unit(rng);
      const CompositeBoundReport t41 = composite_bound_check(space, s, fam, eps, 16);
      if (!t41.pass) {
        for (const auto& e : t41.entries)
          if (e.qualifies && e.max_deviation > eps * (1.0 + tol)) {
            rep.violations.push_back(BatteryViolation{"composite_bound", e.s, 0.0, -1, -1,
                                                      e.max_deviation, eps, {}});
            break;
          }
      }
    }
  }
  return rep;
}

/// Seeded space generators for randomized testing.
inline MetricMeasureSpace random_euclidean_space(std::mt19937_64& rng, int n, int dim) {
  std::uniform_real_distribution<double> coord(0.0, 10.0);
  std::uniform_real_distribution<double> wgt(0.1, 2.0);
  std::vector<std::vector<double>> pts(static_cast<std::size_t>(n));
  std::vector<double> ws(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    pts[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(dim));
    for (int k = 0; k < dim; ++k) pts[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = coord(rng);
    ws[static_cast<std::size_t>(i)] = wgt(rng);
  }
  return MetricMeasureSpace::from_points(pts, ws);
}

/// Matrix-form copy of a random Euclidean cloud: exercises the explicit
/// distance-matrix code path with a metric that satisfies the triangle
/// inequality.
inline MetricMeasureSpace random_matrix_space(std::mt19937_64& rng, int n, int dim) {
  const MetricMeasureSpace base = random_euclidean_space(rng, n, dim);
  std::vector<std::vector<double>> m(static_cast<std::size_t>(n),
                                     std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double d = base.distance(i, j);
      m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = d;
      m[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = d;
    }
  std::vector<double> ws(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ws[static_cast<std::size_t>(i)] = base.weight(i);
  return MetricMeasureSpace::from_matrix(m, ws);
}

}  // namespace avgop
