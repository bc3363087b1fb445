#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "avgop/operator.hpp"
#include "avgop/regularity.hpp"
#include "avgop/space.hpp"

namespace avgop {

/// Finite family of functions with a fixed norm exponent. `sup_norm` is the
/// largest weighted p-norm over the family.
struct FamilySpec {
  std::vector<FunctionVec> functions;
  double p = 1.0;
  double sup_norm = 0.0;
};

inline FamilySpec make_family(const MetricMeasureSpace& space, std::vector<FunctionVec> functions,
                              double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("make_family: p must lie in [1, inf]");
  FamilySpec fam;
  fam.p = p;
  for (std::size_t m = 0; m < functions.size(); ++m) {
    if (static_cast<int>(functions[m].size()) != space.size())
      throw ValidationError("functions[" + std::to_string(m) + "]",
                            "length does not match the space's point count");
    for (double v : functions[m])
      if (!std::isfinite(v))
        throw ValidationError("functions[" + std::to_string(m) + "]", "nonfinite value");
  }
  fam.functions = std::move(functions);
  for (const auto& f : fam.functions) fam.sup_norm = std::max(fam.sup_norm, norm_p(space, f, p));
  return fam;
}

/// Deterministic pseudo-random members of the unit ball of the weighted
/// Lebesgue space. Member 0 is the normalized constant; the rest alternate
/// between dense random vectors and indicator-type extreme points (for
/// p = inf: full sign vectors and sparse {0, +-1} vectors).
inline FamilySpec unit_ball_sample(const MetricMeasureSpace& space, double p, int count,
                                   std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("unit_ball_sample: count must be positive");
  if (!(p >= 1.0)) throw std::invalid_argument("unit_ball_sample: p must lie in [1, inf]");
  const int n = space.size();
  const bool sup_mode = std::isinf(p);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, n - 1);

  std::vector<FunctionVec> fns;
  fns.reserve(static_cast<std::size_t>(count));
  {
    FunctionVec ones(static_cast<std::size_t>(n), 1.0);
    const double scale = 1.0 / norm_p(space, ones, p);
    FunctionVec f(static_cast<std::size_t>(n), scale);
    fns.push_back(std::move(f));
  }
  while (static_cast<int>(fns.size()) < count) {
    FunctionVec f(static_cast<std::size_t>(n), 0.0);
    if (sup_mode) {
      if (fns.size() % 2 == 1) {
        for (int i = 0; i < n; ++i)
          f[static_cast<std::size_t>(i)] = unit(rng) < 0.5 ? -1.0 : 1.0;
      } else {
        bool any = false;
        for (int i = 0; i < n; ++i) {
          const double u = unit(rng);
          if (u < 0.1) {
            f[static_cast<std::size_t>(i)] = -1.0;
            any = true;
          } else if (u > 0.9) {
            f[static_cast<std::size_t>(i)] = 1.0;
            any = true;
          }
        }
        if (!any) f[static_cast<std::size_t>(pick(rng))] = 1.0;
      }
    } else {
      if (fns.size() % 2 == 1) {
        for (int i = 0; i < n; ++i) f[static_cast<std::size_t>(i)] = gauss(rng);
        double nrm = norm_p(space, f, p);
        if (nrm < 1e-300) {
          f.assign(static_cast<std::size_t>(n), 0.0);
          f[0] = 1.0;
          nrm = norm_p(space, f, p);
        }
        for (double& v : f) v /= nrm;
      } else {
        bool any = false;
        for (int i = 0; i < n; ++i) {
          if (unit(rng) < 0.3) {
            f[static_cast<std::size_t>(i)] = 1.0;
            any = true;
          }
        }
        if (!any) f[static_cast<std::size_t>(pick(rng))] = 1.0;
        const double nrm = norm_p(space, f, p);
        for (double& v : f) v /= nrm;
      }
    }
    fns.push_back(std::move(f));
  }
  return make_family(space, std::move(fns), p);
}

namespace detail {

inline std::vector<FunctionVec> family_images(const AveragingOperator& op,
                                              const FamilySpec& family) {
  std::vector<FunctionVec> images;
  images.reserve(family.functions.size());
  for (const auto& f : family.functions) images.push_back(op.apply(f));
  return images;
}

/// Per-pair maximum of |Af(x) - Af(y)| over the family, parallel to
/// cache.pairs. Entries where `restrict_to` excludes an endpoint are zero.
inline std::vector<double> pairwise_family_oscillation(const PairCache& cache,
                                                       const std::vector<FunctionVec>& images,
                                                       const std::vector<char>* restrict_to) {
  std::vector<double> osc(cache.pairs.size(), 0.0);
  for (std::size_t i = 0; i < cache.pairs.size(); ++i) {
    const auto& pr = cache.pairs[i];
    if (restrict_to && (!(*restrict_to)[static_cast<std::size_t>(pr.x)] ||
                        !(*restrict_to)[static_cast<std::size_t>(pr.y)]))
      continue;
    double best = 0.0;
    for (const auto& img : images)
      best = std::max(best, std::abs(img[static_cast<std::size_t>(pr.x)] -
                                     img[static_cast<std::size_t>(pr.y)]));
    osc[i] = best;
  }
  return osc;
}

struct OscillationThresholds {
  double symdiff = 0.0;
  double gap = 0.0;
};

/// Largest delta on { t*k/grid : k = 1..grid } satisfying the modulus
/// thresholds plus an extra caller gate. Both moduli are nondecreasing in
/// delta, so the scan runs from the top down and stops at the first hit.
/// On failure, `why` describes the smallest grid value's failing condition.
template <typename Gate>
std::optional<double> largest_qualifying_delta(const PairCache& cache, double t, int grid,
                                               const OscillationThresholds& thr, Gate&& gate,
                                               std::string* why) {
  std::string reason;
  for (int k = grid; k >= 1; --k) {
    const double delta = t * k / grid;
    const double symv = symdiff_modulus(cache, delta).value;
    const double gapb = symv / (cache.inf_ball * cache.inf_ball);
    if (!(symv < thr.symdiff)) {
      reason = "symmetric-difference modulus " + std::to_string(symv) + " at delta " +
               std::to_string(delta) + " not below threshold " + std::to_string(thr.symdiff);
      continue;
    }
    if (!(gapb < thr.gap)) {
      reason = "inverse-measure gap bound " + std::to_string(gapb) + " at delta " +
               std::to_string(delta) + " not below threshold " + std::to_string(thr.gap);
      continue;
    }
    if (!gate(delta)) {
      reason = "measured oscillation at delta " + std::to_string(delta) +
               " not below the pointwise target";
      continue;
    }
    return delta;
  }
  if (why) *why = reason;
  return std::nullopt;
}

inline double max_osc_below(const PairCache& cache, const std::vector<double>& osc, double cutoff,
                            bool strict) {
  double best = 0.0;
  for (std::size_t i = 0; i < cache.pairs.size(); ++i) {
    const double d = cache.pairs[i].dist;
    if (strict ? (d < cutoff) : (d <= cutoff)) best = std::max(best, osc[i]);
  }
  return best;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Kolmogorov-Riesz style hypothesis tables.
// ---------------------------------------------------------------------------

struct KRRow {
  double parameter = 0.0;  // sigma for condition 1, subset radius for condition 2
  double value = 0.0;
};

struct KRReport {
  std::vector<KRRow> condition1;  // sigma -> max_f ||A_sigma f - f||_p
  std::vector<KRRow> condition2;  // radius -> max_f ||f restricted outside B(ref, radius)||_p
  int reference_point = 0;
  std::optional<double> target1, target2;
  std::optional<double> smallest_sigma;   // first sigma with condition1 < target1
  std::optional<double> smallest_radius;  // first radius with condition2 < target2
};

/// Tabulates both hypotheses of the averaging-based compactness criterion
/// over the supplied grids. Pure enumeration; no compactness verdict is
/// asserted (covering_number quantifies the conclusion side).
inline KRReport kolmogorov_riesz_check(const MetricMeasureSpace& space, const FamilySpec& family,
                                       const std::vector<double>& sigma_grid,
                                       const std::vector<double>& radius_grid,
                                       std::optional<double> target1 = std::nullopt,
                                       std::optional<double> target2 = std::nullopt,
                                       int reference_point = 0) {
  if (family.functions.empty())
    throw std::invalid_argument("kolmogorov_riesz_check: family must be nonempty");
  if (sigma_grid.empty() || radius_grid.empty())
    throw std::invalid_argument("kolmogorov_riesz_check: grids must be nonempty");
  space.check_index(reference_point);

  KRReport rep;
  rep.reference_point = reference_point;
  rep.target1 = target1;
  rep.target2 = target2;
  for (double sigma : sigma_grid) {
    const AveragingOperator op = assemble(space, sigma);
    double worst = 0.0;
    for (const auto& f : family.functions) {
      FunctionVec g = op.apply(f);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] -= f[i];
      worst = std::max(worst, norm_p(space, g, family.p));
    }
    rep.condition1.push_back(KRRow{sigma, worst});
    if (target1 && !rep.smallest_sigma && worst < *target1) rep.smallest_sigma = sigma;
  }
  for (double radius : radius_grid) {
    const IndexSet tail = complement(space, ball(space, reference_point, radius));
    double worst = 0.0;
    for (const auto& f : family.functions)
      worst = std::max(worst, norm_p_on(space, f, family.p, tail));
    rep.condition2.push_back(KRRow{radius, worst});
    if (target2 && !rep.smallest_radius && worst < *target2) rep.smallest_radius = radius;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Equicontinuity moduli for sup-norm families.
// ---------------------------------------------------------------------------

struct EquicontinuityRow {
  double epsilon = 0.0;
  std::optional<double> delta;    // largest grid delta whose sufficient conditions hold
  double max_oscillation = 0.0;   // measured over pairs with d < delta, all members
  bool verified = false;          // measured oscillation < epsilon
};

struct EquicontinuityReport {
  double c1 = 0.0;  // family sup norm
  double c2 = 0.0;  // largest ball mass at the operator radius
  double c3 = 0.0;  // smallest ball mass at the operator radius
  std::vector<EquicontinuityRow> rows;
};

/// For each epsilon, the largest grid delta such that
///   symdiff_modulus(r, delta) < c3 * eps / (2 c1)   and
///   symdiff_modulus(r, delta) / c3^2 < eps / (2 c1 c2),
/// then the measured oscillation max |A_r f(x) - A_r f(y)| over pairs with
/// d(x, y) < delta. Requires a sup-norm family.
inline EquicontinuityReport equicontinuity_modulus(const MetricMeasureSpace& space, double r,
                                                   const FamilySpec& family,
                                                   const std::vector<double>& epsilons,
                                                   int grid = 64) {
  if (!std::isinf(family.p))
    throw std::invalid_argument("equicontinuity_modulus: family must use p = inf");
  if (grid < 1) throw std::invalid_argument("equicontinuity_modulus: grid must be >= 1");

  const AveragingOperator op = assemble(space, r);
  const std::vector<FunctionVec> images = detail::family_images(op, family);
  const PairCache cache = make_pair_cache(space, r);
  const std::vector<double> osc = detail::pairwise_family_oscillation(cache, images, nullptr);

  EquicontinuityReport rep;
  rep.c1 = family.sup_norm;
  rep.c3 = cache.inf_ball;
  rep.c2 = 0.0;
  for (double m : cache.ball_mass) rep.c2 = std::max(rep.c2, m);

  for (double eps : epsilons) {
    detail::OscillationThresholds thr;
    thr.symdiff = rep.c3 * eps / (2.0 * rep.c1);
    thr.gap = eps / (2.0 * rep.c1 * rep.c2);
    EquicontinuityRow row;
    row.epsilon = eps;
    row.delta = detail::largest_qualifying_delta(
        cache, r, grid, thr, [](double) { return true; }, nullptr);
    if (row.delta) {
      row.max_oscillation = detail::max_osc_below(cache, osc, *row.delta, /*strict=*/true);
      row.verified = row.max_oscillation < eps;
    }
    rep.rows.push_back(row);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Oscillation modulus for p < inf families on a bounded subset.
// ---------------------------------------------------------------------------

enum class ModulusStatus { ok, no_sigma, no_delta };

struct OscillationModulusResult {
  ModulusStatus status = ModulusStatus::ok;
  double c1 = 0.0;              // family norm bound
  double c2 = 0.0;              // mass of the union of t-balls over the subset
  double c3 = 0.0;              // smallest t-ball mass over the subset
  std::optional<double> sigma;  // p = 1 only: averaging scale with small ||A_sigma f - f||_1
  std::optional<double> c4;     // p = 1 only: smallest sigma-ball mass over the union
  std::optional<double> delta;
  double max_oscillation = 0.0;  // over subset pairs with d < delta, all members
  bool verified = false;         // max_oscillation < epsilon
  std::string failure;
};

/// Grid delta such that |A_t f(x) - A_t f(y)| < epsilon for subset pairs
/// closer than delta, selected through the modulus thresholds
///   p > 1: symdiff < (eps c3 / 2 c1)^q,        gap bound < eps / (2 c1 c2^(1/q))
///   p = 1: symdiff < eps c3 c4 / (4 c1),        gap bound < eps / (2 c1)
/// (q conjugate to p), then verified pointwise by enumeration. For p = 1 a
/// scale sigma with max_f ||A_sigma f - f||_1 < eps c3 / 4 must exist on the
/// grid; its absence is reported as a distinct outcome, not an error.
inline OscillationModulusResult oscillation_modulus(const MetricMeasureSpace& space, double t,
                                     const FamilySpec& family, const IndexSet& E, double epsilon,
                                     int grid = 64) {
  if (std::isinf(family.p))
    throw std::invalid_argument("oscillation_modulus: family must use finite p (see equicontinuity_modulus)");
  if (E.empty()) throw std::invalid_argument("oscillation_modulus: subset must be nonempty");
  if (!(epsilon > 0.0)) throw std::invalid_argument("oscillation_modulus: epsilon must be positive");
  if (grid < 1) throw std::invalid_argument("oscillation_modulus: grid must be >= 1");

  const double p = family.p;
  const AveragingOperator op = assemble(space, t);
  const std::vector<FunctionVec> images = detail::family_images(op, family);
  const PairCache cache = make_pair_cache(space, t);

  OscillationModulusResult res;
  res.c1 = family.sup_norm;

  std::vector<int> union_members;
  for (int x : E.members) {
    const auto& row = op.rows[static_cast<std::size_t>(x)];
    union_members.insert(union_members.end(), row.begin(), row.end());
  }
  const IndexSet union_set = make_index_set(space, std::move(union_members));
  res.c2 = union_set.mass;
  res.c3 = std::numeric_limits<double>::infinity();
  for (int x : E.members)
    res.c3 = std::min(res.c3, cache.ball_mass[static_cast<std::size_t>(x)]);

  detail::OscillationThresholds thr;
  if (p == 1.0) {
    const double sigma_target = epsilon * res.c3 / 4.0;
    for (int k = grid; k >= 1; --k) {
      const double sigma = t * k / grid;
      const AveragingOperator op_sigma = assemble(space, sigma);
      double dev = 0.0;
      for (const auto& f : family.functions) {
        FunctionVec g = op_sigma.apply(f);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] -= f[i];
        dev = std::max(dev, norm_p(space, g, 1.0));
      }
      if (dev < sigma_target) {
        res.sigma = sigma;
        double c4 = std::numeric_limits<double>::infinity();
        for (int z : union_set.members) c4 = std::min(c4, ball(space, z, sigma).mass);
        res.c4 = c4;
        break;
      }
    }
    if (!res.sigma) {
      res.status = ModulusStatus::no_sigma;
      res.failure = "no grid sigma gives max_f ||A_sigma f - f||_1 below " +
                    std::to_string(epsilon * res.c3 / 4.0);
      return res;
    }
    thr.symdiff = epsilon * res.c3 * (*res.c4) / (4.0 * res.c1);
    thr.gap = epsilon / (2.0 * res.c1);
  } else {
    const double q = p / (p - 1.0);
    thr.symdiff = std::pow(epsilon * res.c3 / (2.0 * res.c1), q);
    thr.gap = epsilon / (2.0 * res.c1 * std::pow(res.c2, 1.0 / q));
  }

  std::string why;
  res.delta = detail::largest_qualifying_delta(
      cache, t, grid, thr, [](double) { return true; }, &why);
  if (!res.delta) {
    res.status = ModulusStatus::no_delta;
    res.failure = why;
    return res;
  }

  std::vector<char> in_E(static_cast<std::size_t>(space.size()), 0);
  for (int x : E.members) in_E[static_cast<std::size_t>(x)] = 1;
  const std::vector<double> osc = detail::pairwise_family_oscillation(cache, images, &in_E);
  res.max_oscillation = detail::max_osc_below(cache, osc, *res.delta, /*strict=*/true);
  res.verified = res.max_oscillation < epsilon;
  return res;
}

// ---------------------------------------------------------------------------
// Finite net certificates.
// ---------------------------------------------------------------------------

class CertificateError : public std::runtime_error {
public:
  explicit CertificateError(const std::string& message) : std::runtime_error(message) {}
};

/// Compactness certificate for the averaged images of a family: a delta-net
/// of centers, a uniform value grid at each center, the occupied grid tuples
/// with one representative member each, and the radius achieved when every
/// member is matched to its nearest representative image.
struct NetCertificate {
  double epsilon = 0.0;
  double p = 1.0;
  double radius = 0.0;     // operator radius the certificate was built for
  double delta = 0.0;      // net radius
  double grid_step = 0.0;  // value-grid spacing (twice the pointwise half-width)
  IndexSet subset;
  std::vector<int> centers;
  std::vector<std::vector<double>> grids;        // occupied grid values per center
  std::vector<std::vector<long long>> occupied;  // occupied tuples, lexicographically sorted
  std::vector<int> representatives;              // parallel to occupied: member index
  std::vector<int> member_tuple;                 // member -> index into occupied
  double achieved_radius = 0.0;
};

namespace detail {

/// Round to the nearest multiple of `step`, ties toward the smaller value.
inline long long bucket_of(double value, double step) {
  return static_cast<long long>(std::ceil(value / step - 0.5));
}

inline double certificate_distance(const MetricMeasureSpace& space, const FunctionVec& a,
                                   const FunctionVec& b, double p, const IndexSet& subset,
                                   bool sup_mode) {
  FunctionVec diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  return sup_mode ? norm_p(space, diff, kInfinity) : norm_p_on(space, diff, p, subset);
}

}  // namespace detail

/// Builds a certificate with target radius `epsilon`.
///
/// The net radius is the largest grid delta that (a) passes the
/// modulus-based sufficient thresholds for pointwise oscillation
/// epsilon/4 (sup mode) or epsilon * mu(E)^(-1/p) / 4, and (b) passes a
/// direct check of that oscillation target over all subset pairs within the
/// closed net radius. Gate (b) covers the pairs produced by closed-ball
/// coverage, which the strict-inequality moduli do not see; without it a
/// point at distance exactly delta from its center could break the
/// certificate. Throws CertificateError when no grid delta qualifies,
/// naming the failing condition.
inline NetCertificate build_net_certificate(const MetricMeasureSpace& space, double r,
                                            const FamilySpec& family, const IndexSet& E,
                                            double epsilon, int grid = 64) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("build_net_certificate: epsilon must be positive");
  if (E.empty()) throw std::invalid_argument("build_net_certificate: subset must be nonempty");
  if (family.functions.empty())
    throw std::invalid_argument("build_net_certificate: family must be nonempty");
  if (grid < 1) throw std::invalid_argument("build_net_certificate: grid must be >= 1");

  const bool sup_mode = std::isinf(family.p);
  const double target =
      sup_mode ? epsilon / 4.0 : epsilon * std::pow(E.mass, -1.0 / family.p) / 4.0;

  const AveragingOperator op = assemble(space, r);
  const std::vector<FunctionVec> images = detail::family_images(op, family);
  const PairCache cache = make_pair_cache(space, r);

  std::vector<char> in_E(static_cast<std::size_t>(space.size()), 0);
  for (int x : E.members) in_E[static_cast<std::size_t>(x)] = 1;
  const std::vector<double> osc = detail::pairwise_family_oscillation(cache, images, &in_E);

  detail::OscillationThresholds thr;
  if (sup_mode) {
    const double c1 = family.sup_norm;
    double c2 = 0.0;
    for (double m : cache.ball_mass) c2 = std::max(c2, m);
    const double c3 = cache.inf_ball;
    thr.symdiff = c3 * target / (2.0 * c1);
    thr.gap = target / (2.0 * c1 * c2);
  } else {
    OscillationModulusResult probe = oscillation_modulus(space, r, family, E, target, grid);
    if (probe.status == ModulusStatus::no_sigma)
      throw CertificateError("certificate construction failed: " + probe.failure);
    const double c1 = probe.c1;
    if (family.p == 1.0) {
      thr.symdiff = target * probe.c3 * (*probe.c4) / (4.0 * c1);
      thr.gap = target / (2.0 * c1);
    } else {
      const double q = family.p / (family.p - 1.0);
      thr.symdiff = std::pow(target * probe.c3 / (2.0 * c1), q);
      thr.gap = target / (2.0 * c1 * std::pow(probe.c2, 1.0 / q));
    }
  }

  std::string why;
  const auto gate = [&](double delta) {
    const double cutoff = delta + ball_tolerance(delta);
    return detail::max_osc_below(cache, osc, cutoff, /*strict=*/false) < target;
  };
  const std::optional<double> delta =
      detail::largest_qualifying_delta(cache, r, grid, thr, gate, &why);
  if (!delta) throw CertificateError("certificate construction failed: " + why);

  NetCertificate cert;
  cert.epsilon = epsilon;
  cert.p = family.p;
  cert.radius = r;
  cert.delta = *delta;
  cert.grid_step = 2.0 * target;
  cert.subset = E;
  cert.centers = greedy_net(space, E, *delta);

  const std::size_t num_members = family.functions.size();
  std::vector<std::vector<long long>> tuples(num_members);
  std::map<std::vector<long long>, int> first_member;
  for (std::size_t m = 0; m < num_members; ++m) {
    std::vector<long long> tup;
    tup.reserve(cert.centers.size());
    for (int c : cert.centers)
      tup.push_back(detail::bucket_of(images[m][static_cast<std::size_t>(c)], cert.grid_step));
    first_member.try_emplace(tup, static_cast<int>(m));
    tuples[m] = std::move(tup);
  }

  std::map<std::vector<long long>, int> tuple_index;
  for (const auto& [tup, rep] : first_member) {
    tuple_index.emplace(tup, static_cast<int>(cert.occupied.size()));
    cert.occupied.push_back(tup);
    cert.representatives.push_back(rep);
  }
  cert.member_tuple.resize(num_members);
  for (std::size_t m = 0; m < num_members; ++m)
    cert.member_tuple[m] = tuple_index.at(tuples[m]);

  cert.grids.resize(cert.centers.size());
  for (std::size_t i = 0; i < cert.centers.size(); ++i) {
    std::vector<double> values;
    values.reserve(cert.occupied.size());
    for (const auto& tup : cert.occupied) values.push_back(tup[i] * cert.grid_step);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    cert.grids[i] = std::move(values);
  }

  double achieved = 0.0;
  for (std::size_t m = 0; m < num_members; ++m) {
    double best = std::numeric_limits<double>::infinity();
    for (int rep : cert.representatives)
      best = std::min(best, detail::certificate_distance(space, images[m],
                                                         images[static_cast<std::size_t>(rep)],
                                                         family.p, E, sup_mode));
    achieved = std::max(achieved, best);
  }
  cert.achieved_radius = achieved;
  if (!(achieved < epsilon))
    throw CertificateError("constructed certificate exceeded its target radius: " +
                           std::to_string(achieved) + " >= " + std::to_string(epsilon));
  return cert;
}

struct CertificateCheck {
  double achieved_radius = 0.0;
  int worst_member = -1;
  bool pass = false;
};

/// Independent certificate verification: recomputes every image from the
/// operator, measures each member's distance to its nearest representative
/// image (restricted to the certificate subset for finite p, global sup for
/// p = inf), and passes iff the largest such distance is below epsilon.
/// Trusts nothing from the certificate except the representative indices,
/// the subset, and epsilon.
inline CertificateCheck verify_certificate(const MetricMeasureSpace& space,
                                           const AveragingOperator& op,
                                           const NetCertificate& cert,
                                           const FamilySpec& family) {
  if (op.n != space.size())
    throw std::invalid_argument("verify_certificate: operator does not match space");
  if (std::abs(op.radius - cert.radius) > 1e-12 * (1.0 + cert.radius))
    throw std::invalid_argument("verify_certificate: operator radius differs from the certificate's");
  if (cert.member_tuple.size() != family.functions.size())
    throw std::invalid_argument("verify_certificate: certificate was built for a different family size");
  for (int rep : cert.representatives)
    if (rep < 0 || rep >= static_cast<int>(family.functions.size()))
      throw std::invalid_argument("verify_certificate: representative index out of range");

  const bool sup_mode = std::isinf(cert.p);
  const std::vector<FunctionVec> images = detail::family_images(op, family);

  CertificateCheck chk;
  chk.achieved_radius = cert.representatives.empty()
                            ? std::numeric_limits<double>::infinity()
                            : 0.0;
  for (std::size_t m = 0; m < images.size(); ++m) {
    double best = std::numeric_limits<double>::infinity();
    for (int rep : cert.representatives)
      best = std::min(best, detail::certificate_distance(space, images[m],
                                                         images[static_cast<std::size_t>(rep)],
                                                         cert.p, cert.subset, sup_mode));
    if (best > chk.achieved_radius || chk.worst_member < 0) {
      chk.achieved_radius = best;
      chk.worst_member = static_cast<int>(m);
    }
  }
  chk.pass = chk.achieved_radius < cert.epsilon;
  return chk;
}

/// Size of a greedy epsilon-cover of the image set in the weighted p-norm:
/// the first uncovered element (input order) becomes a center and covers
/// everything within epsilon (closed). Upper-bounds the minimal covering
/// number.
inline int covering_number(const MetricMeasureSpace& space, const std::vector<FunctionVec>& images,
                           double p, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("covering_number: epsilon must be positive");
  if (images.empty()) return 0;
  std::vector<char> covered(images.size(), 0);
  int count = 0;
  FunctionVec diff(images[0].size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (covered[i]) continue;
    ++count;
    for (std::size_t j = i; j < images.size(); ++j) {
      if (covered[j]) continue;
      for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = images[i][k] - images[j][k];
      if (norm_p(space, diff, p) <= epsilon) covered[j] = 1;
    }
  }
  return count;
}

// ---------------------------------------------------------------------------
// Composite-averaging bound check.
// ---------------------------------------------------------------------------

struct CompositeBoundEntry {
  double s = 0.0;
  double star_value = 0.0;     // annulus modulus of radius-r balls at half-width s
  double gap_bound = 0.0;      // symdiff modulus / inf_ball^2 at threshold distance s
  bool qualifies = false;
  double max_deviation = 0.0;  // max_f ||A_s (A_r f) - A_r f||_1, computed when qualifying
};

struct CompositeBoundReport {
  double epsilon = 0.0;
  double c1 = 0.0;  // family norm bound
  double c2 = 0.0;  // total mass
  double c3 = 0.0;  // smallest r-ball mass
  double star_threshold = 0.0;
  double gap_threshold = 0.0;
  std::vector<CompositeBoundEntry> entries;
  bool any_qualifying = false;
  bool pass = true;  // no qualifying s exceeded epsilon
};

/// For every grid s in (0, r) meeting
///   star_modulus(r, s) < eps c3 / (2 c1)   and
///   gap bound at distance s < eps / (2 c1 c2),
/// verifies ||A_s (A_r f) - A_r f||_1 <= eps for every family member by a
/// direct two-pass computation. Coarse spaces may admit no qualifying s;
/// that is reported, not invented around.
inline CompositeBoundReport composite_bound_check(const MetricMeasureSpace& space, double r,
                                         const FamilySpec& family, double epsilon, int grid = 64) {
  if (family.p != 1.0)
    throw std::invalid_argument("composite_bound_check: family must use p = 1");
  if (family.functions.empty())
    throw std::invalid_argument("composite_bound_check: family must be nonempty");
  if (!(epsilon > 0.0)) throw std::invalid_argument("composite_bound_check: epsilon must be positive");
  if (grid < 2) throw std::invalid_argument("composite_bound_check: grid must be >= 2");

  const AveragingOperator op_r = assemble(space, r);
  const std::vector<FunctionVec> images = detail::family_images(op_r, family);
  const PairCache cache = make_pair_cache(space, r);

  CompositeBoundReport rep;
  rep.epsilon = epsilon;
  rep.c1 = family.sup_norm;
  rep.c2 = space.total_mass();
  rep.c3 = cache.inf_ball;
  rep.star_threshold = epsilon * rep.c3 / (2.0 * rep.c1);
  rep.gap_threshold = epsilon / (2.0 * rep.c1 * rep.c2);

  for (int k = 1; k < grid; ++k) {
    CompositeBoundEntry entry;
    entry.s = r * k / grid;
    entry.star_value = star_modulus(space, r, entry.s).value;
    entry.gap_bound =
        symdiff_modulus(cache, entry.s).value / (cache.inf_ball * cache.inf_ball);
    entry.qualifies =
        entry.star_value < rep.star_threshold && entry.gap_bound < rep.gap_threshold;
    if (entry.qualifies) {
      rep.any_qualifying = true;
      const AveragingOperator op_s = assemble(space, entry.s);
      for (const auto& img : images) {
        FunctionVec g = op_s.apply(img);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] -= img[i];
        entry.max_deviation = std::max(entry.max_deviation, norm_p(space, g, 1.0));
      }
      if (entry.max_deviation > epsilon * (1.0 + 1e-10)) rep.pass = false;
    }
    rep.entries.push_back(std::move(entry));
  }
  return rep;
}

}  // namespace avgop
