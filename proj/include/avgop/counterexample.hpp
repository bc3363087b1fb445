#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "avgop/compactness.hpp"
#include "avgop/operator.hpp"
#include "avgop/regularity.hpp"
#include "avgop/space.hpp"

namespace avgop {

enum class WitnessMode { l1, linf };

/// Family of indicator-type functions centered on a maximal greedy packing
/// at separation 4s. Their averaged images plateau near the centers and
/// vanish far away, so they stay pairwise separated:
///   l1 mode:  witnesses chi_B(c, 2s) / mu(B(c, 2s)), L1 separation >= c_bound
///   linf mode: witnesses chi_B(c, 2s),               sup separation >= 1.
struct WitnessFamily {
  double s = 0.0;
  WitnessMode mode = WitnessMode::l1;
  std::vector<int> centers;
  std::vector<FunctionVec> witnesses;
  double c_bound = 1.0;  // l1: min_x mu(B(x,s))/mu(B(x,2s)); linf: 1
  std::vector<double> separation_matrix;  // k x k, row-major, image-difference norms
};

namespace detail {

inline WitnessFamily build_witnesses(const MetricMeasureSpace& space, double s, WitnessMode mode) {
  if (!(s > 0.0)) throw std::invalid_argument("witness family: s must be positive");
  WitnessFamily fam;
  fam.s = s;
  fam.mode = mode;
  fam.centers = greedy_packing(space, full_set(space), 4.0 * s);

  for (int c : fam.centers) {
    const IndexSet b2 = ball(space, c, 2.0 * s);
    FunctionVec f(static_cast<std::size_t>(space.size()), 0.0);
    const double value = mode == WitnessMode::l1 ? 1.0 / b2.mass : 1.0;
    for (int j : b2.members) f[static_cast<std::size_t>(j)] = value;
    fam.witnesses.push_back(std::move(f));
  }

  if (mode == WitnessMode::l1) {
    fam.c_bound = std::numeric_limits<double>::infinity();
    for (int x = 0; x < space.size(); ++x)
      fam.c_bound = std::min(fam.c_bound,
                             ball(space, x, s).mass / ball(space, x, 2.0 * s).mass);
  } else {
    fam.c_bound = 1.0;
  }

  const AveragingOperator op = assemble(space, s);
  std::vector<FunctionVec> images;
  images.reserve(fam.witnesses.size());
  for (const auto& f : fam.witnesses) images.push_back(op.apply(f));

  const std::size_t k = fam.centers.size();
  const double p = mode == WitnessMode::l1 ? 1.0 : kInfinity;
  fam.separation_matrix.assign(k * k, 0.0);
  FunctionVec diff(static_cast<std::size_t>(space.size()));
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b) {
      for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = images[a][i] - images[b][i];
      const double d = norm_p(space, diff, p);
      fam.separation_matrix[a * k + b] = d;
      fam.separation_matrix[b * k + a] = d;
    }
  return fam;
}

}  // namespace detail

inline WitnessFamily l1_witnesses(const MetricMeasureSpace& space, double s) {
  return detail::build_witnesses(space, s, WitnessMode::l1);
}

inline WitnessFamily linf_witnesses(const MetricMeasureSpace& space, double s) {
  return detail::build_witnesses(space, s, WitnessMode::linf);
}

struct SeparationCheck {
  std::optional<double> min_pairwise;  // absent when fewer than two centers
  double bound = 0.0;                  // c_bound (l1) or 1 (linf)
  int arg_a = -1, arg_b = -1;
  bool pass = false;
};

/// Recomputes every pairwise image-difference norm from the witnesses (the
/// stored matrix is not trusted) and checks the separation lower bound with
/// tolerance 1e-10. A single-center family passes vacuously.
inline SeparationCheck verify_separation(const MetricMeasureSpace& space,
                                         const WitnessFamily& family) {
  SeparationCheck chk;
  chk.bound = family.c_bound;
  if (family.centers.size() < 2) {
    chk.pass = true;
    return chk;
  }
  const AveragingOperator op = assemble(space, family.s);
  std::vector<FunctionVec> images;
  images.reserve(family.witnesses.size());
  for (const auto& f : family.witnesses) images.push_back(op.apply(f));

  const double p = family.mode == WitnessMode::l1 ? 1.0 : kInfinity;
  FunctionVec diff(static_cast<std::size_t>(space.size()));
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < images.size(); ++a)
    for (std::size_t b = a + 1; b < images.size(); ++b) {
      for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = images[a][i] - images[b][i];
      const double d = norm_p(space, diff, p);
      if (d < best) {
        best = d;
        chk.arg_a = static_cast<int>(a);
        chk.arg_b = static_cast<int>(b);
      }
    }
  chk.min_pairwise = best;
  chk.pass = best >= chk.bound - 1e-10;
  return chk;
}

struct DichotomyRow {
  double length = 0.0;
  int num_centers = 0;
  std::optional<double> min_pairwise;
  double c_bound = 0.0;
  double covering_epsilon = 0.0;
  int covering = 0;
  bool pass = false;
};

/// Runs the witness construction on unit-spacing grids over [0, L] for each
/// L and tabulates how the packing size and the covering number of the
/// averaged images grow with the diameter. The covering radius is half the
/// separation bound, so separated images can never share a cover element.
inline std::vector<DichotomyRow> dichotomy_sweep(const std::vector<double>& lengths, double s,
                                                 WitnessMode mode) {
  if (lengths.empty()) throw std::invalid_argument("dichotomy_sweep: length list must be nonempty");
  std::vector<DichotomyRow> rows;
  for (double length : lengths) {
    const int count = static_cast<int>(std::floor(length + 0.5)) + 1;
    const MetricMeasureSpace space = line_grid(count);
    const WitnessFamily fam = detail::build_witnesses(space, s, mode);
    const SeparationCheck chk = verify_separation(space, fam);

    const AveragingOperator op = assemble(space, s);
    std::vector<FunctionVec> images;
    images.reserve(fam.witnesses.size());
    for (const auto& f : fam.witnesses) images.push_back(op.apply(f));

    DichotomyRow row;
    row.length = length;
    row.num_centers = static_cast<int>(fam.centers.size());
    row.min_pairwise = chk.min_pairwise;
    row.c_bound = fam.c_bound;
    row.covering_epsilon = fam.c_bound / 2.0;
    row.covering = covering_number(space, images,
                                   mode == WitnessMode::l1 ? 1.0 : kInfinity,
                                   row.covering_epsilon);
    row.pass = chk.pass;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace avgop
