#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace avgop {

/// Raised when an input document or constructor argument violates the space
/// schema. `field()` names the offending field, e.g. "weights[3]".
class ValidationError : public std::runtime_error {
public:
  ValidationError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

/// Sorted set of point indices together with the cached sum of their weights.
struct IndexSet {
  std::vector<int> members;  // strictly increasing
  double mass = 0.0;

  bool empty() const noexcept { return members.empty(); }
  int size() const noexcept { return static_cast<int>(members.size()); }
  bool contains(int i) const {
    return std::binary_search(members.begin(), members.end(), i);
  }
};

/// Finite weighted point set with a metric given either by Euclidean
/// coordinates or by an explicit symmetric distance matrix.
///
/// Every weight is strictly positive, so every closed ball has positive
/// measure. Instances are immutable after construction; all queries are pure
/// and safe to call concurrently.
class MetricMeasureSpace {
public:
  /// Euclidean form. `points` is n x dim, row per point.
  static MetricMeasureSpace from_points(const std::vector<std::vector<double>>& points,
                                        std::vector<double> weights = {}) {
    if (points.empty())
      throw ValidationError("points", "at least one point required");
    const int n = static_cast<int>(points.size());
    const int dim = static_cast<int>(points[0].size());
    if (dim < 1) throw ValidationError("points[0]", "point dimension must be >= 1");
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(n) * dim);
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(points[i].size()) != dim)
        throw ValidationError("points[" + std::to_string(i) + "]",
                              "dimension mismatch: expected " + std::to_string(dim) +
                                  " coordinates, got " + std::to_string(points[i].size()));
      for (double c : points[i]) {
        if (!std::isfinite(c))
          throw ValidationError("points[" + std::to_string(i) + "]", "nonfinite coordinate");
        flat.push_back(c);
      }
    }
    MetricMeasureSpace s;
    s.n_ = n;
    s.dim_ = dim;
    s.matrix_form_ = false;
    s.coords_ = std::move(flat);
    s.set_weights(std::move(weights));
    return s;
  }

  /// Matrix form. `matrix` is n x n, symmetric, nonnegative, zero diagonal.
  /// The triangle inequality is not checked here (see `triangle_violation`).
  static MetricMeasureSpace from_matrix(const std::vector<std::vector<double>>& matrix,
                                        std::vector<double> weights = {}) {
    if (matrix.empty())
      throw ValidationError("distance_matrix", "at least one point required");
    const int n = static_cast<int>(matrix.size());
    std::vector<double> flat(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(matrix[i].size()) != n)
        throw ValidationError("distance_matrix[" + std::to_string(i) + "]",
                              "row length " + std::to_string(matrix[i].size()) +
                                  " does not match point count " + std::to_string(n));
      for (int j = 0; j < n; ++j) {
        const double d = matrix[i][j];
        if (!std::isfinite(d) || d < 0.0)
          throw ValidationError(entry_path(i, j), "negative or nonfinite distance");
        flat[static_cast<std::size_t>(i) * n + j] = d;
      }
    }
    constexpr double tol = 1e-12;
    for (int i = 0; i < n; ++i) {
      if (std::abs(flat[static_cast<std::size_t>(i) * n + i]) > tol)
        throw ValidationError(entry_path(i, i), "diagonal entry must be zero");
      for (int j = i + 1; j < n; ++j) {
        const double a = flat[static_cast<std::size_t>(i) * n + j];
        const double b = flat[static_cast<std::size_t>(j) * n + i];
        if (std::abs(a - b) > tol)
          throw ValidationError(entry_path(i, j),
                                "asymmetric: entry differs from transpose by more than 1e-12");
      }
    }
    MetricMeasureSpace s;
    s.n_ = n;
    s.dim_ = 0;
    s.matrix_form_ = true;
    s.matrix_ = std::move(flat);
    s.set_weights(std::move(weights));
    return s;
  }

  int size() const noexcept { return n_; }
  int dim() const noexcept { return dim_; }
  bool uses_matrix() const noexcept { return matrix_form_; }
  double weight(int i) const { return weights_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  double total_mass() const noexcept { return total_mass_; }

  double coordinate(int i, int k) const {
    return coords_[static_cast<std::size_t>(i) * dim_ + k];
  }

  double distance(int i, int j) const {
    check_index(i);
    check_index(j);
    if (matrix_form_) return matrix_[static_cast<std::size_t>(i) * n_ + j];
    double sq = 0.0;
    const double* a = coords_.data() + static_cast<std::size_t>(i) * dim_;
    const double* b = coords_.data() + static_cast<std::size_t>(j) * dim_;
    for (int k = 0; k < dim_; ++k) {
      const double d = a[k] - b[k];
      sq += d * d;
    }
    return std::sqrt(sq);
  }

  void check_index(int i) const {
    if (i < 0 || i >= n_)
      throw std::out_of_range("point index " + std::to_string(i) + " out of range [0, " +
                              std::to_string(n_) + ")");
  }

private:
  MetricMeasureSpace() = default;

  static std::string entry_path(int i, int j) {
    return "distance_matrix[" + std::to_string(i) + "][" + std::to_string(j) + "]";
  }

  void set_weights(std::vector<double> weights) {
    if (weights.empty()) weights.assign(static_cast<std::size_t>(n_), 1.0);
    if (static_cast<int>(weights.size()) != n_)
      throw ValidationError("weights", "length " + std::to_string(weights.size()) +
                                           " does not match point count " + std::to_string(n_));
    double total = 0.0;
    for (int i = 0; i < n_; ++i) {
      const double w = weights[static_cast<std::size_t>(i)];
      if (!std::isfinite(w) || w <= 0.0)
        throw ValidationError("weights[" + std::to_string(i) + "]",
                              "nonpositive weight at index " + std::to_string(i));
      total += w;
    }
    weights_ = std::move(weights);
    total_mass_ = total;
  }

  int n_ = 0;
  int dim_ = 0;
  bool matrix_form_ = false;
  std::vector<double> coords_;
  std::vector<double> matrix_;
  std::vector<double> weights_;
  double total_mass_ = 0.0;
};

/// Points 0, spacing, 2*spacing, ... on a line, constant weight per atom.
inline MetricMeasureSpace line_grid(int count, double spacing = 1.0, double weight = 1.0) {
  if (count < 1) throw std::invalid_argument("line_grid: count must be >= 1");
  std::vector<std::vector<double>> pts(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) pts[static_cast<std::size_t>(i)] = {i * spacing};
  return MetricMeasureSpace::from_points(pts, std::vector<double>(static_cast<std::size_t>(count), weight));
}

/// Closed-ball membership tolerance: a point at distance d belongs to the
/// radius-r ball iff d <= r + 1e-12 * (1 + r). Keeps exact boundary points
/// (d == r after rounding) inside deterministically.
inline double ball_tolerance(double radius) { return 1e-12 * (1.0 + radius); }

inline bool in_ball(const MetricMeasureSpace& space, int center, int candidate, double radius) {
  return space.distance(center, candidate) <= radius + ball_tolerance(radius);
}

/// Builds an IndexSet from arbitrary member indices: sorts, removes
/// duplicates, accumulates the mass in ascending index order.
inline IndexSet make_index_set(const MetricMeasureSpace& space, std::vector<int> members) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  double mass = 0.0;
  for (int m : members) {
    space.check_index(m);
    mass += space.weight(m);
  }
  return IndexSet{std::move(members), mass};
}

inline IndexSet full_set(const MetricMeasureSpace& space) {
  std::vector<int> all(static_cast<std::size_t>(space.size()));
  for (int i = 0; i < space.size(); ++i) all[static_cast<std::size_t>(i)] = i;
  return IndexSet{std::move(all), space.total_mass()};
}

inline IndexSet complement(const MetricMeasureSpace& space, const IndexSet& set) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(space.size() - set.size()));
  double mass = 0.0;
  auto it = set.members.begin();
  for (int i = 0; i < space.size(); ++i) {
    if (it != set.members.end() && *it == i) {
      ++it;
      continue;
    }
    out.push_back(i);
    mass += space.weight(i);
  }
  return IndexSet{std::move(out), mass};
}

/// Closed ball B(center, radius) = { j : d(center, j) <= radius + tol }.
/// Always contains its center; mass is therefore positive.
inline IndexSet ball(const MetricMeasureSpace& space, int center, double radius) {
  space.check_index(center);
  if (radius < 0.0) throw std::invalid_argument("ball: radius must be nonnegative");
  const double cutoff = radius + ball_tolerance(radius);
  std::vector<int> members;
  double mass = 0.0;
  for (int j = 0; j < space.size(); ++j) {
    if (space.distance(center, j) <= cutoff) {
      members.push_back(j);
      mass += space.weight(j);
    }
  }
  return IndexSet{std::move(members), mass};
}

/// B(center, s + delta) \ B(center, s - delta) for 0 < delta < s. May be empty.
inline IndexSet annulus(const MetricMeasureSpace& space, int center, double s, double delta) {
  space.check_index(center);
  if (!(delta > 0.0) || !(delta < s))
    throw std::invalid_argument("annulus: requires 0 < delta < s");
  const double outer = (s + delta) + ball_tolerance(s + delta);
  const double inner = (s - delta) + ball_tolerance(s - delta);
  std::vector<int> members;
  double mass = 0.0;
  for (int j = 0; j < space.size(); ++j) {
    const double d = space.distance(center, j);
    if (d <= outer && d > inner) {
      members.push_back(j);
      mass += space.weight(j);
    }
  }
  return IndexSet{std::move(members), mass};
}

/// Symmetric difference B(x, s) Delta B(y, s).
inline IndexSet sym_diff(const MetricMeasureSpace& space, int x, int y, double s) {
  space.check_index(x);
  space.check_index(y);
  if (s < 0.0) throw std::invalid_argument("sym_diff: radius must be nonnegative");
  const double cutoff = s + ball_tolerance(s);
  std::vector<int> members;
  double mass = 0.0;
  for (int j = 0; j < space.size(); ++j) {
    const bool in_x = space.distance(x, j) <= cutoff;
    const bool in_y = space.distance(y, j) <= cutoff;
    if (in_x != in_y) {
      members.push_back(j);
      mass += space.weight(j);
    }
  }
  return IndexSet{std::move(members), mass};
}

/// Greedy cover of `subset` by balls of the given radius centered at subset
/// members: the first uncovered member in index order becomes the next
/// center. Deterministic; every member ends up within `radius` of a center.
inline std::vector<int> greedy_net(const MetricMeasureSpace& space, const IndexSet& subset,
                                   double radius) {
  if (subset.empty()) throw std::invalid_argument("greedy_net: subset must be nonempty");
  if (radius <= 0.0) throw std::invalid_argument("greedy_net: radius must be positive");
  const double cutoff = radius + ball_tolerance(radius);
  std::vector<int> centers;
  std::vector<bool> covered(subset.members.size(), false);
  for (std::size_t i = 0; i < subset.members.size(); ++i) {
    if (covered[i]) continue;
    const int c = subset.members[i];
    centers.push_back(c);
    for (std::size_t j = i; j < subset.members.size(); ++j) {
      if (!covered[j] && space.distance(c, subset.members[j]) <= cutoff) covered[j] = true;
    }
  }
  return centers;
}

/// Greedy packing: scan subset members in index order, keep those whose
/// distance to every kept center strictly exceeds `separation` (plain IEEE
/// comparison, no tolerance). Maximal under this scan order.
inline std::vector<int> greedy_packing(const MetricMeasureSpace& space, const IndexSet& subset,
                                       double separation) {
  if (subset.empty()) throw std::invalid_argument("greedy_packing: subset must be nonempty");
  if (separation < 0.0) throw std::invalid_argument("greedy_packing: separation must be >= 0");
  std::vector<int> centers;
  for (int m : subset.members) {
    bool far_enough = true;
    for (int c : centers) {
      if (!(space.distance(c, m) > separation)) {
        far_enough = false;
        break;
      }
    }
    if (far_enough) centers.push_back(m);
  }
  return centers;
}

inline double diameter(const MetricMeasureSpace& space) {
  double best = 0.0;
  for (int i = 0; i < space.size(); ++i)
    for (int j = i + 1; j < space.size(); ++j) best = std::max(best, space.distance(i, j));
  return best;
}

/// First triple (i, j, k) with d(i, k) > d(i, j) + d(j, k) beyond a small
/// absolute tolerance, or nullopt. O(n^3); used by the CLI's optional
/// triangle-inequality validation for matrix-form spaces.
inline std::optional<std::array<int, 3>> triangle_violation(const MetricMeasureSpace& space) {
  const int n = space.size();
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const double dik = space.distance(i, k);
      for (int j = 0; j < n; ++j) {
        if (dik > space.distance(i, j) + space.distance(j, k) + 1e-12 * (1.0 + dik))
          return std::array<int, 3>{i, j, k};
      }
    }
  return std::nullopt;
}

/// Precomputed per-center sorted distances. `query` returns the same
/// IndexSet as `ball` for every radius; it only trades memory for speed on
/// repeated multi-radius queries.
class BallIndex {
public:
  explicit BallIndex(const MetricMeasureSpace& space) : space_(&space) {
    const int n = space.size();
    order_.resize(static_cast<std::size_t>(n));
    dist_.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      auto& ord = order_[static_cast<std::size_t>(i)];
      auto& dst = dist_[static_cast<std::size_t>(i)];
      ord.resize(static_cast<std::size_t>(n));
      dst.resize(static_cast<std::size_t>(n));
      for (int j = 0; j < n; ++j) ord[static_cast<std::size_t>(j)] = j;
      std::sort(ord.begin(), ord.end(), [&](int a, int b) {
        const double da = space.distance(i, a), db = space.distance(i, b);
        return da < db || (da == db && a < b);
      });
      for (int j = 0; j < n; ++j) dst[static_cast<std::size_t>(j)] = space.distance(i, ord[static_cast<std::size_t>(j)]);
    }
  }

  IndexSet query(int center, double radius) const {
    space_->check_index(center);
    if (radius < 0.0) throw std::invalid_argument("BallIndex::query: radius must be nonnegative");
    const double cutoff = radius + ball_tolerance(radius);
    const auto& dst = dist_[static_cast<std::size_t>(center)];
    const auto& ord = order_[static_cast<std::size_t>(center)];
    const auto end = std::upper_bound(dst.begin(), dst.end(), cutoff);
    std::vector<int> members(ord.begin(), ord.begin() + (end - dst.begin()));
    std::sort(members.begin(), members.end());
    double mass = 0.0;
    for (int m : members) mass += space_->weight(m);
    return IndexSet{std::move(members), mass};
  }

private:
  const MetricMeasureSpace* space_;
  std::vector<std::vector<int>> order_;
  std::vector<std::vector<double>> dist_;
};

}  // namespace avgop
