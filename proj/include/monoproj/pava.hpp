#pragma once

#include <span>
#include <vector>

namespace monoproj {

/// A function sampled on a strictly increasing grid, with a positive mass per
/// point. Weights default to one.
class GridFunction {
 public:
  GridFunction() = default;

  /// Validates and takes ownership. Empty `weights` means unit weights.
  /// Throws ValidationError on empty input, non-finite values, non-positive
  /// weights, or points that are not strictly increasing.
  GridFunction(std::vector<double> points, std::vector<double> values,
               std::vector<double> weights = {});

  const std::vector<double>& points() const noexcept { return points_; }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return values_.size(); }

  /// Same grid and weights, new values.
  GridFunction with_values(std::vector<double> values) const;

  double weighted_mean() const;

 private:
  std::vector<double> points_;
  std::vector<double> values_;
  std::vector<double> weights_;
};

/// A GridFunction whose values are non-decreasing. Only produced by the
/// projections below.
class MonotoneGridFunction : public GridFunction {
 private:
  explicit MonotoneGridFunction(GridFunction f) : GridFunction(std::move(f)) {}

  friend MonotoneGridFunction pava_project(const GridFunction& f);
  friend MonotoneGridFunction minmax_oracle(const GridFunction& f);
};

/// Weighted least-squares projection onto non-decreasing sequences, in place.
/// Left-to-right block merging; pools only on strict violations.
/// `weights` may be empty (unit weights). No validation.
void pava_inplace(std::span<double> values, std::span<const double> weights = {});

/// Exact weighted isotonic projection of `f`. Points and weights are kept.
MonotoneGridFunction pava_project(const GridFunction& f);

/// Reference solution by direct min-max evaluation, O(n^3):
/// out[i] = min_{j>=i} max_{k<=i} (weighted mean of values[k..j]).
MonotoneGridFunction minmax_oracle(const GridFunction& f);

/// max_i |f_i - g_i|. Grids must match.
double sup_distance(const GridFunction& f, const GridFunction& g);

/// (sum_i w_i (f_i - g_i)^2)^{1/2} with the weights normalized to sum to one.
/// Grids and weights must match.
double weighted_l2_distance(const GridFunction& f, const GridFunction& g);

}  // namespace monoproj
