#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace monoproj {

/// Values on an s-axis x t-axis lattice. Row i is s_points[i], column j is
/// t_points[j].
class SurfaceGrid {
 public:
  SurfaceGrid() = default;

  /// Throws ValidationError unless both axes are strictly increasing, the
  /// matrix is s_points.size() x t_points.size(), and every value is finite.
  SurfaceGrid(std::vector<double> s_points, std::vector<double> t_points, Eigen::MatrixXd values);

  /// Unit-spaced axes 0..rows-1 and 0..cols-1.
  static SurfaceGrid from_matrix(Eigen::MatrixXd values);

  const std::vector<double>& s_points() const noexcept { return s_; }
  const std::vector<double>& t_points() const noexcept { return t_; }
  const Eigen::MatrixXd& values() const noexcept { return values_; }
  Eigen::Index rows() const noexcept { return values_.rows(); }
  Eigen::Index cols() const noexcept { return values_.cols(); }

  SurfaceGrid with_values(Eigen::MatrixXd values) const;

 private:
  std::vector<double> s_;
  std::vector<double> t_;
  Eigen::MatrixXd values_;
};

struct MonotonicityCheck {
  bool monotone = true;
  double max_violation = 0.0;
};

struct Proj2dOptions {
  double tol_mono = 1e-8;
  std::size_t max_iter = 1000;
  /// Per-cell masses for the line-wise projections. Empty means uniform.
  Eigen::MatrixXd weights;
  /// Record the (weighted) L2 norm of every iterate: ||w^_1||, ||w~_1||, ||w^_2||, ...
  bool record_norms = false;
};

struct Proj2dReport {
  SurfaceGrid result;
  std::size_t iterations = 0;
  double max_violation = 0.0;
  bool converged = false;
  /// First sweep with an iterate monotone within tol_mono (0 if none).
  std::size_t first_monotone_sweep = 0;
  std::vector<double> norm_trace;
};

/// Least-squares projection onto surfaces that are non-decreasing in both
/// s and t, by alternating line-wise PAVA with carried residuals:
///   w^_i = P_s(w + T_{i-1}),  S_i = w^_i - (w + T_{i-1})
///   w~_i = P_t(w + S_i),      T_i = w~_i - (w + S_i)
/// Stops once an iterate is monotone within tol_mono and differs from the
/// previous half-step iterate by at most tol_mono (sup norm), which makes it
/// a fixed point of the sweep to that tolerance. Otherwise returns the last
/// iterate with converged = false.
/// Throws ValidationError on bad options, NumericalError if an iterate turns
/// non-finite.
Proj2dReport project_surface(const SurfaceGrid& w, const Proj2dOptions& options);
Proj2dReport project_surface(const SurfaceGrid& w, double tol_mono = 1e-8,
                             std::size_t max_iter = 1000);

/// Brute-force isotonic regression over the product order by enumerating
/// lower and upper sets:
///   out(x) = min_{lower L containing x} max_{upper U containing x} Av(L n U).
/// Only for rows * cols <= 12. `weights` may be empty.
SurfaceGrid upper_set_oracle(const SurfaceGrid& w, const Eigen::MatrixXd& weights = {});

/// Largest (predecessor - successor)^+ over adjacent pairs along both axes.
MonotonicityCheck is_bimonotone(const SurfaceGrid& w, double tol);

// ---------------------------------------------------------------------------
// Lattices of any dimension (row-major, last axis fastest). The surface
// routines above are the two-axis case.

struct LatticeOptions {
  double tol_mono = 1e-8;
  std::size_t max_iter = 1000;
  std::span<const double> weights;  // empty: uniform
  bool record_norms = false;
};

struct LatticeProjection {
  std::vector<double> values;
  std::size_t iterations = 0;
  double max_violation = 0.0;
  bool converged = false;
  std::size_t first_monotone_sweep = 0;
  std::vector<double> norm_trace;
};

/// Cyclic residual sweep over the axes with one residual array per axis.
/// Converged when an iterate is monotone and the last p - 1 steps each moved
/// it by at most tol_mono.
LatticeProjection project_lattice(std::span<const double> values,
                                  std::span<const std::size_t> dims,
                                  const LatticeOptions& options);

/// Largest adjacent decrease along any axis.
double lattice_max_violation(std::span<const double> values, std::span<const std::size_t> dims);

}  // namespace monoproj
