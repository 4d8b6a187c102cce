#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace monoproj {

/// Benchmark mean curves on (0, 10].
enum class CurveTruth { flat, sinusoidal, step, linear, exponential, logistic };

/// Bimonotone benchmark surfaces on [0, 1]^2:
///   additive        s + t
///   product         s t
///   smooth_step     1 / (1 + exp(-12 (s + t - 1)))
///   logistic_ridge  2 / (1 + exp(-10 (0.7 s + 0.3 t - 0.5)))
///   flat            1
///   exponential     exp(s + t - 1)
///   mixture         0.6 s^2 + 0.4 t + 0.3 s t
enum class SurfaceTruth { additive, product, smooth_step, logistic_ridge, flat, exponential, mixture };

std::vector<CurveTruth> all_curve_truths();
std::vector<SurfaceTruth> all_surface_truths();

std::string_view name_of(CurveTruth id);
std::string_view name_of(SurfaceTruth id);
std::optional<CurveTruth> parse_curve_truth(std::string_view name);
std::optional<SurfaceTruth> parse_surface_truth(std::string_view name);

/// Throws ValidationError for x outside (0, 10].
double curve_truth(CurveTruth id, double x);
/// Throws ValidationError for (s, t) outside [0, 1]^2.
double surface_truth(SurfaceTruth id, double s, double t);

enum class DesignKind { equidistant, uniform };
enum class NoiseKind { gaussian, binary };

std::optional<DesignKind> parse_design(std::string_view name);

struct SimDataset {
  Eigen::MatrixXd x;       ///< one row per observation
  Eigen::VectorXd y;       ///< responses (successes for binary data)
  Eigen::VectorXi trials;  ///< binary data only
  Eigen::VectorXd truth;   ///< F0 at each row of x
  std::string truth_id;
  double sigma = 0.0;
  NoiseKind noise = NoiseKind::gaussian;
  std::uint64_t seed = 0;
};

struct SimulateOptions {
  DesignKind design = DesignKind::equidistant;
  NoiseKind noise = NoiseKind::gaussian;
  double sigma = 1.0;
  std::uint64_t seed = 1;
  /// Binary data: y ~ Binomial(trials, Phi(F0(x) + offset)).
  int trials = 1;
  double offset = 0.0;
};

/// Equidistant design: x_i = 10 i / n, i = 1..n. Uniform design: sorted
/// U(0, 10] draws.
SimDataset simulate_curve(CurveTruth id, std::size_t n, const SimulateOptions& options);

/// m1 x m2 lattice in row-major order (t fastest). Equidistant axes are
/// i / (m - 1); uniform axes are sorted U[0, 1] draws.
SimDataset simulate_surface(SurfaceTruth id, std::size_t m1, std::size_t m2,
                            const SimulateOptions& options);

/// Standard normal CDF.
double normal_cdf(double x);

}  // namespace monoproj
