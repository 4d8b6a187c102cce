#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

#include "monoproj/rng.hpp"

namespace monoproj {

/// Squared-exponential kernel beta^{-1} exp(-sum_k gamma_k (x_k - x'_k)^2).
struct KernelParams {
  double beta = 1.0;            ///< inverse amplitude
  std::vector<double> gammas;   ///< one rate per input dimension

  double amplitude() const noexcept { return 1.0 / beta; }
  /// Throws ValidationError unless beta > 0, gammas > 0 and gammas.size() == dim.
  void validate(std::size_t dim) const;
};

double se_kernel(std::span<const double> x1, std::span<const double> x2, const KernelParams& params);

/// K[i][j] = k(p_i, p_j) + nugget * 1{i == j}. Points are the rows of `points`.
Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& points, const KernelParams& params,
                            double nugget = 0.0);

/// K[i][j] = k(a_i, b_j).
Eigen::MatrixXd cross_gram(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                           const KernelParams& params);

/// Cholesky factor of K + nugget * I with the smallest nugget in
/// {0, 1e-8, 1e-7, ..., 1e-4} * scale that factorizes.
struct JitteredCholesky {
  Eigen::MatrixXd lower;
  double nugget = 0.0;
};

/// Throws NumericalError if even the largest nugget fails.
JitteredCholesky jittered_cholesky(const Eigen::MatrixXd& k, double scale);

/// A multivariate normal with its covariance factor kept for sampling.
class GaussianState {
 public:
  GaussianState(Eigen::VectorXd mean, Eigen::MatrixXd covariance);

  const Eigen::VectorXd& mean() const noexcept { return mean_; }
  const Eigen::MatrixXd& covariance() const noexcept { return cov_; }
  double nugget() const noexcept { return factor_.nugget; }

  Eigen::VectorXd sample(Rng& rng) const;

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
  JitteredCholesky factor_;
};

/// Conditional of w(X) given y = w(X) + N(0, sigma^2 I), w ~ GP(0, k).
GaussianState latent_conditional(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                                 const KernelParams& params, double sigma);

/// Same with per-observation noise variances.
GaussianState latent_conditional(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                                 const KernelParams& params, const Eigen::VectorXd& noise_var);

/// Joint draws of w(grid) given each latent draw of w(X). One output per input draw.
std::vector<Eigen::VectorXd> predict_grid(const std::vector<Eigen::VectorXd>& latent,
                                          const Eigen::MatrixXd& x, const Eigen::MatrixXd& grid,
                                          const KernelParams& params, Rng& rng);

/// Affine map of each coordinate onto [0, 1]. A constant coordinate maps to 0.5.
class DomainMap {
 public:
  DomainMap() = default;
  static DomainMap fit(const Eigen::MatrixXd& points);

  Eigen::MatrixXd to_unit(const Eigen::MatrixXd& points) const;
  Eigen::MatrixXd from_unit(const Eigen::MatrixXd& unit) const;
  double to_unit(double x, Eigen::Index dim) const;
  const Eigen::VectorXd& lower() const noexcept { return lower_; }
  const Eigen::VectorXd& upper() const noexcept { return upper_; }

 private:
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
};

/// Cartesian product of strictly increasing axes, flattened row-major (last
/// axis fastest). A 1D design is a one-axis lattice.
class Lattice {
 public:
  Lattice() = default;
  explicit Lattice(std::vector<std::vector<double>> axes);

  /// Recognizes `points` as a row-major lattice; nullopt otherwise.
  static std::optional<Lattice> detect(const Eigen::MatrixXd& points);

  std::size_t dim() const noexcept { return axes_.size(); }
  std::size_t size() const noexcept;
  const std::vector<std::vector<double>>& axes() const noexcept { return axes_; }
  std::vector<std::size_t> shape() const;
  Eigen::MatrixXd points() const;

 private:
  std::vector<std::vector<double>> axes_;
};

/// Eigendecomposition of the unit-amplitude correlation Gram on a lattice,
/// K = Q diag(lambda) Q^T with Q the Kronecker product of per-axis
/// eigenvectors. Makes the marginal likelihood O(n) in beta and the noise
/// variance, and latent draws exact without any nugget.
class SpectralGram {
 public:
  SpectralGram(const Lattice& lattice, std::span<const double> gammas);

  std::size_t size() const noexcept { return static_cast<std::size_t>(eigenvalues_.size()); }
  /// Eigenvalues of the correlation Gram (clamped at 0), in rotated order.
  const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }

  Eigen::VectorXd rotate(const Eigen::VectorXd& y) const;    ///< Q^T y
  Eigen::VectorXd unrotate(const Eigen::VectorXd& c) const;  ///< Q c

  /// log N(y | 0, K / beta + noise_var I), given rotated = Q^T y.
  double log_marginal(const Eigen::VectorXd& rotated, double beta, double noise_var) const;

  /// Exact draw of w | y under w ~ N(0, K / beta), y = w + N(0, noise_var I).
  Eigen::VectorXd sample_latent(const Eigen::VectorXd& rotated, double beta, double noise_var,
                                Rng& rng) const;

  /// Posterior mean of w | y.
  Eigen::VectorXd latent_mean(const Eigen::VectorXd& rotated, double beta, double noise_var) const;

 private:
  Eigen::VectorXd apply(const Eigen::VectorXd& v, bool transpose) const;

  std::vector<std::size_t> shape_;
  std::vector<Eigen::MatrixXd> vectors_;
  Eigen::VectorXd eigenvalues_;
};

/// Log density of N(y | 0, K / beta + diag(noise_var)) by Cholesky; the
/// general path used when observation noise differs across points.
double dense_log_marginal(const Eigen::VectorXd& y, const Eigen::MatrixXd& correlation,
                          double beta, const Eigen::VectorXd& noise_var);

}  // namespace monoproj
