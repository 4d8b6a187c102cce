#include "monoproj/gp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "monoproj/error.hpp"

namespace monoproj {

void KernelParams::validate(std::size_t dim) const {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ValidationError("kernel: beta must be > 0");
  if (gammas.size() != dim)
    throw ValidationError("kernel: expected " + std::to_string(dim) + " length-scale rates, got " +
                          std::to_string(gammas.size()));
  for (double g : gammas)
    if (!(g > 0.0) || !std::isfinite(g)) throw ValidationError("kernel: gammas must be > 0");
}

double se_kernel(std::span<const double> x1, std::span<const double> x2,
                 const KernelParams& params) {
  if (x1.size() != x2.size()) throw ValidationError("se_kernel: dimension mismatch");
  params.validate(x1.size());
  double r = 0.0;
  for (std::size_t k = 0; k < x1.size(); ++k) {
    const double d = x1[k] - x2[k];
    r += params.gammas[k] * d * d;
  }
  return std::exp(-r) / params.beta;
}

namespace {

double row_kernel(const Eigen::MatrixXd& a, Eigen::Index i, const Eigen::MatrixXd& b,
                  Eigen::Index j, const KernelParams& params) {
  double r = 0.0;
  for (Eigen::Index k = 0; k < a.cols(); ++k) {
    const double d = a(i, k) - b(j, k);
    r += params.gammas[static_cast<std::size_t>(k)] * d * d;
  }
  return std::exp(-r) / params.beta;
}

}  // namespace

Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& points, const KernelParams& params,
                            double nugget) {
  params.validate(static_cast<std::size_t>(points.cols()));
  if (!(nugget >= 0.0)) throw ValidationError("gram_matrix: nugget must be >= 0");
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = 1.0 / params.beta + nugget;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = row_kernel(points, i, points, j, params);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

Eigen::MatrixXd cross_gram(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                           const KernelParams& params) {
  params.validate(static_cast<std::size_t>(a.cols()));
  if (a.cols() != b.cols()) throw ValidationError("cross_gram: dimension mismatch");
  Eigen::MatrixXd k(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.rows(); ++j) k(i, j) = row_kernel(a, i, b, j, params);
  return k;
}

JitteredCholesky jittered_cholesky(const Eigen::MatrixXd& k, double scale) {
  const Eigen::Index n = k.rows();
  for (double rel = 1e-8; rel <= 1e-4 * 1.0000001; rel *= 10.0) {
    const double nugget = rel * scale;
    Eigen::MatrixXd a = k;
    a.diagonal().array() += nugget;
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() == Eigen::Success && llt.matrixL().toDenseMatrix().allFinite())
      return JitteredCholesky{llt.matrixL().toDenseMatrix(), nugget};
  }
  throw NumericalError("cholesky failed for a " + std::to_string(n) + "x" + std::to_string(n) +
                       " matrix even with nugget 1e-4 * " + std::to_string(scale));
}

namespace {

// K + noise is already bounded away from singular; the Gram nugget is only a
// fallback there.
JitteredCholesky noisy_cholesky(const Eigen::MatrixXd& a, double scale) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() == Eigen::Success && llt.matrixL().toDenseMatrix().allFinite())
    return JitteredCholesky{llt.matrixL().toDenseMatrix(), 0.0};
  return jittered_cholesky(a, scale);
}

}  // namespace

GaussianState::GaussianState(Eigen::VectorXd mean, Eigen::MatrixXd covariance)
    : mean_(std::move(mean)), cov_(std::move(covariance)) {
  if (cov_.rows() != cov_.cols() || cov_.rows() != mean_.size())
    throw ValidationError("gaussian state: shape mismatch");
  cov_ = 0.5 * (cov_ + cov_.transpose());
  const double scale = std::max(cov_.diagonal().cwiseAbs().maxCoeff(), 1e-300);
  factor_ = jittered_cholesky(cov_, scale);
}

Eigen::VectorXd GaussianState::sample(Rng& rng) const {
  Eigen::VectorXd z(mean_.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = standard_normal(rng);
  return mean_ + factor_.lower * z;
}

GaussianState latent_conditional(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                                 const KernelParams& params, const Eigen::VectorXd& noise_var) {
  if (y.size() != x.rows() || noise_var.size() != y.size())
    throw ValidationError("latent_conditional: observations and design differ in length");
  if ((noise_var.array() <= 0.0).any())
    throw ValidationError("latent_conditional: noise variance must be > 0");
  const Eigen::MatrixXd k = gram_matrix(x, params);
  Eigen::MatrixXd a = k;
  a.diagonal() += noise_var;
  const JitteredCholesky chol = noisy_cholesky(a, params.amplitude());
  const auto l = chol.lower.triangularView<Eigen::Lower>();
  const Eigen::MatrixXd v = l.solve(k);                       // L^{-1} K
  const Eigen::VectorXd u = l.solve(y);                       // L^{-1} y
  Eigen::VectorXd mean = v.transpose() * u;                   // K A^{-1} y
  Eigen::MatrixXd cov = k - v.transpose() * v;                // K - K A^{-1} K
  return GaussianState(std::move(mean), std::move(cov));
}

GaussianState latent_conditional(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                                 const KernelParams& params, double sigma) {
  if (!(sigma > 0.0)) throw ValidationError("latent_conditional: sigma must be > 0");
  return latent_conditional(y, x, params, Eigen::VectorXd::Constant(y.size(), sigma * sigma));
}

std::vector<Eigen::VectorXd> predict_grid(const std::vector<Eigen::VectorXd>& latent,
                                          const Eigen::MatrixXd& x, const Eigen::MatrixXd& grid,
                                          const KernelParams& params, Rng& rng) {
  if (grid.cols() != x.cols()) throw ValidationError("predict_grid: dimension mismatch");
  const JitteredCholesky chol = jittered_cholesky(gram_matrix(x, params), params.amplitude());
  const auto l = chol.lower.triangularView<Eigen::Lower>();
  const Eigen::MatrixXd a = l.solve(cross_gram(x, grid, params));  // L^{-1} K_XG
  Eigen::MatrixXd cov = gram_matrix(grid, params) - a.transpose() * a;
  cov = 0.5 * (cov + cov.transpose());
  const JitteredCholesky cond = jittered_cholesky(cov, params.amplitude());

  std::vector<Eigen::VectorXd> out;
  out.reserve(latent.size());
  Eigen::VectorXd z(grid.rows());
  for (const Eigen::VectorXd& w : latent) {
    if (w.size() != x.rows()) throw ValidationError("predict_grid: latent draw length mismatch");
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = standard_normal(rng);
    out.push_back(a.transpose() * l.solve(w) + cond.lower * z);
  }
  return out;
}

// ---------------------------------------------------------------------------

DomainMap DomainMap::fit(const Eigen::MatrixXd& points) {
  if (points.rows() == 0) throw ValidationError("domain map: no points");
  DomainMap map;
  map.lower_ = points.colwise().minCoeff().transpose();
  map.upper_ = points.colwise().maxCoeff().transpose();
  return map;
}

double DomainMap::to_unit(double x, Eigen::Index dim) const {
  const double span = upper_(dim) - lower_(dim);
  return span > 0.0 ? (x - lower_(dim)) / span : 0.5;
}

Eigen::MatrixXd DomainMap::to_unit(const Eigen::MatrixXd& points) const {
  Eigen::MatrixXd out(points.rows(), points.cols());
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    for (Eigen::Index k = 0; k < points.cols(); ++k) out(i, k) = to_unit(points(i, k), k);
  return out;
}

Eigen::MatrixXd DomainMap::from_unit(const Eigen::MatrixXd& unit) const {
  Eigen::MatrixXd out(unit.rows(), unit.cols());
  for (Eigen::Index i = 0; i < unit.rows(); ++i)
    for (Eigen::Index k = 0; k < unit.cols(); ++k) {
      const double span = upper_(k) - lower_(k);
      out(i, k) = span > 0.0 ? lower_(k) + unit(i, k) * span : lower_(k);
    }
  return out;
}

// ---------------------------------------------------------------------------

Lattice::Lattice(std::vector<std::vector<double>> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) throw ValidationError("lattice: no axes");
  for (const auto& axis : axes_) {
    if (axis.empty()) throw ValidationError("lattice: empty axis");
    for (std::size_t i = 1; i < axis.size(); ++i)
      if (!(axis[i - 1] < axis[i])) throw ValidationError("lattice: axis not strictly increasing");
  }
}

std::size_t Lattice::size() const noexcept {
  if (axes_.empty()) return 0;
  std::size_t n = 1;
  for (const auto& a : axes_) n *= a.size();
  return n;
}

std::vector<std::size_t> Lattice::shape() const {
  std::vector<std::size_t> s;
  for (const auto& a : axes_) s.push_back(a.size());
  return s;
}

Eigen::MatrixXd Lattice::points() const {
  const std::size_t n = size();
  const std::size_t p = dim();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  for (std::size_t idx = 0; idx < n; ++idx) {
    std::size_t rem = idx;
    for (std::size_t k = p; k-- > 0;) {
      const std::size_t m = axes_[k].size();
      out(static_cast<Eigen::Index>(idx), static_cast<Eigen::Index>(k)) = axes_[k][rem % m];
      rem /= m;
    }
  }
  return out;
}

std::optional<Lattice> Lattice::detect(const Eigen::MatrixXd& points) {
  if (points.rows() == 0 || points.cols() == 0) return std::nullopt;
  std::vector<std::vector<double>> axes;
  for (Eigen::Index k = 0; k < points.cols(); ++k) {
    std::vector<double> col(points.col(k).data(), points.col(k).data() + points.rows());
    std::sort(col.begin(), col.end());
    col.erase(std::unique(col.begin(), col.end()), col.end());
    axes.push_back(std::move(col));
  }
  Lattice lattice(std::move(axes));
  if (lattice.size() != static_cast<std::size_t>(points.rows())) return std::nullopt;
  if (lattice.points() != points) return std::nullopt;
  return lattice;
}

// ---------------------------------------------------------------------------

SpectralGram::SpectralGram(const Lattice& lattice, std::span<const double> gammas)
    : shape_(lattice.shape()) {
  if (gammas.size() != lattice.dim())
    throw ValidationError("spectral gram: one rate per lattice axis required");
  std::vector<Eigen::VectorXd> axis_values;
  for (std::size_t k = 0; k < lattice.dim(); ++k) {
    const auto& axis = lattice.axes()[k];
    const Eigen::Index m = static_cast<Eigen::Index>(axis.size());
    Eigen::MatrixXd c(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) {
        const double d = axis[static_cast<std::size_t>(i)] - axis[static_cast<std::size_t>(j)];
        c(i, j) = std::exp(-gammas[k] * d * d);
      }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c);
    if (eig.info() != Eigen::Success)
      throw NumericalError("spectral gram: eigendecomposition failed on axis " + std::to_string(k));
    vectors_.push_back(eig.eigenvectors());
    axis_values.push_back(eig.eigenvalues().cwiseMax(0.0));
  }

  const std::size_t n = lattice.size();
  eigenvalues_.resize(static_cast<Eigen::Index>(n));
  for (std::size_t idx = 0; idx < n; ++idx) {
    std::size_t rem = idx;
    double lambda = 1.0;
    for (std::size_t k = shape_.size(); k-- > 0;) {
      lambda *= axis_values[k](static_cast<Eigen::Index>(rem % shape_[k]));
      rem /= shape_[k];
    }
    eigenvalues_(static_cast<Eigen::Index>(idx)) = lambda;
  }
}

Eigen::VectorXd SpectralGram::apply(const Eigen::VectorXd& v, bool transpose) const {
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::VectorXd out = v;
  std::size_t stride = 1;
  for (std::size_t k = shape_.size(); k-- > 0;) {
    const std::size_t m = shape_[k];
    const std::size_t block = m * stride;
    for (std::size_t start = 0; start < size(); start += block) {
      Eigen::Map<RowMajor> b(out.data() + start, static_cast<Eigen::Index>(m),
                             static_cast<Eigen::Index>(stride));
      if (transpose)
        b = (vectors_[k].transpose() * b).eval();
      else
        b = (vectors_[k] * b).eval();
    }
    stride *= m;
  }
  return out;
}

Eigen::VectorXd SpectralGram::rotate(const Eigen::VectorXd& y) const {
  if (static_cast<std::size_t>(y.size()) != size())
    throw ValidationError("spectral gram: vector length mismatch");
  return apply(y, true);
}

Eigen::VectorXd SpectralGram::unrotate(const Eigen::VectorXd& c) const {
  if (static_cast<std::size_t>(c.size()) != size())
    throw ValidationError("spectral gram: vector length mismatch");
  return apply(c, false);
}

double SpectralGram::log_marginal(const Eigen::VectorXd& rotated, double beta,
                                  double noise_var) const {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < eigenvalues_.size(); ++i) {
    const double d = eigenvalues_(i) / beta + noise_var;
    acc += std::log(d) + rotated(i) * rotated(i) / d;
  }
  return -0.5 * (acc + static_cast<double>(eigenvalues_.size()) *
                           std::log(2.0 * std::numbers::pi));
}

Eigen::VectorXd SpectralGram::latent_mean(const Eigen::VectorXd& rotated, double beta,
                                          double noise_var) const {
  Eigen::VectorXd c(rotated.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const double prior = eigenvalues_(i) / beta;
    c(i) = prior / (prior + noise_var) * rotated(i);
  }
  return unrotate(c);
}

Eigen::VectorXd SpectralGram::sample_latent(const Eigen::VectorXd& rotated, double beta,
                                            double noise_var, Rng& rng) const {
  Eigen::VectorXd c(rotated.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const double prior = eigenvalues_(i) / beta;
    const double d = prior + noise_var;
    c(i) = prior / d * rotated(i) + std::sqrt(prior * noise_var / d) * standard_normal(rng);
  }
  return unrotate(c);
}

double dense_log_marginal(const Eigen::VectorXd& y, const Eigen::MatrixXd& correlation,
                          double beta, const Eigen::VectorXd& noise_var) {
  Eigen::MatrixXd a = correlation / beta;
  a.diagonal() += noise_var;
  const JitteredCholesky chol = noisy_cholesky(a, 1.0 / beta);
  const Eigen::VectorXd u = chol.lower.triangularView<Eigen::Lower>().solve(y);
  const double logdet = 2.0 * chol.lower.diagonal().array().log().sum();
  return -0.5 * (logdet + u.squaredNorm() +
                 static_cast<double>(y.size()) * std::log(2.0 * std::numbers::pi));
}

}  // namespace monoproj
