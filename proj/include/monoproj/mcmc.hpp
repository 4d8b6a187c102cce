#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "monoproj/gp.hpp"

namespace monoproj {

/// Gamma(shape, rate) prior.
struct GammaPrior {
  double shape = 4.0;
  double rate = 1.0;

  /// Log density up to the normalizing constant.
  double log_density(double x) const;
};

struct McmcConfig {
  std::size_t n_iter = 5000;
  std::size_t burn_in = 1000;
  std::uint64_t seed = 1;

  GammaPrior beta_prior;
  /// Prior on the length-scale rates, covariates mapped to [0, 1].
  GammaPrior gamma_prior;
  GammaPrior precision_prior;  ///< prior on 1 / sigma^2

  /// Random-walk proposal sd on the log scale. A zero step freezes the block.
  double beta_step = 0.5;
  double gamma_step = 0.5;
  double sigma_step = 0.3;
  /// Batch adaptation of the steps toward 0.44 acceptance, burn-in only.
  bool adapt = true;

  /// Starting values. Unset means data-driven defaults.
  std::optional<double> init_beta;
  std::optional<double> init_gamma;
  std::optional<double> init_sigma;

  /// 5,000 iterations with 1,000 discarded.
  static McmcConfig curves();
  /// 3,000 iterations with 500 discarded.
  static McmcConfig surfaces();

  void validate() const;
};

struct PosteriorDraws {
  /// Post-burn-in latent draws at the design points (design order).
  std::vector<Eigen::VectorXd> latent;
  std::vector<double> beta_trace;
  /// One trace per input dimension; rates for covariates mapped to [0, 1].
  std::vector<std::vector<double>> gamma_traces;
  std::vector<double> sigma_trace;
  /// Metropolis blocks: "beta", "gamma1", ..., "sigma". Post-burn-in rates.
  std::vector<std::string> block_names;
  std::vector<double> acceptance_rates;
  std::vector<double> final_steps;
  std::uint64_t seed = 0;

  /// Design in unit coordinates and the map back to the data scale.
  Lattice unit_design;
  DomainMap domain;

  std::size_t retained() const noexcept { return beta_trace.size(); }
  /// Kernel for points in unit coordinates (the traces as stored).
  KernelParams unit_params_at(std::size_t draw) const;
  /// The same kernel for data-scale points (rates divided by range^2).
  KernelParams params_at(std::size_t draw) const;
};

/// Gaussian-response GP regression: Metropolis on (log beta, log gamma_k,
/// log sigma^2) against the marginal likelihood, then an exact draw of the
/// latent path. `x` rows are design points on the data scale; they must form
/// a row-major lattice (strictly increasing x in 1D).
PosteriorDraws fit_gaussian(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                            const McmcConfig& config);

/// Probit-link binomial GP regression via truncated-normal augmentation.
/// sigma is fixed at 1; sigma_trace is constant 1.
PosteriorDraws fit_probit(const Eigen::VectorXi& successes, const Eigen::VectorXi& trials,
                          const Eigen::MatrixXd& x, const McmcConfig& config);

/// The hyperparameter kernel run with an empty likelihood; its traces should
/// reproduce the priors.
PosteriorDraws sample_hyperprior(std::size_t dim, const McmcConfig& config);

/// Draw from N(mean, 1) truncated to (0, inf) when `positive`, else (-inf, 0).
double truncated_normal(double mean, bool positive, Rng& rng);

struct TraceDiagnostics {
  std::string name;
  double ess = 0.0;
  double split_rhat = 1.0;
  bool degenerate = false;  ///< constant trace; ess and rhat not meaningful
};

struct ChainDiagnostics {
  std::vector<TraceDiagnostics> traces;
  std::vector<std::string> block_names;
  std::vector<double> acceptance_rates;
};

/// Geyer initial-monotone-sequence ESS. Returns 0 for a constant trace.
double effective_sample_size(std::span<const double> trace);
/// Potential scale reduction comparing the two halves of the trace.
double split_rhat(std::span<const double> trace);

/// Throws ValidationError with fewer than 100 retained draws.
ChainDiagnostics chain_diagnostics(const PosteriorDraws& draws);

}  // namespace monoproj
