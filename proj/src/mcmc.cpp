#include "monoproj/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>
#include <string>

#include "monoproj/error.hpp"

namespace monoproj {

double GammaPrior::log_density(double x) const {
  if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
  return (shape - 1.0) * std::log(x) - rate * x;
}

McmcConfig McmcConfig::curves() {
  McmcConfig c;
  c.n_iter = 5000;
  c.burn_in = 1000;
  return c;
}

McmcConfig McmcConfig::surfaces() {
  McmcConfig c;
  c.n_iter = 3000;
  c.burn_in = 500;
  return c;
}

void McmcConfig::validate() const {
  if (burn_in >= n_iter) throw ValidationError("mcmc: burn_in must be smaller than n_iter");
  for (const GammaPrior* p : {&beta_prior, &gamma_prior, &precision_prior})
    if (!(p->shape > 0.0) || !(p->rate > 0.0))
      throw ValidationError("mcmc: prior shape and rate must be > 0");
  for (double s : {beta_step, gamma_step, sigma_step})
    if (!(s >= 0.0) || !std::isfinite(s)) throw ValidationError("mcmc: step sizes must be >= 0");
  for (const auto& v : {init_beta, init_gamma, init_sigma})
    if (v && !(*v > 0.0)) throw ValidationError("mcmc: initial values must be > 0");
}

KernelParams PosteriorDraws::unit_params_at(std::size_t draw) const {
  KernelParams p;
  p.beta = beta_trace.at(draw);
  for (const auto& g : gamma_traces) p.gammas.push_back(g.at(draw));
  return p;
}

KernelParams PosteriorDraws::params_at(std::size_t draw) const {
  KernelParams p = unit_params_at(draw);
  for (std::size_t k = 0; k < p.gammas.size(); ++k) {
    const double range = domain.upper()(static_cast<Eigen::Index>(k)) -
                         domain.lower()(static_cast<Eigen::Index>(k));
    if (range > 0.0) p.gammas[k] /= range * range;
  }
  return p;
}

double truncated_normal(double mean, bool positive, Rng& rng) {
  // e ~ N(0, 1) conditioned on e >= a
  auto tail = [&rng](double a) {
    if (a <= 0.45) {
      for (;;) {
        const double e = standard_normal(rng);
        if (e >= a) return e;
      }
    }
    const double alpha = 0.5 * (a + std::sqrt(a * a + 4.0));
    for (;;) {
      const double x = a - std::log(1.0 - uniform01(rng)) / alpha;
      const double d = x - alpha;
      if (uniform01(rng) <= std::exp(-0.5 * d * d)) return x;
    }
  };
  return positive ? mean + tail(-mean) : mean - tail(mean);
}

namespace {

/// One scalar random-walk block with Robbins-Monro style batch adaptation.
class RandomWalkBlock {
 public:
  RandomWalkBlock(std::string name, double step, bool adapt)
      : name_(std::move(name)), log_step_(step > 0.0 ? std::log(step) : 0.0),
        frozen_(!(step > 0.0)), adapt_(adapt) {}

  bool frozen() const noexcept { return frozen_; }
  double step() const noexcept { return frozen_ ? 0.0 : std::exp(log_step_); }
  const std::string& name() const noexcept { return name_; }

  void record(bool accepted, bool burning) {
    if (burning) {
      if (!adapt_) return;
      batch_accepts_ += accepted ? 1 : 0;
      if (++batch_count_ == kBatch) {
        ++batches_;
        const double delta = std::min(0.1, 1.0 / std::sqrt(static_cast<double>(batches_)));
        const double rate = static_cast<double>(batch_accepts_) / kBatch;
        log_step_ += rate > kTarget ? delta : -delta;
        batch_accepts_ = 0;
        batch_count_ = 0;
      }
      return;
    }
    ++kept_;
    kept_accepts_ += accepted ? 1 : 0;
  }

  double acceptance_rate() const {
    return kept_ == 0 ? 0.0 : static_cast<double>(kept_accepts_) / static_cast<double>(kept_);
  }

 private:
  static constexpr int kBatch = 50;
  static constexpr double kTarget = 0.44;

  std::string name_;
  double log_step_;
  bool frozen_;
  bool adapt_;
  int batch_accepts_ = 0;
  int batch_count_ = 0;
  long batches_ = 0;
  long kept_ = 0;
  long kept_accepts_ = 0;
};

/// Collapsed likelihood y ~ N(0, K(gammas) / beta + noise) with K cached for
/// the current gammas. Spectral when the noise is homoscedastic, dense
/// Cholesky otherwise; a zero-size model is the empty likelihood.
class CollapsedGp {
 public:
  CollapsedGp(Lattice lattice, std::vector<double> gammas, std::optional<Eigen::VectorXd> hetero)
      : lattice_(std::move(lattice)), gammas_(std::move(gammas)), hetero_(std::move(hetero)) {
    if (lattice_.dim() == 0) return;
    build(gammas_, spectral_, dense_);
  }

  bool empty() const noexcept { return lattice_.dim() == 0; }

  void set_data(Eigen::VectorXd y) {
    y_ = std::move(y);
    if (spectral_) rotated_ = spectral_->rotate(y_);
  }

  double log_lik(double beta, double noise_var) const {
    if (empty()) return 0.0;
    return evaluate(spectral_.get(), dense_, rotated_, beta, noise_var);
  }

  double propose_gammas(const std::vector<double>& gammas, double beta, double noise_var) {
    proposed_gammas_ = gammas;
    if (empty()) return 0.0;
    build(gammas, proposed_spectral_, proposed_dense_);
    if (proposed_spectral_) proposed_rotated_ = proposed_spectral_->rotate(y_);
    return evaluate(proposed_spectral_.get(), proposed_dense_, proposed_rotated_, beta, noise_var);
  }

  void accept_proposal() {
    gammas_ = proposed_gammas_;
    if (empty()) return;
    std::swap(spectral_, proposed_spectral_);
    std::swap(dense_, proposed_dense_);
    std::swap(rotated_, proposed_rotated_);
  }

  Eigen::VectorXd sample_latent(double beta, double noise_var, Rng& rng) const {
    if (spectral_) return spectral_->sample_latent(rotated_, beta, noise_var, rng);
    KernelParams p{beta, gammas_};
    return latent_conditional(y_, lattice_.points(), p, *hetero_).sample(rng);
  }

 private:
  void build(const std::vector<double>& gammas, std::unique_ptr<SpectralGram>& spectral,
             Eigen::MatrixXd& dense) const {
    if (!hetero_) {
      spectral = std::make_unique<SpectralGram>(lattice_, gammas);
    } else {
      dense = gram_matrix(lattice_.points(), KernelParams{1.0, gammas});
    }
  }

  double evaluate(const SpectralGram* spectral, const Eigen::MatrixXd& dense,
                  const Eigen::VectorXd& rotated, double beta, double noise_var) const {
    if (spectral) return spectral->log_marginal(rotated, beta, noise_var);
    return dense_log_marginal(y_, dense, beta, *hetero_);
  }

  Lattice lattice_;
  std::vector<double> gammas_;
  std::vector<double> proposed_gammas_;
  std::optional<Eigen::VectorXd> hetero_;
  Eigen::VectorXd y_;
  std::unique_ptr<SpectralGram> spectral_;
  std::unique_ptr<SpectralGram> proposed_spectral_;
  Eigen::MatrixXd dense_;
  Eigen::MatrixXd proposed_dense_;
  Eigen::VectorXd rotated_;
  Eigen::VectorXd proposed_rotated_;
};

struct HyperState {
  double log_beta = 0.0;
  std::vector<double> log_gammas;  // rates on unit coordinates
  double log_noise_var = 0.0;      // log sigma^2

  double beta() const { return std::exp(log_beta); }
  double noise_var() const { return std::exp(log_noise_var); }
  std::vector<double> unit_gammas() const {
    std::vector<double> g;
    for (double lg : log_gammas) g.push_back(std::exp(lg));
    return g;
  }
};

/// Hooks that distinguish the Gaussian, probit and empty-likelihood chains.
struct ChainHooks {
  bool sample_sigma = true;
  // Called at the top of every iteration with the current latent state.
  std::function<void(const Eigen::VectorXd& latent, Rng&)> refresh;
  bool draw_latent_every_iteration = false;
};

void check_finite(double v, const char* what, std::size_t iter) {
  if (std::isnan(v))
    throw NumericalError(std::string("mcmc: NaN ") + what + " at iteration " +
                         std::to_string(iter));
}

PosteriorDraws run_chain(CollapsedGp& model, HyperState state, std::size_t n_latent,
                         const McmcConfig& config, ChainHooks hooks) {
  const std::size_t p = state.log_gammas.size();
  Rng rng(config.seed);

  RandomWalkBlock beta_block("beta", config.beta_step, config.adapt);
  std::vector<RandomWalkBlock> gamma_blocks;
  for (std::size_t k = 0; k < p; ++k)
    gamma_blocks.emplace_back("gamma" + std::to_string(k + 1), config.gamma_step, config.adapt);
  RandomWalkBlock sigma_block("sigma", hooks.sample_sigma ? config.sigma_step : 0.0, config.adapt);

  // Log prior in the log-parameterization, Jacobian included.
  auto log_prior_beta = [&](double lb) { return config.beta_prior.log_density(std::exp(lb)) + lb; };
  auto log_prior_gamma = [&](double lg) { return config.gamma_prior.log_density(std::exp(lg)) + lg; };
  // u = log sigma^2, tau = exp(-u) ~ Gamma; |d log tau / du| = 1
  auto log_prior_noise = [&](double u) {
    return config.precision_prior.log_density(std::exp(-u)) - u;
  };

  PosteriorDraws out;
  out.seed = config.seed;
  out.gamma_traces.assign(p, {});
  const std::size_t kept = config.n_iter - config.burn_in;
  out.beta_trace.reserve(kept);
  out.sigma_trace.reserve(kept);
  out.latent.reserve(n_latent > 0 ? kept : 0);

  Eigen::VectorXd latent = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_latent));
  double loglik = model.log_lik(state.beta(), state.noise_var());
  check_finite(loglik, "initial log-likelihood", 0);

  for (std::size_t iter = 0; iter < config.n_iter; ++iter) {
    const bool burning = iter < config.burn_in;
    if (hooks.refresh) {
      hooks.refresh(latent, rng);
      loglik = model.log_lik(state.beta(), state.noise_var());
      check_finite(loglik, "log-likelihood after augmentation", iter);
    }

    if (!beta_block.frozen()) {
      const double prop = state.log_beta + beta_block.step() * standard_normal(rng);
      const double ll = model.log_lik(std::exp(prop), state.noise_var());
      check_finite(ll, "log-likelihood (beta)", iter);
      const double log_ratio = ll + log_prior_beta(prop) - loglik - log_prior_beta(state.log_beta);
      const bool accept = std::log(uniform01(rng)) < log_ratio;
      if (accept) {
        state.log_beta = prop;
        loglik = ll;
      }
      beta_block.record(accept, burning);
    }

    for (std::size_t k = 0; k < p; ++k) {
      if (gamma_blocks[k].frozen()) continue;
      const double prop = state.log_gammas[k] + gamma_blocks[k].step() * standard_normal(rng);
      HyperState trial = state;
      trial.log_gammas[k] = prop;
      const double ll = model.propose_gammas(trial.unit_gammas(), state.beta(), state.noise_var());
      check_finite(ll, "log-likelihood (gamma)", iter);
      const double log_ratio =
          ll + log_prior_gamma(prop) - loglik - log_prior_gamma(state.log_gammas[k]);
      const bool accept = std::log(uniform01(rng)) < log_ratio;
      if (accept) {
        model.accept_proposal();
        state.log_gammas[k] = prop;
        loglik = ll;
      }
      gamma_blocks[k].record(accept, burning);
    }

    if (!sigma_block.frozen()) {
      const double prop = state.log_noise_var + sigma_block.step() * standard_normal(rng);
      const double ll = model.log_lik(state.beta(), std::exp(prop));
      check_finite(ll, "log-likelihood (sigma)", iter);
      const double log_ratio =
          ll + log_prior_noise(prop) - loglik - log_prior_noise(state.log_noise_var);
      const bool accept = std::log(uniform01(rng)) < log_ratio;
      if (accept) {
        state.log_noise_var = prop;
        loglik = ll;
      }
      sigma_block.record(accept, burning);
    }

    if (n_latent > 0 && (!burning || hooks.draw_latent_every_iteration)) {
      latent = model.sample_latent(state.beta(), state.noise_var(), rng);
      if (!latent.allFinite())
        throw NumericalError("mcmc: non-finite latent draw at iteration " + std::to_string(iter));
    }

    if (!burning) {
      out.beta_trace.push_back(state.beta());
      for (std::size_t k = 0; k < p; ++k) out.gamma_traces[k].push_back(std::exp(state.log_gammas[k]));
      out.sigma_trace.push_back(std::sqrt(state.noise_var()));
      if (n_latent > 0) out.latent.push_back(latent);
    }
  }

  auto report = [&out](const RandomWalkBlock& b) {
    out.block_names.push_back(b.name());
    out.acceptance_rates.push_back(b.frozen() ? 0.0 : b.acceptance_rate());
    out.final_steps.push_back(b.step());
  };
  report(beta_block);
  for (const auto& b : gamma_blocks) report(b);
  if (hooks.sample_sigma) report(sigma_block);
  return out;
}

struct PreparedDesign {
  Lattice unit;
  DomainMap domain;
};

PreparedDesign prepare_design(const Eigen::MatrixXd& x) {
  if (x.rows() < 2) throw ValidationError("mcmc: need at least two design points");
  if (!x.allFinite()) throw ValidationError("mcmc: non-finite design point");
  PreparedDesign d;
  d.domain = DomainMap::fit(x);
  const Eigen::MatrixXd unit = d.domain.to_unit(x);
  auto lattice = Lattice::detect(unit);
  if (!lattice) {
    if (x.cols() == 1)
      throw ValidationError("mcmc: 1D design points must be distinct and sorted increasing");
    throw ValidationError("mcmc: design points must form a full lattice in row-major order");
  }
  d.unit = std::move(*lattice);
  return d;
}

HyperState initial_state(const McmcConfig& config, std::size_t dim, double beta0, double sigma0) {
  HyperState s;
  s.log_beta = std::log(config.init_beta.value_or(beta0));
  const double g0 = config.init_gamma.value_or(config.gamma_prior.shape / config.gamma_prior.rate);
  s.log_gammas.assign(dim, std::log(g0));
  const double sigma = config.init_sigma.value_or(sigma0);
  s.log_noise_var = 2.0 * std::log(sigma);
  return s;
}

}  // namespace

PosteriorDraws fit_gaussian(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                            const McmcConfig& config) {
  config.validate();
  if (y.size() != x.rows()) throw ValidationError("fit_gaussian: y and design differ in length");
  if (!y.allFinite()) throw ValidationError("fit_gaussian: non-finite response");
  PreparedDesign design = prepare_design(x);

  const double n = static_cast<double>(y.size());
  const double second_moment = y.squaredNorm() / n;
  const double mean = y.mean();
  const double var = std::max((y.array() - mean).square().sum() / (n - 1.0), 1e-12);
  const double beta0 = std::clamp(1.0 / std::max(second_moment, 1e-12), 1e-3, 1e3);
  const double sigma0 = std::max(0.5 * std::sqrt(var), 1e-3);

  HyperState state = initial_state(config, design.unit.dim(), beta0, sigma0);
  CollapsedGp model(design.unit, state.unit_gammas(), std::nullopt);
  model.set_data(y);

  PosteriorDraws out =
      run_chain(model, state, static_cast<std::size_t>(y.size()), config, ChainHooks{});
  out.unit_design = std::move(design.unit);
  out.domain = std::move(design.domain);
  return out;
}

PosteriorDraws fit_probit(const Eigen::VectorXi& successes, const Eigen::VectorXi& trials,
                          const Eigen::MatrixXd& x, const McmcConfig& config) {
  config.validate();
  if (successes.size() != x.rows() || trials.size() != x.rows())
    throw ValidationError("fit_probit: responses and design differ in length");
  for (Eigen::Index i = 0; i < trials.size(); ++i) {
    if (trials(i) < 1) throw ValidationError("fit_probit: trials must be >= 1");
    if (successes(i) < 0 || successes(i) > trials(i))
      throw ValidationError("fit_probit: successes must lie in [0, trials]");
  }
  PreparedDesign design = prepare_design(x);

  const bool equal_trials = (trials.array() == trials(0)).all();
  const Eigen::VectorXd inv_trials = trials.cast<double>().cwiseInverse();
  std::optional<Eigen::VectorXd> hetero;
  if (!equal_trials) hetero = inv_trials;
  // homoscedastic auxiliary-mean noise is 1 / trials; heteroscedastic ignores it
  const double noise_var = 1.0 / static_cast<double>(trials(0));

  McmcConfig cfg = config;
  cfg.init_sigma = std::sqrt(noise_var);
  HyperState state =
      initial_state(cfg, design.unit.dim(), 1.0, std::sqrt(noise_var));
  CollapsedGp model(design.unit, state.unit_gammas(), hetero);

  Eigen::VectorXd aux_mean(x.rows());
  ChainHooks hooks;
  hooks.sample_sigma = false;
  hooks.draw_latent_every_iteration = true;
  hooks.refresh = [&](const Eigen::VectorXd& latent, Rng& rng) {
    for (Eigen::Index i = 0; i < latent.size(); ++i) {
      double sum = 0.0;
      for (int r = 0; r < trials(i); ++r) sum += truncated_normal(latent(i), r < successes(i), rng);
      aux_mean(i) = sum / static_cast<double>(trials(i));
    }
    model.set_data(aux_mean);
  };
  model.set_data(Eigen::VectorXd::Zero(x.rows()));

  cfg.sigma_step = 0.0;
  PosteriorDraws out = run_chain(model, state, static_cast<std::size_t>(x.rows()), cfg, hooks);
  // the auxiliary-mean noise 1/trials is bookkeeping; the probit scale is 1
  std::fill(out.sigma_trace.begin(), out.sigma_trace.end(), 1.0);
  out.unit_design = std::move(design.unit);
  out.domain = std::move(design.domain);
  return out;
}

PosteriorDraws sample_hyperprior(std::size_t dim, const McmcConfig& config) {
  config.validate();
  if (dim < 1) throw ValidationError("sample_hyperprior: dim must be >= 1");
  const double beta0 = config.beta_prior.shape / config.beta_prior.rate;
  const double tau0 = config.precision_prior.shape / config.precision_prior.rate;
  HyperState state = initial_state(config, dim, beta0, 1.0 / std::sqrt(tau0));
  CollapsedGp model(Lattice{}, state.unit_gammas(), std::nullopt);
  return run_chain(model, state, 0, config, ChainHooks{});
}

// ---------------------------------------------------------------------------

double effective_sample_size(std::span<const double> trace) {
  const std::size_t n = trace.size();
  if (n < 4) return 0.0;
  const double mean = std::accumulate(trace.begin(), trace.end(), 0.0) / static_cast<double>(n);
  auto autocov = [&](std::size_t lag) {
    double acc = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) acc += (trace[i] - mean) * (trace[i + lag] - mean);
    return acc / static_cast<double>(n);
  };
  const double c0 = autocov(0);
  if (!(c0 > 0.0)) return 0.0;

  // Geyer: sum adjacent-pair autocorrelations while positive, forced monotone.
  double tau = -1.0;
  double prev_pair = std::numeric_limits<double>::infinity();
  for (std::size_t lag = 0; lag + 1 < n; lag += 2) {
    double pair = (autocov(lag) + autocov(lag + 1)) / c0;
    if (pair <= 0.0) break;
    pair = std::min(pair, prev_pair);
    prev_pair = pair;
    tau += 2.0 * pair;
  }
  tau = std::max(tau, 1.0 / std::log10(static_cast<double>(n)));
  return static_cast<double>(n) / tau;
}

double split_rhat(std::span<const double> trace) {
  const std::size_t h = trace.size() / 2;
  if (h < 2) return std::numeric_limits<double>::quiet_NaN();
  auto moments = [](std::span<const double> s) {
    const double m = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
    double v = 0.0;
    for (double x : s) v += (x - m) * (x - m);
    return std::pair{m, v / static_cast<double>(s.size() - 1)};
  };
  const auto [m1, v1] = moments(trace.subspan(0, h));
  const auto [m2, v2] = moments(trace.subspan(trace.size() - h, h));
  const double w = 0.5 * (v1 + v2);
  if (!(w > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  const double grand = 0.5 * (m1 + m2);
  const double b = static_cast<double>(h) * ((m1 - grand) * (m1 - grand) + (m2 - grand) * (m2 - grand));
  const double hd = static_cast<double>(h);
  const double var_plus = (hd - 1.0) / hd * w + b / hd;
  return std::sqrt(var_plus / w);
}

ChainDiagnostics chain_diagnostics(const PosteriorDraws& draws) {
  if (draws.retained() < 100)
    throw ValidationError("chain_diagnostics: need at least 100 retained draws, got " +
                          std::to_string(draws.retained()));
  ChainDiagnostics out;
  auto add = [&out](std::string name, const std::vector<double>& trace) {
    TraceDiagnostics d;
    d.name = std::move(name);
    const auto [lo, hi] = std::minmax_element(trace.begin(), trace.end());
    d.degenerate = *lo == *hi;
    if (!d.degenerate) {
      d.ess = effective_sample_size(trace);
      d.split_rhat = split_rhat(trace);
    }
    out.traces.push_back(std::move(d));
  };
  add("beta", draws.beta_trace);
  for (std::size_t k = 0; k < draws.gamma_traces.size(); ++k)
    add("gamma" + std::to_string(k + 1), draws.gamma_traces[k]);
  add("sigma", draws.sigma_trace);
  out.block_names = draws.block_names;
  out.acceptance_rates = draws.acceptance_rates;
  return out;
}

}  // namespace monoproj
