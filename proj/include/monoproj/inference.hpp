#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "monoproj/gp.hpp"
#include "monoproj/pava.hpp"
#include "monoproj/proj2d.hpp"

namespace monoproj {

enum class Link { identity, probit };

/// Response-scale draws: Phi applied elementwise for the probit link.
std::vector<Eigen::VectorXd> link_transform(std::vector<Eigen::VectorXd> draws, Link link);

/// Each curve draw projected by weighted PAVA on `points`. Empty weights are
/// uniform (the empirical design measure).
std::vector<MonotoneGridFunction> project_curve_draws(const std::vector<Eigen::VectorXd>& draws,
                                                      const std::vector<double>& points,
                                                      const std::vector<double>& weights = {},
                                                      std::size_t jobs = 1);

/// Each surface draw projected by the alternating residual scheme.
std::vector<Proj2dReport> project_surface_draws(const std::vector<SurfaceGrid>& draws,
                                                const Proj2dOptions& options, std::size_t jobs = 1);

struct ProjectionOptions {
  double tol_mono = 1e-8;
  std::size_t max_iter = 1000;
  std::vector<double> weights;  ///< per design point; empty = uniform
  std::size_t jobs = 1;
};

/// Projected draws on a lattice design, flattened in design order.
struct ProjectedDraws {
  std::vector<Eigen::VectorXd> values;
  std::vector<std::size_t> iterations;
  std::vector<double> max_violation;
  std::vector<bool> converged;

  std::size_t non_converged() const;
  std::size_t max_iterations() const;
};

/// Dispatches on the lattice dimension: PAVA in 1D, alternating residual
/// sweeps otherwise.
ProjectedDraws project_draws(const std::vector<Eigen::VectorXd>& draws, const Lattice& design,
                             const ProjectionOptions& options);

struct FitSummary {
  Eigen::VectorXd posterior_mean;
  Eigen::VectorXd band_lower;
  Eigen::VectorXd band_upper;
  double level = 0.99;
  double sigma_bar = 0.0;
};

/// Pointwise mean and equal-tailed empirical quantiles at (1 -+ level) / 2.
/// Needs at least 50 draws.
FitSummary summarize(const std::vector<Eigen::VectorXd>& draws,
                     const std::vector<double>& sigma_trace, double level);

/// Linear-interpolation sample quantile (type 7) of unsorted data.
double empirical_quantile(std::vector<double> data, double prob);

struct FitDiagnostics {
  double sigma_bar = 0.0;
  double sd_resid = 0.0;                ///< SD of y - F^(x)
  double cor_pred = 0.0;                ///< cor(y, F^(x))
  std::optional<double> cor_resid;      ///< cor(y - F0(x), y - F^(x))
  std::optional<double> mse;            ///< mean (F^ - F0)^2
};

FitDiagnostics fit_report(const Eigen::VectorXd& estimate, const Eigen::VectorXd& y,
                          double sigma_bar,
                          const std::optional<Eigen::VectorXd>& truth = std::nullopt);

double rmse(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth);

/// Pearson correlation; NaN when either side is constant.
double correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace monoproj
