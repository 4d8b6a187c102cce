#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "monoproj/inference.hpp"
#include "monoproj/mcmc.hpp"
#include "monoproj/simgen.hpp"

namespace monoproj {

enum class Model { gaussian, probit };

struct FitRequest {
  Eigen::MatrixXd x;             ///< design, rows in lattice order
  Eigen::VectorXd y;             ///< responses, or success counts for probit
  Eigen::VectorXi trials;        ///< probit only; empty means one trial each
  std::vector<double> weights;   ///< projection masses per design point (1D)
  Model model = Model::gaussian;
  McmcConfig mcmc;
  double level = 0.99;
  double tol_mono = 1e-8;
  std::size_t max_iter = 1000;
  std::size_t jobs = 1;
  /// Posterior predictive on this many equidistant points (1D only); 0 keeps
  /// the design points.
  std::size_t display_grid = 0;
  /// True mean on the response scale at the design points, if known.
  std::optional<Eigen::VectorXd> truth;
};

struct ProjectionStats {
  std::size_t draws = 0;
  std::size_t max_iterations = 0;
  double mean_iterations = 0.0;
  std::size_t non_converged = 0;
  double max_violation = 0.0;
};

struct FitResult {
  Eigen::MatrixXd grid;          ///< where the summary lives (design or display grid)
  FitSummary summary;            ///< from projected draws
  Eigen::VectorXd raw_mean;      ///< mean of unprojected response-scale draws
  ProjectionStats projection;
  FitDiagnostics diagnostics;    ///< on the design points
  ChainDiagnostics chain;
  PosteriorDraws draws;
};

/// MCMC, link transform, projection of every draw, summary and diagnostics.
FitResult run_fit(const FitRequest& request);

struct CurveBenchmarkRequest {
  std::vector<CurveTruth> truths = all_curve_truths();
  std::size_t replicates = 50;
  std::size_t n = 100;
  double sigma = 1.0;
  std::uint64_t seed = 1;
  McmcConfig mcmc = McmcConfig::curves();
  std::size_t jobs = 1;
};

struct CurveBenchmarkRow {
  std::string truth;
  std::string method;  ///< "gp" or "gp_projection"
  double rmse = 0.0;   ///< mean over successful replicates
  double se = 0.0;     ///< Monte Carlo standard error of that mean
  std::size_t replicates = 0;
  std::size_t failed = 0;
};

/// Per-replicate seeds: data = derive_seed(root, 2 k), chain = derive_seed(root, 2 k + 1)
/// with k = truth_index * 1,000,003 + replicate.
std::vector<CurveBenchmarkRow> run_curve_benchmark(const CurveBenchmarkRequest& request);

struct SurfaceBenchmarkRequest {
  std::vector<SurfaceTruth> truths = all_surface_truths();
  std::vector<double> sigmas{0.5, 0.1};
  std::size_t m1 = 32;
  std::size_t m2 = 32;
  std::size_t replicates = 1;
  std::uint64_t seed = 1;
  McmcConfig mcmc = McmcConfig::surfaces();
  std::size_t jobs = 1;
};

struct SurfaceBenchmarkRow {
  std::string truth;
  double sigma = 0.0;
  double sigma_bar = 0.0;
  double sd_resid = 0.0;
  double cor_resid = 0.0;
  double cor_pred = 0.0;
  double mse = 0.0;
  std::size_t non_converged = 0;
  std::size_t replicates = 0;
  std::size_t failed = 0;
};

/// Fit statistics per surface and noise level, averaged over replicates.
std::vector<SurfaceBenchmarkRow> run_surface_benchmark(const SurfaceBenchmarkRequest& request);

std::uint64_t replicate_seed(std::uint64_t root, std::size_t truth_index, std::size_t replicate,
                             bool chain);

}  // namespace monoproj
