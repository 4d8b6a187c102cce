#include "monoproj/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "monoproj/error.hpp"
#include "monoproj/parallel.hpp"

namespace monoproj {

namespace {

Eigen::VectorXd mean_of(const std::vector<Eigen::VectorXd>& draws) {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(draws.front().size());
  for (const auto& d : draws) m += d;
  return m / static_cast<double>(draws.size());
}

ProjectionStats stats_of(const ProjectedDraws& p) {
  ProjectionStats s;
  s.draws = p.values.size();
  s.max_iterations = p.max_iterations();
  double total = 0.0;
  for (std::size_t it : p.iterations) total += static_cast<double>(it);
  s.mean_iterations = s.draws ? total / static_cast<double>(s.draws) : 0.0;
  s.non_converged = p.non_converged();
  for (double v : p.max_violation) s.max_violation = std::max(s.max_violation, v);
  return s;
}

Eigen::VectorXi integer_counts(const Eigen::VectorXd& v, const char* what) {
  Eigen::VectorXi out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v(i) != std::round(v(i)) || v(i) < 0.0)
      throw ValidationError(std::string("probit: ") + what + " must be non-negative integers (row " +
                            std::to_string(i + 1) + ")");
    out(i) = static_cast<int>(v(i));
  }
  return out;
}

double mean_and_se(const std::vector<double>& v, double& se) {
  const double n = static_cast<double>(v.size());
  double m = 0.0;
  for (double x : v) m += x;
  m /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  se = v.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  return m;
}

}  // namespace

std::uint64_t replicate_seed(std::uint64_t root, std::size_t truth_index, std::size_t replicate,
                             bool chain) {
  const std::uint64_t k = static_cast<std::uint64_t>(truth_index) * 1000003ULL + replicate;
  return derive_seed(root, 2 * k + (chain ? 1 : 0));
}

FitResult run_fit(const FitRequest& request) {
  if (!(request.level > 0.0 && request.level < 1.0))
    throw ValidationError("fit: level must lie in (0, 1)");
  const Link link = request.model == Model::probit ? Link::probit : Link::identity;

  FitResult result;
  Eigen::VectorXd response = request.y;
  if (request.model == Model::gaussian) {
    result.draws = fit_gaussian(request.y, request.x, request.mcmc);
  } else {
    const Eigen::VectorXi successes = integer_counts(request.y, "responses");
    const Eigen::VectorXi trials = request.trials.size() == 0
                                       ? Eigen::VectorXi::Ones(request.y.size())
                                       : request.trials;
    result.draws = fit_probit(successes, trials, request.x, request.mcmc);
    response = request.y.cwiseQuotient(trials.cast<double>());
  }
  const PosteriorDraws& draws = result.draws;
  if (draws.latent.size() < 50)
    throw ValidationError("fit: need at least 50 retained draws (iters - burnin)");

  ProjectionOptions po;
  po.tol_mono = request.tol_mono;
  po.max_iter = request.max_iter;
  po.weights = request.weights;
  po.jobs = request.jobs;

  // Design-point summary: always computed, feeds the diagnostics.
  const std::vector<Eigen::VectorXd> on_design = link_transform(draws.latent, link);
  const ProjectedDraws projected = project_draws(on_design, draws.unit_design, po);
  const FitSummary design_summary = summarize(projected.values, draws.sigma_trace, request.level);
  result.diagnostics =
      fit_report(design_summary.posterior_mean, response, design_summary.sigma_bar, request.truth);

  if (request.display_grid > 0) {
    if (draws.unit_design.dim() != 1)
      throw ValidationError("fit: a display grid is only supported for 1D designs");
    const std::size_t m = request.display_grid;
    if (m < 2) throw ValidationError("fit: display grid needs at least 2 points");
    Eigen::MatrixXd unit_grid(static_cast<Eigen::Index>(m), 1);
    for (std::size_t i = 0; i < m; ++i)
      unit_grid(static_cast<Eigen::Index>(i), 0) = static_cast<double>(i) / static_cast<double>(m - 1);
    const Eigen::MatrixXd unit_x = draws.unit_design.points();
    std::vector<Eigen::VectorXd> on_grid(draws.latent.size());
    parallel_for(draws.latent.size(), request.jobs, [&](std::size_t i) {
      Rng rng(derive_seed(request.mcmc.seed ^ 0x5eedULL, i));
      on_grid[i] =
          predict_grid({draws.latent[i]}, unit_x, unit_grid, draws.unit_params_at(i), rng).front();
    });
    on_grid = link_transform(std::move(on_grid), link);
    std::vector<double> axis(m);
    for (std::size_t i = 0; i < m; ++i) axis[i] = unit_grid(static_cast<Eigen::Index>(i), 0);
    ProjectionOptions grid_po = po;
    grid_po.weights.clear();
    const ProjectedDraws grid_projected = project_draws(on_grid, Lattice({axis}), grid_po);
    result.summary = summarize(grid_projected.values, draws.sigma_trace, request.level);
    result.raw_mean = mean_of(on_grid);
    result.projection = stats_of(grid_projected);
    result.grid = draws.domain.from_unit(unit_grid);
  } else {
    result.summary = design_summary;
    result.raw_mean = mean_of(on_design);
    result.projection = stats_of(projected);
    result.grid = request.x;
  }

  if (draws.retained() >= 100) result.chain = chain_diagnostics(draws);
  return result;
}

std::vector<CurveBenchmarkRow> run_curve_benchmark(const CurveBenchmarkRequest& request) {
  if (request.replicates < 1) throw ValidationError("benchmark: replicates must be >= 1");
  struct Outcome {
    bool ok = false;
    double raw = 0.0;
    double projected = 0.0;
  };
  const std::size_t tasks = request.truths.size() * request.replicates;
  std::vector<Outcome> outcomes(tasks);
  parallel_for(tasks, request.jobs, [&](std::size_t task) {
    const std::size_t ti = task / request.replicates;
    const std::size_t rep = task % request.replicates;
    const CurveTruth id = request.truths[ti];
    const auto truth_index = static_cast<std::size_t>(id);
    SimulateOptions so;
    so.sigma = request.sigma;
    so.seed = replicate_seed(request.seed, truth_index, rep, false);
    const SimDataset data = simulate_curve(id, request.n, so);

    FitRequest fr;
    fr.x = data.x;
    fr.y = data.y;
    fr.mcmc = request.mcmc;
    fr.mcmc.seed = replicate_seed(request.seed, truth_index, rep, true);
    try {
      const FitResult fit = run_fit(fr);
      outcomes[task].raw = rmse(fit.raw_mean, data.truth);
      outcomes[task].projected = rmse(fit.summary.posterior_mean, data.truth);
      outcomes[task].ok = true;
    } catch (const NumericalError&) {
      outcomes[task].ok = false;
    }
  });

  std::vector<CurveBenchmarkRow> rows;
  for (std::size_t ti = 0; ti < request.truths.size(); ++ti) {
    std::vector<double> raw;
    std::vector<double> proj;
    for (std::size_t rep = 0; rep < request.replicates; ++rep) {
      const Outcome& o = outcomes[ti * request.replicates + rep];
      if (!o.ok) continue;
      raw.push_back(o.raw);
      proj.push_back(o.projected);
    }
    const std::size_t failed = request.replicates - raw.size();
    const std::string name(name_of(request.truths[ti]));
    CurveBenchmarkRow gp{name, "gp", 0.0, 0.0, raw.size(), failed};
    CurveBenchmarkRow gpp{name, "gp_projection", 0.0, 0.0, proj.size(), failed};
    if (!raw.empty()) {
      gp.rmse = mean_and_se(raw, gp.se);
      gpp.rmse = mean_and_se(proj, gpp.se);
    } else {
      gp.rmse = gpp.rmse = std::numeric_limits<double>::quiet_NaN();
    }
    rows.push_back(gp);
    rows.push_back(gpp);
  }
  return rows;
}

std::vector<SurfaceBenchmarkRow> run_surface_benchmark(const SurfaceBenchmarkRequest& request) {
  if (request.replicates < 1) throw ValidationError("benchmark: replicates must be >= 1");
  struct Outcome {
    bool ok = false;
    FitDiagnostics diag;
    std::size_t non_converged = 0;
  };
  const std::size_t cells = request.truths.size() * request.sigmas.size();
  const std::size_t tasks = cells * request.replicates;
  std::vector<Outcome> outcomes(tasks);
  parallel_for(tasks, request.jobs, [&](std::size_t task) {
    const std::size_t cell = task / request.replicates;
    const std::size_t rep = task % request.replicates;
    const SurfaceTruth id = request.truths[cell / request.sigmas.size()];
    const std::size_t si = cell % request.sigmas.size();
    const std::size_t stream = static_cast<std::size_t>(id) * 97 + si;
    SimulateOptions so;
    so.sigma = request.sigmas[si];
    so.seed = replicate_seed(request.seed, stream, rep, false);
    const SimDataset data = simulate_surface(id, request.m1, request.m2, so);

    FitRequest fr;
    fr.x = data.x;
    fr.y = data.y;
    fr.mcmc = request.mcmc;
    fr.mcmc.seed = replicate_seed(request.seed, stream, rep, true);
    fr.truth = data.truth;
    try {
      const FitResult fit = run_fit(fr);
      outcomes[task].diag = fit.diagnostics;
      outcomes[task].non_converged = fit.projection.non_converged;
      outcomes[task].ok = true;
    } catch (const NumericalError&) {
      outcomes[task].ok = false;
    }
  });

  std::vector<SurfaceBenchmarkRow> rows;
  for (std::size_t cell = 0; cell < cells; ++cell) {
    SurfaceBenchmarkRow row;
    row.truth = std::string(name_of(request.truths[cell / request.sigmas.size()]));
    row.sigma = request.sigmas[cell % request.sigmas.size()];
    for (std::size_t rep = 0; rep < request.replicates; ++rep) {
      const Outcome& o = outcomes[cell * request.replicates + rep];
      if (!o.ok) {
        ++row.failed;
        continue;
      }
      ++row.replicates;
      row.sigma_bar += o.diag.sigma_bar;
      row.sd_resid += o.diag.sd_resid;
      row.cor_resid += o.diag.cor_resid.value_or(0.0);
      row.cor_pred += o.diag.cor_pred;
      row.mse += o.diag.mse.value_or(0.0);
      row.non_converged += o.non_converged;
    }
    if (row.replicates > 0) {
      const double r = static_cast<double>(row.replicates);
      row.sigma_bar /= r;
      row.sd_resid /= r;
      row.cor_resid /= r;
      row.cor_pred /= r;
      row.mse /= r;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace monoproj
