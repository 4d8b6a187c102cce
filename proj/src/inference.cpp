#include "monoproj/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "monoproj/error.hpp"
#include "monoproj/parallel.hpp"
#include "monoproj/simgen.hpp"

namespace monoproj {

std::vector<Eigen::VectorXd> link_transform(std::vector<Eigen::VectorXd> draws, Link link) {
  if (link == Link::identity) return draws;
  for (auto& d : draws) d = d.unaryExpr([](double v) { return normal_cdf(v); });
  return draws;
}

std::vector<MonotoneGridFunction> project_curve_draws(const std::vector<Eigen::VectorXd>& draws,
                                                      const std::vector<double>& points,
                                                      const std::vector<double>& weights,
                                                      std::size_t jobs) {
  std::vector<std::optional<MonotoneGridFunction>> slots(draws.size());
  parallel_for(draws.size(), jobs, [&](std::size_t i) {
    const auto& d = draws[i];
    slots[i] = pava_project(GridFunction(points, std::vector<double>(d.data(), d.data() + d.size()),
                                         weights));
  });
  std::vector<MonotoneGridFunction> out;
  out.reserve(draws.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

std::vector<Proj2dReport> project_surface_draws(const std::vector<SurfaceGrid>& draws,
                                                const Proj2dOptions& options, std::size_t jobs) {
  std::vector<Proj2dReport> out(draws.size());
  parallel_for(draws.size(), jobs,
               [&](std::size_t i) { out[i] = project_surface(draws[i], options); });
  return out;
}

std::size_t ProjectedDraws::non_converged() const {
  return static_cast<std::size_t>(std::count(converged.begin(), converged.end(), false));
}

std::size_t ProjectedDraws::max_iterations() const {
  return iterations.empty() ? 0 : *std::max_element(iterations.begin(), iterations.end());
}

ProjectedDraws project_draws(const std::vector<Eigen::VectorXd>& draws, const Lattice& design,
                             const ProjectionOptions& options) {
  if (draws.empty()) throw ValidationError("project_draws: no draws");
  const std::size_t n = design.size();
  if (!options.weights.empty() && options.weights.size() != n)
    throw ValidationError("project_draws: weights do not match the design");
  for (const auto& d : draws)
    if (static_cast<std::size_t>(d.size()) != n)
      throw ValidationError("project_draws: draw length does not match the design");

  ProjectedDraws out;
  out.values.resize(draws.size());
  out.iterations.assign(draws.size(), 0);
  out.max_violation.assign(draws.size(), 0.0);
  out.converged.assign(draws.size(), true);

  if (design.dim() == 1) {
    const auto& points = design.axes()[0];
    parallel_for(draws.size(), options.jobs, [&](std::size_t i) {
      const auto& d = draws[i];
      const MonotoneGridFunction f = pava_project(
          GridFunction(points, std::vector<double>(d.data(), d.data() + d.size()), options.weights));
      out.values[i] = Eigen::Map<const Eigen::VectorXd>(f.values().data(),
                                                        static_cast<Eigen::Index>(f.size()));
      out.iterations[i] = 1;
    });
    return out;
  }

  const std::vector<std::size_t> shape = design.shape();
  std::vector<LatticeProjection> results(draws.size());
  parallel_for(draws.size(), options.jobs, [&](std::size_t i) {
    LatticeOptions lo;
    lo.tol_mono = options.tol_mono;
    lo.max_iter = options.max_iter;
    lo.weights = options.weights;
    const auto& d = draws[i];
    results[i] = project_lattice(std::span<const double>(d.data(), static_cast<std::size_t>(d.size())),
                                 shape, lo);
  });
  for (std::size_t i = 0; i < draws.size(); ++i) {
    out.values[i] = Eigen::Map<const Eigen::VectorXd>(results[i].values.data(),
                                                      static_cast<Eigen::Index>(n));
    out.iterations[i] = results[i].iterations;
    out.max_violation[i] = results[i].max_violation;
    out.converged[i] = results[i].converged;
  }
  return out;
}

double empirical_quantile(std::vector<double> data, double prob) {
  if (data.empty()) throw ValidationError("quantile of empty data");
  std::sort(data.begin(), data.end());
  const double h = (static_cast<double>(data.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, data.size() - 1);
  return data[lo] + (h - static_cast<double>(lo)) * (data[hi] - data[lo]);
}

FitSummary summarize(const std::vector<Eigen::VectorXd>& draws,
                     const std::vector<double>& sigma_trace, double level) {
  if (draws.size() < 50)
    throw ValidationError("summarize: need at least 50 draws, got " + std::to_string(draws.size()));
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("summarize: level must lie in (0, 1)");
  const Eigen::Index n = draws.front().size();
  for (const auto& d : draws)
    if (d.size() != n) throw ValidationError("summarize: draws differ in length");

  FitSummary s;
  s.level = level;
  s.posterior_mean = Eigen::VectorXd::Zero(n);
  for (const auto& d : draws) s.posterior_mean += d;
  s.posterior_mean /= static_cast<double>(draws.size());

  s.band_lower.resize(n);
  s.band_upper.resize(n);
  std::vector<double> column(draws.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < draws.size(); ++k) column[k] = draws[k](i);
    s.band_lower(i) = empirical_quantile(column, 0.5 * (1.0 - level));
    s.band_upper(i) = empirical_quantile(column, 0.5 * (1.0 + level));
  }

  double acc = 0.0;
  for (double v : sigma_trace) acc += v;
  s.sigma_bar = sigma_trace.empty() ? std::numeric_limits<double>::quiet_NaN()
                                    : acc / static_cast<double>(sigma_trace.size());
  return s;
}

double correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size() || a.size() < 2)
    throw ValidationError("correlation: vectors must share a length >= 2");
  const Eigen::ArrayXd da = a.array() - a.mean();
  const Eigen::ArrayXd db = b.array() - b.mean();
  const double den = std::sqrt(da.square().sum() * db.square().sum());
  if (!(den > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return (da * db).sum() / den;
}

FitDiagnostics fit_report(const Eigen::VectorXd& estimate, const Eigen::VectorXd& y,
                          double sigma_bar, const std::optional<Eigen::VectorXd>& truth) {
  if (estimate.size() != y.size()) throw ValidationError("fit_report: estimate and y differ in length");
  if (truth && truth->size() != y.size())
    throw ValidationError("fit_report: truth and y differ in length");
  FitDiagnostics d;
  d.sigma_bar = sigma_bar;
  const Eigen::VectorXd resid = y - estimate;
  const double n = static_cast<double>(y.size());
  d.sd_resid = std::sqrt((resid.array() - resid.mean()).square().sum() / (n - 1.0));
  d.cor_pred = correlation(y, estimate);
  if (truth) {
    const Eigen::VectorXd true_resid = y - *truth;
    d.cor_resid = correlation(true_resid, resid);
    d.mse = (estimate - *truth).squaredNorm() / n;
  }
  return d;
}

double rmse(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth) {
  if (estimate.size() != truth.size() || estimate.size() == 0)
    throw ValidationError("rmse: estimate and truth must share a nonzero length");
  return std::sqrt((estimate - truth).squaredNorm() / static_cast<double>(estimate.size()));
}

}  // namespace monoproj
