#include "monoproj/simgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "monoproj/error.hpp"
#include "monoproj/rng.hpp"

namespace monoproj {

namespace {

constexpr std::array<std::pair<CurveTruth, std::string_view>, 6> kCurveNames{{
    {CurveTruth::flat, "flat"},
    {CurveTruth::sinusoidal, "sinusoidal"},
    {CurveTruth::step, "step"},
    {CurveTruth::linear, "linear"},
    {CurveTruth::exponential, "exponential"},
    {CurveTruth::logistic, "logistic"},
}};

constexpr std::array<std::pair<SurfaceTruth, std::string_view>, 7> kSurfaceNames{{
    {SurfaceTruth::additive, "additive"},
    {SurfaceTruth::product, "product"},
    {SurfaceTruth::smooth_step, "smooth_step"},
    {SurfaceTruth::logistic_ridge, "logistic_ridge"},
    {SurfaceTruth::flat, "flat"},
    {SurfaceTruth::exponential, "exponential"},
    {SurfaceTruth::mixture, "mixture"},
}};

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

int binomial_draw(int trials, double prob, Rng& rng) {
  int k = 0;
  for (int r = 0; r < trials; ++r) k += uniform01(rng) < prob ? 1 : 0;
  return k;
}

void add_noise(SimDataset& d, const SimulateOptions& o, Rng& rng) {
  const Eigen::Index n = d.truth.size();
  d.y.resize(n);
  if (o.noise == NoiseKind::gaussian) {
    for (Eigen::Index i = 0; i < n; ++i) d.y(i) = d.truth(i) + o.sigma * standard_normal(rng);
    return;
  }
  d.trials = Eigen::VectorXi::Constant(n, o.trials);
  for (Eigen::Index i = 0; i < n; ++i)
    d.y(i) = binomial_draw(o.trials, normal_cdf(d.truth(i) + o.offset), rng);
}

void validate_options(const SimulateOptions& o) {
  if (!(o.sigma >= 0.0) || !std::isfinite(o.sigma))
    throw ValidationError("simulate: sigma must be >= 0");
  if (o.noise == NoiseKind::binary && o.trials < 1)
    throw ValidationError("simulate: trials must be >= 1");
}

}  // namespace

std::vector<CurveTruth> all_curve_truths() {
  std::vector<CurveTruth> out;
  for (const auto& [id, name] : kCurveNames) out.push_back(id);
  return out;
}

std::vector<SurfaceTruth> all_surface_truths() {
  std::vector<SurfaceTruth> out;
  for (const auto& [id, name] : kSurfaceNames) out.push_back(id);
  return out;
}

std::string_view name_of(CurveTruth id) {
  for (const auto& [k, name] : kCurveNames)
    if (k == id) return name;
  return "?";
}

std::string_view name_of(SurfaceTruth id) {
  for (const auto& [k, name] : kSurfaceNames)
    if (k == id) return name;
  return "?";
}

std::optional<CurveTruth> parse_curve_truth(std::string_view name) {
  for (const auto& [k, n] : kCurveNames)
    if (n == name) return k;
  return std::nullopt;
}

std::optional<SurfaceTruth> parse_surface_truth(std::string_view name) {
  for (const auto& [k, n] : kSurfaceNames)
    if (n == name) return k;
  return std::nullopt;
}

std::optional<DesignKind> parse_design(std::string_view name) {
  if (name == "equidistant") return DesignKind::equidistant;
  if (name == "uniform" || name == "uniform-random") return DesignKind::uniform;
  return std::nullopt;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double curve_truth(CurveTruth id, double x) {
  if (!(x > 0.0 && x <= 10.0))
    throw ValidationError("curve_truth: x = " + std::to_string(x) + " outside (0, 10]");
  switch (id) {
    case CurveTruth::flat:
      return 3.0;
    case CurveTruth::sinusoidal:
      return 0.32 * (x + std::sin(x));
    case CurveTruth::step:
      return x <= 8.0 ? 3.0 : 6.0;
    case CurveTruth::linear:
      return 0.3 * x;
    case CurveTruth::exponential:
      return 0.15 * std::exp(0.6 * x - 3.0);
    case CurveTruth::logistic:
      return 3.0 / (1.0 + std::exp(-2.0 * x + 10.0));
  }
  throw ValidationError("curve_truth: unknown id");
}

double surface_truth(SurfaceTruth id, double s, double t) {
  if (!(s >= 0.0 && s <= 1.0 && t >= 0.0 && t <= 1.0))
    throw ValidationError("surface_truth: point outside [0, 1]^2");
  switch (id) {
    case SurfaceTruth::additive:
      return s + t;
    case SurfaceTruth::product:
      return s * t;
    case SurfaceTruth::smooth_step:
      return logistic(12.0 * (s + t - 1.0));
    case SurfaceTruth::logistic_ridge:
      return 2.0 * logistic(10.0 * (0.7 * s + 0.3 * t - 0.5));
    case SurfaceTruth::flat:
      return 1.0;
    case SurfaceTruth::exponential:
      return std::exp(s + t - 1.0);
    case SurfaceTruth::mixture:
      return 0.6 * s * s + 0.4 * t + 0.3 * s * t;
  }
  throw ValidationError("surface_truth: unknown id");
}

SimDataset simulate_curve(CurveTruth id, std::size_t n, const SimulateOptions& options) {
  validate_options(options);
  if (n < 2) throw ValidationError("simulate: n must be >= 2");
  Rng rng(options.seed);
  SimDataset d;
  d.truth_id = std::string(name_of(id));
  d.sigma = options.sigma;
  d.noise = options.noise;
  d.seed = options.seed;
  d.x.resize(static_cast<Eigen::Index>(n), 1);

  if (options.design == DesignKind::equidistant) {
    for (std::size_t i = 0; i < n; ++i)
      d.x(static_cast<Eigen::Index>(i), 0) = 10.0 * static_cast<double>(i + 1) / static_cast<double>(n);
  } else {
    std::vector<double> xs(n);
    // 1 - U lies in (0, 1], so 10 (1 - U) lies in (0, 10]
    for (double& v : xs) v = 10.0 * (1.0 - uniform01(rng));
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 1; i < n; ++i)
      if (!(xs[i - 1] < xs[i])) throw ValidationError("simulate: duplicate uniform design point");
    for (std::size_t i = 0; i < n; ++i) d.x(static_cast<Eigen::Index>(i), 0) = xs[i];
  }

  d.truth.resize(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < d.truth.size(); ++i) d.truth(i) = curve_truth(id, d.x(i, 0));
  add_noise(d, options, rng);
  return d;
}

SimDataset simulate_surface(SurfaceTruth id, std::size_t m1, std::size_t m2,
                            const SimulateOptions& options) {
  validate_options(options);
  if (m1 < 2 || m2 < 2) throw ValidationError("simulate: surface axes need at least 2 points");
  Rng rng(options.seed);
  auto make_axis = [&](std::size_t m) {
    std::vector<double> axis(m);
    if (options.design == DesignKind::equidistant) {
      for (std::size_t i = 0; i < m; ++i)
        axis[i] = static_cast<double>(i) / static_cast<double>(m - 1);
    } else {
      for (double& v : axis) v = uniform01(rng);
      std::sort(axis.begin(), axis.end());
      for (std::size_t i = 1; i < m; ++i)
        if (!(axis[i - 1] < axis[i])) throw ValidationError("simulate: duplicate axis point");
    }
    return axis;
  };
  const auto s = make_axis(m1);
  const auto t = make_axis(m2);

  SimDataset d;
  d.truth_id = std::string(name_of(id));
  d.sigma = options.sigma;
  d.noise = options.noise;
  d.seed = options.seed;
  const auto n = static_cast<Eigen::Index>(m1 * m2);
  d.x.resize(n, 2);
  d.truth.resize(n);
  for (std::size_t i = 0; i < m1; ++i)
    for (std::size_t j = 0; j < m2; ++j) {
      const auto r = static_cast<Eigen::Index>(i * m2 + j);
      d.x(r, 0) = s[i];
      d.x(r, 1) = t[j];
      d.truth(r) = surface_truth(id, s[i], t[j]);
    }
  add_noise(d, options, rng);
  return d;
}

}  // namespace monoproj
