#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "monoproj/cli.hpp"
#include "monoproj/error.hpp"
#include "monoproj/pava.hpp"
#include "monoproj/pipeline.hpp"
#include "monoproj/proj2d.hpp"
#include "monoproj/simgen.hpp"

namespace py = pybind11;
using namespace monoproj;

namespace {

std::vector<double> default_points(std::size_t n) {
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<double>(i);
  return p;
}

GridFunction grid_function(std::vector<double> values, std::optional<std::vector<double>> weights,
                           std::optional<std::vector<double>> points) {
  const std::size_t n = values.size();
  return GridFunction(points ? std::move(*points) : default_points(n), std::move(values),
                      weights ? std::move(*weights) : std::vector<double>{});
}

py::dict as_dict(const SimDataset& d) {
  py::dict out;
  out["x"] = d.x;
  out["y"] = d.y;
  out["truth"] = d.truth;
  if (d.trials.size() > 0) out["trials"] = d.trials;
  out["sigma"] = d.sigma;
  out["seed"] = d.seed;
  return out;
}

SimulateOptions sim_options(double sigma, std::uint64_t seed, const std::string& design,
                            bool binary, int trials, double offset) {
  SimulateOptions o;
  o.sigma = sigma;
  o.seed = seed;
  const auto kind = parse_design(design);
  if (!kind) throw ValidationError("unknown design '" + design + "'");
  o.design = *kind;
  o.noise = binary ? NoiseKind::binary : NoiseKind::gaussian;
  o.trials = trials;
  o.offset = offset;
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Monotone projection of Gaussian process posteriors";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def(
      "pava",
      [](std::vector<double> values, std::optional<std::vector<double>> weights,
         std::optional<std::vector<double>> points) {
        return pava_project(grid_function(std::move(values), std::move(weights), std::move(points)))
            .values();
      },
      py::arg("values"), py::arg("weights") = py::none(), py::arg("points") = py::none(),
      "Weighted isotonic regression of a sequence.");

  m.def(
      "minmax_oracle",
      [](std::vector<double> values, std::optional<std::vector<double>> weights) {
        return minmax_oracle(grid_function(std::move(values), std::move(weights), std::nullopt))
            .values();
      },
      py::arg("values"), py::arg("weights") = py::none());

  m.def(
      "project_surface",
      [](const Eigen::MatrixXd& values, double tol, std::size_t max_iter,
         std::optional<Eigen::MatrixXd> weights) {
        Proj2dOptions opt;
        opt.tol_mono = tol;
        opt.max_iter = max_iter;
        if (weights) opt.weights = *weights;
        const auto r = project_surface(SurfaceGrid::from_matrix(values), opt);
        py::dict out;
        out["values"] = r.result.values();
        out["iterations"] = r.iterations;
        out["converged"] = r.converged;
        out["max_violation"] = r.max_violation;
        out["first_monotone_sweep"] = r.first_monotone_sweep;
        return out;
      },
      py::arg("values"), py::arg("tol") = 1e-8, py::arg("max_iter") = 1000,
      py::arg("weights") = py::none(),
      "Least-squares projection onto surfaces non-decreasing along both axes.");

  m.def(
      "upper_set_oracle",
      [](const Eigen::MatrixXd& values, std::optional<Eigen::MatrixXd> weights) {
        return upper_set_oracle(SurfaceGrid::from_matrix(values),
                                weights ? *weights : Eigen::MatrixXd{})
            .values();
      },
      py::arg("values"), py::arg("weights") = py::none());

  m.def(
      "simulate_curve",
      [](const std::string& truth, std::size_t n, double sigma, std::uint64_t seed,
         const std::string& design, bool binary, int trials, double offset) {
        const auto id = parse_curve_truth(truth);
        if (!id) throw ValidationError("unknown curve truth '" + truth + "'");
        return as_dict(simulate_curve(*id, n, sim_options(sigma, seed, design, binary, trials, offset)));
      },
      py::arg("truth"), py::arg("n") = 100, py::arg("sigma") = 1.0, py::arg("seed") = 1,
      py::arg("design") = "equidistant", py::arg("binary") = false, py::arg("trials") = 1,
      py::arg("offset") = 0.0);

  m.def(
      "simulate_surface",
      [](const std::string& truth, std::size_t m1, std::size_t m2, double sigma,
         std::uint64_t seed, const std::string& design, bool binary, int trials, double offset) {
        const auto id = parse_surface_truth(truth);
        if (!id) throw ValidationError("unknown surface truth '" + truth + "'");
        return as_dict(
            simulate_surface(*id, m1, m2, sim_options(sigma, seed, design, binary, trials, offset)));
      },
      py::arg("truth"), py::arg("m1") = 32, py::arg("m2") = 32, py::arg("sigma") = 0.5,
      py::arg("seed") = 1, py::arg("design") = "equidistant", py::arg("binary") = false,
      py::arg("trials") = 1, py::arg("offset") = 0.0);

  m.def(
      "fit",
      [](const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const std::string& model,
         std::optional<Eigen::VectorXi> trials, std::optional<std::size_t> iters,
         std::optional<std::size_t> burnin, std::uint64_t seed, double level, std::size_t jobs,
         std::size_t display_grid) {
        FitRequest r;
        r.x = x;
        r.y = y;
        if (model == "gaussian") {
          r.model = Model::gaussian;
        } else if (model == "probit") {
          r.model = Model::probit;
        } else {
          throw ValidationError("model must be 'gaussian' or 'probit'");
        }
        if (trials) r.trials = *trials;
        r.mcmc = x.cols() == 1 ? McmcConfig::curves() : McmcConfig::surfaces();
        if (iters) r.mcmc.n_iter = *iters;
        if (burnin) r.mcmc.burn_in = *burnin;
        r.mcmc.seed = seed;
        r.level = level;
        r.jobs = jobs;
        r.display_grid = display_grid;
        FitResult f;
        {
          py::gil_scoped_release release;
          f = run_fit(r);
        }
        py::dict out;
        out["grid"] = f.grid;
        out["mean"] = f.summary.posterior_mean;
        out["lower"] = f.summary.band_lower;
        out["upper"] = f.summary.band_upper;
        out["raw_mean"] = f.raw_mean;
        out["sigma_bar"] = f.summary.sigma_bar;
        out["retained_draws"] = f.draws.retained();
        out["projection_non_converged"] = f.projection.non_converged;
        return out;
      },
      py::arg("x"), py::arg("y"), py::arg("model") = "gaussian", py::arg("trials") = py::none(),
      py::arg("iters") = py::none(), py::arg("burnin") = py::none(), py::arg("seed") = 1,
      py::arg("level") = 0.99, py::arg("jobs") = 1, py::arg("display_grid") = 0,
      "GP posterior sampling followed by projection of every draw; returns the summary.");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out;
        std::ostringstream err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = run_cli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run the command-line tool in process; returns (code, stdout, stderr).");
}
