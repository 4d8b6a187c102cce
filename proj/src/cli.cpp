#include "monoproj/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>

#include "monoproj/error.hpp"
#include "monoproj/io.hpp"
#include "monoproj/pava.hpp"
#include "monoproj/pipeline.hpp"
#include "monoproj/proj2d.hpp"

namespace monoproj {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct RunConfig {
  std::string data;
  std::string out;
  std::string diagnostics;
  std::string config;
  std::string model = "gaussian";
  int dim = 0;  // 0: infer from the CSV header
  std::optional<std::size_t> iters;
  std::optional<std::size_t> burnin;
  std::optional<std::uint64_t> seed;
  double level = 0.99;
  std::size_t replicates = 10;
  std::size_t jobs = 1;

  std::vector<std::string> truths;
  std::size_t n = 100;
  std::size_t m1 = 32;
  std::size_t m2 = 32;
  std::vector<double> sigmas;
  std::string design = "equidistant";
  bool binary = false;
  int trials = 1;
  double offset = 0.0;
  bool with_truth = false;

  double tol = 1e-8;
  std::size_t max_iter = 1000;
  std::size_t display_grid = 0;

  std::optional<double> beta_step;
  std::optional<double> gamma_step;
  std::optional<double> sigma_step;
  bool no_adapt = false;
  std::vector<double> beta_prior;
  std::vector<double> gamma_prior;
  std::vector<double> precision_prior;
};

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto logger = std::make_shared<spdlog::logger>("monoproj", sink);
  logger->set_pattern("[%l] %v");
  spdlog::level::level_enum level = spdlog::level::warn;
  if (const char* env = std::getenv("MONOPROJ_LOG")) {
    const auto parsed = spdlog::level::from_str(env);
    // from_str maps unknown names to off; keep the default for those.
    if (parsed != spdlog::level::off || std::string_view(env) == "off") level = parsed;
  }
  logger->set_level(level);
  return logger;
}

// Values from --config fill options that were not given on the command line.
void apply_config_file(CLI::App& sub, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config " + path + ": " + e.what());
  }
  if (!doc.is_object()) throw ValidationError("config " + path + ": expected a JSON object");
  for (const auto& [key, value] : doc.items()) {
    std::string flag = key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    CLI::Option* opt = sub.get_option_no_throw("--" + flag);
    if (opt == nullptr || flag == "config")
      throw ValidationError("config " + path + ": unknown key '" + key + "'");
    if (opt->count() > 0) continue;
    auto text = [&](const json& v) -> std::string {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
      if (v.is_number()) return v.dump();
      throw ValidationError("config " + path + ": bad value for '" + key + "'");
    };
    if (value.is_array()) {
      for (const auto& v : value) opt->add_result(text(v));
    } else if (value.is_boolean() && opt->get_expected_min() == 0) {
      if (!value.get<bool>()) continue;
      opt->add_result("true");
    } else {
      opt->add_result(text(value));
    }
    opt->run_callback();
  }
}

GammaPrior prior_from(const std::vector<double>& v, const char* name, GammaPrior fallback) {
  if (v.empty()) return fallback;
  if (v.size() != 2) throw ValidationError(std::string("--") + name + " takes shape and rate");
  return GammaPrior{v[0], v[1]};
}

McmcConfig mcmc_from(const RunConfig& rc, McmcConfig base) {
  if (rc.iters) base.n_iter = *rc.iters;
  if (rc.burnin) base.burn_in = *rc.burnin;
  if (rc.seed) base.seed = *rc.seed;
  if (rc.beta_step) base.beta_step = *rc.beta_step;
  if (rc.gamma_step) base.gamma_step = *rc.gamma_step;
  if (rc.sigma_step) base.sigma_step = *rc.sigma_step;
  if (rc.no_adapt) base.adapt = false;
  base.beta_prior = prior_from(rc.beta_prior, "beta-prior", base.beta_prior);
  base.gamma_prior = prior_from(rc.gamma_prior, "gamma-prior", base.gamma_prior);
  base.precision_prior = prior_from(rc.precision_prior, "precision-prior", base.precision_prior);
  base.validate();
  return base;
}

json prior_json(const GammaPrior& p) { return json::array({p.shape, p.rate}); }

json mcmc_json(const McmcConfig& c) {
  json j;
  j["iters"] = c.n_iter;
  j["burnin"] = c.burn_in;
  j["seed"] = c.seed;
  j["beta_prior"] = prior_json(c.beta_prior);
  j["gamma_prior"] = prior_json(c.gamma_prior);
  j["precision_prior"] = prior_json(c.precision_prior);
  j["beta_step"] = c.beta_step;
  j["gamma_step"] = c.gamma_step;
  j["sigma_step"] = c.sigma_step;
  j["adapt"] = c.adapt;
  return j;
}

std::vector<std::string> coordinate_columns(int dim) {
  if (dim == 1) return {"x"};
  std::vector<std::string> names;
  for (int k = 1; k <= dim; ++k) names.push_back("x" + std::to_string(k));
  return names;
}

int infer_dim(const CsvTable& table, int requested) {
  if (requested != 0) {
    if (requested < 1 || requested > 3) throw ValidationError("--dim must be 1, 2 or 3");
    for (const auto& c : coordinate_columns(requested))
      if (!table.has(c)) throw ValidationError("--dim " + std::to_string(requested) +
                                               " needs a '" + c + "' column");
    return requested;
  }
  if (table.has("x")) return 1;
  if (table.has("x1") && table.has("x2")) return table.has("x3") ? 3 : 2;
  throw ValidationError("cannot infer dimension: expected column 'x' or 'x1','x2'");
}

// Design rows sorted lexicographically, which is the lattice order.
struct SortedDesign {
  Eigen::MatrixXd x;
  std::vector<std::size_t> order;

  Eigen::VectorXd take(const std::vector<double>& column) const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(order.size()));
    for (std::size_t i = 0; i < order.size(); ++i) v(static_cast<Eigen::Index>(i)) = column[order[i]];
    return v;
  }
};

SortedDesign sorted_design(const CsvTable& table, int dim) {
  const auto names = coordinate_columns(dim);
  const std::size_t n = table.rows();
  if (n == 0) throw ValidationError("data file has no rows");
  std::vector<const std::vector<double>*> cols;
  for (const auto& c : names) cols.push_back(&table.column(c));
  SortedDesign d;
  d.order.resize(n);
  std::iota(d.order.begin(), d.order.end(), std::size_t{0});
  std::stable_sort(d.order.begin(), d.order.end(), [&](std::size_t a, std::size_t b) {
    for (const auto* c : cols) {
      if ((*c)[a] < (*c)[b]) return true;
      if ((*c)[a] > (*c)[b]) return false;
    }
    return false;
  });
  d.x.resize(static_cast<Eigen::Index>(n), dim);
  for (std::size_t i = 0; i < n; ++i)
    for (int k = 0; k < dim; ++k)
      d.x(static_cast<Eigen::Index>(i), k) = (*cols[static_cast<std::size_t>(k)])[d.order[i]];
  return d;
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// Writes to `path`, or to `out` when the path is empty.
template <class Fn>
void emit(const std::string& path, std::ostream& out, Fn&& write) {
  if (path.empty()) {
    write(out);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ValidationError("cannot write " + path);
  write(file);
  if (!file) throw ValidationError("write failed: " + path);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ValidationError("cannot write " + path);
  file << text;
}

// ---------------------------------------------------------------- simulate

void cmd_simulate(const RunConfig& rc, std::ostream& out, spdlog::logger& log) {
  if (rc.truths.size() != 1) throw ValidationError("simulate: give exactly one --truth");
  const int dim = rc.dim == 0 ? 1 : rc.dim;
  const auto design = parse_design(rc.design);
  if (!design) throw ValidationError("unknown design '" + rc.design + "'");
  SimulateOptions so;
  so.design = *design;
  so.noise = rc.binary ? NoiseKind::binary : NoiseKind::gaussian;
  if (rc.sigmas.size() > 1) throw ValidationError("simulate: give one --sigma");
  so.sigma = rc.sigmas.empty() ? 1.0 : rc.sigmas.front();
  so.seed = rc.seed.value_or(1);
  so.trials = rc.trials;
  so.offset = rc.offset;

  SimDataset data;
  if (dim == 1) {
    const auto id = parse_curve_truth(rc.truths.front());
    if (!id) throw ValidationError("unknown curve truth '" + rc.truths.front() + "'");
    data = simulate_curve(*id, rc.n, so);
  } else if (dim == 2) {
    const auto id = parse_surface_truth(rc.truths.front());
    if (!id) throw ValidationError("unknown surface truth '" + rc.truths.front() + "'");
    data = simulate_surface(*id, rc.m1, rc.m2, so);
  } else {
    throw ValidationError("simulate: --dim must be 1 or 2");
  }
  log.info("simulate {} ({} rows, seed {})", data.truth_id, data.y.size(), so.seed);

  std::vector<std::string> header = coordinate_columns(dim);
  std::vector<std::vector<double>> cols;
  for (int k = 0; k < dim; ++k) cols.push_back(to_std(data.x.col(k)));
  header.push_back("y");
  cols.push_back(to_std(data.y));
  if (rc.binary) {
    header.push_back("trials");
    cols.push_back(to_std(data.trials.cast<double>()));
  }
  if (rc.with_truth) {
    header.push_back("truth");
    cols.push_back(to_std(data.truth));
  }
  std::vector<const std::vector<double>*> ptrs;
  for (const auto& c : cols) ptrs.push_back(&c);
  emit(rc.out, out, [&](std::ostream& os) { write_csv(os, header, ptrs); });
}

// --------------------------------------------------------------------- fit

json diagnostics_json(const FitResult& fit, const FitRequest& req, const RunConfig& rc, int dim) {
  json j;
  j["seed"] = fit.draws.seed;
  j["model"] = rc.model;
  j["dim"] = dim;
  j["n"] = req.y.size();
  j["retained_draws"] = fit.draws.retained();
  j["sigma_bar"] = fit.diagnostics.sigma_bar;
  json f;
  f["sd_resid"] = fit.diagnostics.sd_resid;
  f["cor_pred"] = fit.diagnostics.cor_pred;
  if (fit.diagnostics.cor_resid) f["cor_resid"] = *fit.diagnostics.cor_resid;
  if (fit.diagnostics.mse) f["mse"] = *fit.diagnostics.mse;
  j["fit"] = f;

  json chain;
  json acc;
  json steps;
  for (std::size_t b = 0; b < fit.draws.block_names.size(); ++b) {
    acc[fit.draws.block_names[b]] = fit.draws.acceptance_rates[b];
    steps[fit.draws.block_names[b]] = fit.draws.final_steps[b];
  }
  chain["acceptance_rates"] = acc;
  chain["final_steps"] = steps;
  json traces = json::array();
  for (const auto& t : fit.chain.traces) {
    json tj;
    tj["name"] = t.name;
    tj["degenerate"] = t.degenerate;
    if (!t.degenerate) {
      tj["ess"] = t.ess;
      tj["split_rhat"] = t.split_rhat;
    }
    traces.push_back(tj);
  }
  chain["traces"] = traces;
  j["chain"] = chain;

  json p;
  p["draws"] = fit.projection.draws;
  p["max_iterations"] = fit.projection.max_iterations;
  p["mean_iterations"] = fit.projection.mean_iterations;
  p["non_converged"] = fit.projection.non_converged;
  p["max_violation"] = fit.projection.max_violation;
  j["projection"] = p;

  // Effective configuration; output paths and --jobs do not affect results.
  json c;
  c["data"] = rc.data;
  c["model"] = rc.model;
  c["dim"] = dim;
  c["level"] = req.level;
  c["tol"] = req.tol_mono;
  c["max_iter"] = req.max_iter;
  c["display_grid"] = req.display_grid;
  c["mcmc"] = mcmc_json(req.mcmc);
  j["config"] = c;
  return j;
}

void cmd_fit(const RunConfig& rc, std::ostream& out, spdlog::logger& log) {
  if (rc.data.empty()) throw ValidationError("fit: --data is required");
  const CsvTable table = read_csv(rc.data);
  const int dim = infer_dim(table, rc.dim);
  const SortedDesign design = sorted_design(table, dim);

  FitRequest req;
  req.x = design.x;
  req.y = design.take(table.column("y"));
  if (rc.model == "gaussian") {
    req.model = Model::gaussian;
  } else if (rc.model == "probit") {
    req.model = Model::probit;
    if (table.has("trials")) {
      const Eigen::VectorXd t = design.take(table.column("trials"));
      req.trials.resize(t.size());
      for (Eigen::Index i = 0; i < t.size(); ++i) {
        if (t(i) < 1.0 || t(i) != std::round(t(i)))
          throw ValidationError("trials must be positive integers");
        req.trials(i) = static_cast<int>(t(i));
      }
    }
  } else {
    throw ValidationError("unknown model '" + rc.model + "' (gaussian | probit)");
  }
  if (table.has("weight")) req.weights = to_std(design.take(table.column("weight")));
  if (table.has("truth")) req.truth = design.take(table.column("truth"));
  req.mcmc = mcmc_from(rc, dim == 1 ? McmcConfig::curves() : McmcConfig::surfaces());
  req.level = rc.level;
  req.tol_mono = rc.tol;
  req.max_iter = rc.max_iter;
  req.jobs = rc.jobs;
  req.display_grid = rc.display_grid;

  log.info("fit: {} model, {} points, dim {}, {} iterations ({} burn-in), seed {}", rc.model,
           req.y.size(), dim, req.mcmc.n_iter, req.mcmc.burn_in, req.mcmc.seed);
  const FitResult fit = run_fit(req);
  if (fit.projection.non_converged > 0)
    log.warn("fit: {} projected draws did not reach tolerance {}", fit.projection.non_converged,
             req.tol_mono);

  std::vector<std::string> header{"x"};
  for (int k = 2; k <= dim; ++k) header.push_back("x" + std::to_string(k));
  std::vector<std::vector<double>> cols;
  for (int k = 0; k < dim; ++k) cols.push_back(to_std(fit.grid.col(k)));
  header.insert(header.end(), {"mean", "lo", "hi"});
  cols.push_back(to_std(fit.summary.posterior_mean));
  cols.push_back(to_std(fit.summary.band_lower));
  cols.push_back(to_std(fit.summary.band_upper));
  std::vector<const std::vector<double>*> ptrs;
  for (const auto& c : cols) ptrs.push_back(&c);
  emit(rc.out, out, [&](std::ostream& os) { write_csv(os, header, ptrs); });

  std::string diag_path = rc.diagnostics;
  if (diag_path.empty() && !rc.out.empty())
    diag_path = fs::path(rc.out).replace_extension(".json").string();
  if (!diag_path.empty())
    write_text(diag_path, diagnostics_json(fit, req, rc, dim).dump(2) + "\n");
}

// ----------------------------------------------------------------- project

void cmd_project(const RunConfig& rc, std::ostream& out, std::ostream& err, spdlog::logger& log) {
  if (rc.data.empty()) throw ValidationError("project: --data is required");
  const CsvTable table = read_csv(rc.data);
  const int dim = infer_dim(table, rc.dim);
  if (dim > 2) throw ValidationError("project: only 1D curves and 2D grids are supported");
  const SortedDesign design = sorted_design(table, dim);
  const Eigen::VectorXd values = design.take(table.column("value"));
  std::vector<double> weights;
  if (table.has("weight")) weights = to_std(design.take(table.column("weight")));

  std::vector<std::string> header = coordinate_columns(dim);
  std::vector<std::vector<double>> cols;
  for (int k = 0; k < dim; ++k) cols.push_back(to_std(design.x.col(k)));

  if (dim == 1) {
    const GridFunction f(to_std(design.x.col(0)), to_std(values), weights);
    const MonotoneGridFunction p = pava_project(f);
    header.push_back("value");
    cols.push_back(p.values());
  } else {
    const auto lattice = Lattice::detect(design.x);
    if (!lattice) throw ValidationError("project: 2D rows must form a complete grid");
    const auto& axes = lattice->axes();
    const auto rows = static_cast<Eigen::Index>(axes[0].size());
    const auto ncol = static_cast<Eigen::Index>(axes[1].size());
    const Eigen::MatrixXd m =
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            values.data(), rows, ncol);
    Proj2dOptions po;
    po.tol_mono = rc.tol;
    po.max_iter = rc.max_iter;
    if (!weights.empty())
      po.weights =
          Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
              weights.data(), rows, ncol);
    const Proj2dReport report = project_surface(SurfaceGrid(axes[0], axes[1], m), po);
    std::ostream& msg = rc.out.empty() ? err : out;
    msg << "iterations " << report.iterations << " max_violation "
        << format_double(report.max_violation) << (report.converged ? "" : " (not converged)")
        << '\n';
    if (!report.converged)
      log.warn("project: no convergence within {} sweeps", po.max_iter);
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> r =
        report.result.values();
    header.push_back("value");
    cols.emplace_back(r.data(), r.data() + r.size());
  }
  std::vector<const std::vector<double>*> ptrs;
  for (const auto& c : cols) ptrs.push_back(&c);
  emit(rc.out, out, [&](std::ostream& os) { write_csv(os, header, ptrs); });
}

// --------------------------------------------------------------- benchmark

std::string csv_field(double v) { return format_double(v); }

void cmd_benchmark(const RunConfig& rc, std::ostream& out, spdlog::logger& log) {
  if (!rc.seed) throw ValidationError("benchmark: --seed is required");
  if (rc.replicates < 1) throw ValidationError("benchmark: --replicates must be >= 1");
  const int dim = rc.dim == 0 ? 1 : rc.dim;
  std::ostringstream table;
  if (dim == 1) {
    CurveBenchmarkRequest req;
    if (!rc.truths.empty()) {
      req.truths.clear();
      for (const auto& t : rc.truths) {
        const auto id = parse_curve_truth(t);
        if (!id) throw ValidationError("unknown curve truth '" + t + "'");
        req.truths.push_back(*id);
      }
    }
    req.replicates = rc.replicates;
    req.n = rc.n;
    if (rc.sigmas.size() > 1) throw ValidationError("benchmark: curves take one --sigma");
    if (!rc.sigmas.empty()) req.sigma = rc.sigmas.front();
    req.seed = *rc.seed;
    req.mcmc = mcmc_from(rc, McmcConfig::curves());
    req.jobs = rc.jobs;
    log.info("benchmark: {} curves x {} replicates, n = {}", req.truths.size(), req.replicates,
             req.n);
    const auto rows = run_curve_benchmark(req);
    table << "truth,method,rmse,se,replicates,failed\n";
    for (const auto& r : rows) {
      table << r.truth << ',' << r.method << ',' << csv_field(r.rmse) << ',' << csv_field(r.se)
            << ',' << r.replicates << ',' << r.failed << '\n';
      if (r.failed > 0 && r.method == "gp")
        log.warn("benchmark: {} failed replicates for {}", r.failed, r.truth);
    }
  } else if (dim == 2) {
    SurfaceBenchmarkRequest req;
    if (!rc.truths.empty()) {
      req.truths.clear();
      for (const auto& t : rc.truths) {
        const auto id = parse_surface_truth(t);
        if (!id) throw ValidationError("unknown surface truth '" + t + "'");
        req.truths.push_back(*id);
      }
    }
    if (!rc.sigmas.empty()) req.sigmas = rc.sigmas;
    req.m1 = rc.m1;
    req.m2 = rc.m2;
    req.replicates = rc.replicates;
    req.seed = *rc.seed;
    req.mcmc = mcmc_from(rc, McmcConfig::surfaces());
    req.jobs = rc.jobs;
    log.info("benchmark: {} surfaces x {} noise levels x {} replicates", req.truths.size(),
             req.sigmas.size(), req.replicates);
    const auto rows = run_surface_benchmark(req);
    table << "truth,sigma,sigma_bar,sd_resid,cor_resid,cor_pred,mse,non_converged,replicates,"
             "failed\n";
    for (const auto& r : rows)
      table << r.truth << ',' << csv_field(r.sigma) << ',' << csv_field(r.sigma_bar) << ','
            << csv_field(r.sd_resid) << ',' << csv_field(r.cor_resid) << ','
            << csv_field(r.cor_pred) << ',' << csv_field(r.mse) << ',' << r.non_converged << ','
            << r.replicates << ',' << r.failed << '\n';
  } else {
    throw ValidationError("benchmark: --dim must be 1 or 2");
  }
  emit(rc.out, out, [&](std::ostream& os) { os << table.str(); });
}

// ------------------------------------------------------------------- setup

void add_common(CLI::App* sub, RunConfig& rc) {
  sub->add_option("--out", rc.out, "Output file (default: stdout)");
  sub->add_option("--seed", rc.seed, "Random seed");
  sub->add_option("--jobs", rc.jobs, "Worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--config", rc.config, "JSON file of option values; flags take precedence");
}

void add_mcmc(CLI::App* sub, RunConfig& rc) {
  sub->add_option("--iters", rc.iters, "MCMC iterations including burn-in");
  sub->add_option("--burnin", rc.burnin, "Discarded iterations");
  sub->add_option("--beta-step", rc.beta_step, "Initial log-scale step for beta");
  sub->add_option("--gamma-step", rc.gamma_step, "Initial log-scale step for each gamma");
  sub->add_option("--sigma-step", rc.sigma_step, "Initial log-scale step for sigma^2");
  sub->add_flag("--no-adapt", rc.no_adapt, "Keep the proposal steps fixed");
  sub->add_option("--beta-prior", rc.beta_prior, "Gamma shape and rate for beta")->expected(2);
  sub->add_option("--gamma-prior", rc.gamma_prior, "Gamma shape and rate for each gamma")
      ->expected(2);
  sub->add_option("--precision-prior", rc.precision_prior, "Gamma shape and rate for 1/sigma^2")
      ->expected(2);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto log = make_logger(err);
  RunConfig rc;
  CLI::App app{"Monotone curve and surface estimation by projected Gaussian processes",
               "monoproj"};
  app.require_subcommand(1);

  CLI::App* sim = app.add_subcommand("simulate", "Write a simulated benchmark dataset");
  add_common(sim, rc);
  sim->add_option("--truth", rc.truths, "Truth id")->delimiter(',');
  sim->add_option("--dim", rc.dim, "1 for curves, 2 for surfaces");
  sim->add_option("--n", rc.n, "Curve sample size");
  sim->add_option("--m1", rc.m1, "Surface grid size along x1");
  sim->add_option("--m2", rc.m2, "Surface grid size along x2");
  sim->add_option("--sigma", rc.sigmas, "Noise sd");
  sim->add_option("--design", rc.design, "equidistant | uniform");
  sim->add_flag("--binary", rc.binary, "Binomial responses through the probit link");
  sim->add_option("--trials", rc.trials, "Trials per point for binary data");
  sim->add_option("--offset", rc.offset, "Added to the truth inside the probit link");
  sim->add_flag("--with-truth", rc.with_truth, "Add a truth column");

  CLI::App* fit = app.add_subcommand("fit", "Fit a monotone estimate with credible bands");
  add_common(fit, rc);
  add_mcmc(fit, rc);
  fit->add_option("--data", rc.data, "Input CSV");
  fit->add_option("--model", rc.model, "gaussian | probit");
  fit->add_option("--dim", rc.dim, "1, 2 or 3 (default: from the header)");
  fit->add_option("--level", rc.level, "Credible level of the pointwise band");
  fit->add_option("--tol", rc.tol, "Monotonicity tolerance for 2D/3D projection");
  fit->add_option("--max-iter", rc.max_iter, "Sweep limit for 2D/3D projection");
  fit->add_option("--display-grid", rc.display_grid, "Predict on this many equidistant points (1D)");
  fit->add_option("--diagnostics", rc.diagnostics, "Diagnostics JSON (default: --out with .json)");

  CLI::App* proj = app.add_subcommand("project", "Project values onto monotone functions");
  proj->add_option("--data", rc.data, "Input CSV");
  proj->add_option("--out", rc.out, "Output file (default: stdout)");
  proj->add_option("--dim", rc.dim, "1 or 2 (default: from the header)");
  proj->add_option("--tol", rc.tol, "Monotonicity tolerance for 2D");
  proj->add_option("--max-iter", rc.max_iter, "Sweep limit for 2D");
  proj->add_option("--config", rc.config, "JSON file of option values");

  CLI::App* bench = app.add_subcommand("benchmark", "Simulation study over benchmark truths");
  add_common(bench, rc);
  add_mcmc(bench, rc);
  bench->add_option("--dim", rc.dim, "1 for curves, 2 for surfaces");
  bench->add_option("--replicates", rc.replicates, "Replicates per truth");
  bench->add_option("--truth", rc.truths, "Comma-separated truth ids (default: all)")
      ->delimiter(',');
  bench->add_option("--n", rc.n, "Curve sample size");
  bench->add_option("--m1", rc.m1, "Surface grid size along x1");
  bench->add_option("--m2", rc.m2, "Surface grid size along x2");
  bench->add_option("--sigma", rc.sigmas, "Noise sd (surfaces: comma-separated list)")
      ->delimiter(',');

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_validation;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    if (!rc.config.empty()) apply_config_file(*sub, rc.config);
    if (sub == sim) cmd_simulate(rc, out, *log);
    else if (sub == fit) cmd_fit(rc, out, *log);
    else if (sub == proj) cmd_project(rc, out, err, *log);
    else cmd_benchmark(rc, out, *log);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return exit_validation;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return exit_numerical;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_validation;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return exit_internal;
  }
  return exit_ok;
}

}  // namespace monoproj
