#include "monoproj/proj2d.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>

#include "monoproj/error.hpp"
#include "monoproj/pava.hpp"

namespace monoproj {

namespace {

void require_increasing(const std::vector<double>& axis, const char* name) {
  for (std::size_t i = 0; i < axis.size(); ++i) {
    if (!std::isfinite(axis[i]))
      throw ValidationError(std::string("surface grid: non-finite ") + name + " point");
    if (i > 0 && !(axis[i - 1] < axis[i]))
      throw ValidationError(std::string("surface grid: ") + name + " axis not strictly increasing");
  }
}

std::vector<double> iota_axis(Eigen::Index n) {
  std::vector<double> axis(static_cast<std::size_t>(n));
  std::iota(axis.begin(), axis.end(), 0.0);
  return axis;
}

// Row-major flattening (t fastest) and back.
std::vector<double> flatten(const Eigen::MatrixXd& m) {
  std::vector<double> out(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out[static_cast<std::size_t>(i * m.cols() + j)] = m(i, j);
  return out;
}

Eigen::MatrixXd unflatten(const std::vector<double>& v, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = v[static_cast<std::size_t>(i * cols + j)];
  return m;
}

std::size_t stride_of(std::span<const std::size_t> dims, std::size_t axis) {
  std::size_t s = 1;
  for (std::size_t k = axis + 1; k < dims.size(); ++k) s *= dims[k];
  return s;
}

// Visits every 1D line along `axis` by its first flat index.
template <typename Fn>
void for_each_line(std::span<const std::size_t> dims, std::size_t axis, Fn&& fn) {
  const std::size_t stride = stride_of(dims, axis);
  const std::size_t len = dims[axis];
  const std::size_t block = stride * len;
  std::size_t total = 1;
  for (std::size_t d : dims) total *= d;
  for (std::size_t outer = 0; outer < total; outer += block)
    for (std::size_t inner = 0; inner < stride; ++inner) fn(outer + inner, stride, len);
}

double weighted_norm(std::span<const double> v, std::span<const double> w) {
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) acc += (w.empty() ? 1.0 : w[i]) * v[i] * v[i];
  return std::sqrt(acc);
}

}  // namespace

SurfaceGrid::SurfaceGrid(std::vector<double> s_points, std::vector<double> t_points,
                         Eigen::MatrixXd values)
    : s_(std::move(s_points)), t_(std::move(t_points)), values_(std::move(values)) {
  if (s_.empty() || t_.empty()) throw ValidationError("surface grid: empty axis");
  require_increasing(s_, "s");
  require_increasing(t_, "t");
  if (values_.rows() != static_cast<Eigen::Index>(s_.size()) ||
      values_.cols() != static_cast<Eigen::Index>(t_.size()))
    throw ValidationError("surface grid: matrix is " + std::to_string(values_.rows()) + "x" +
                          std::to_string(values_.cols()) + " but axes are " +
                          std::to_string(s_.size()) + "x" + std::to_string(t_.size()));
  if (!values_.allFinite()) throw ValidationError("surface grid: non-finite value");
}

SurfaceGrid SurfaceGrid::from_matrix(Eigen::MatrixXd values) {
  auto s = iota_axis(values.rows());
  auto t = iota_axis(values.cols());
  return SurfaceGrid(std::move(s), std::move(t), std::move(values));
}

SurfaceGrid SurfaceGrid::with_values(Eigen::MatrixXd values) const {
  return SurfaceGrid(s_, t_, std::move(values));
}

double lattice_max_violation(std::span<const double> values, std::span<const std::size_t> dims) {
  double worst = 0.0;
  for (std::size_t axis = 0; axis < dims.size(); ++axis) {
    for_each_line(dims, axis, [&](std::size_t start, std::size_t stride, std::size_t len) {
      for (std::size_t k = 1; k < len; ++k) {
        const double d = values[start + (k - 1) * stride] - values[start + k * stride];
        worst = std::max(worst, d);
      }
    });
  }
  return worst;
}

LatticeProjection project_lattice(std::span<const double> values,
                                  std::span<const std::size_t> dims,
                                  const LatticeOptions& options) {
  if (dims.empty()) throw ValidationError("lattice projection: no axes");
  std::size_t n = 1;
  for (std::size_t d : dims) {
    if (d == 0) throw ValidationError("lattice projection: empty axis");
    n *= d;
  }
  if (values.size() != n) throw ValidationError("lattice projection: size does not match axes");
  if (!(options.tol_mono > 0.0)) throw ValidationError("lattice projection: tol_mono must be > 0");
  if (options.max_iter < 1) throw ValidationError("lattice projection: max_iter must be >= 1");
  if (!options.weights.empty() && options.weights.size() != n)
    throw ValidationError("lattice projection: weights do not match values");
  for (double w : options.weights)
    if (!(w > 0.0) || !std::isfinite(w))
      throw ValidationError("lattice projection: weights must be positive");

  const std::size_t p = dims.size();
  std::vector<std::vector<double>> residual(p, std::vector<double>(n, 0.0));
  std::vector<double> input(n);
  std::vector<double> iterate(values.begin(), values.end());
  std::vector<double> line;
  std::vector<double> line_w;

  LatticeProjection out;
  std::vector<double> previous(values.begin(), values.end());
  // Consecutive axis steps whose iterate moved by at most tol_mono.
  std::size_t settled = 0;
  for (std::size_t sweep = 1; sweep <= options.max_iter; ++sweep) {
    out.iterations = sweep;
    for (std::size_t axis = 0; axis < p; ++axis) {
      // input = w + sum of the other axes' residuals
      for (std::size_t i = 0; i < n; ++i) {
        double v = values[i];
        for (std::size_t b = 0; b < p; ++b)
          if (b != axis) v += residual[b][i];
        input[i] = v;
      }
      iterate = input;
      for_each_line(dims, axis, [&](std::size_t start, std::size_t stride, std::size_t len) {
        line.resize(len);
        for (std::size_t k = 0; k < len; ++k) line[k] = iterate[start + k * stride];
        if (options.weights.empty()) {
          pava_inplace(line);
        } else {
          line_w.resize(len);
          for (std::size_t k = 0; k < len; ++k) line_w[k] = options.weights[start + k * stride];
          pava_inplace(line, line_w);
        }
        for (std::size_t k = 0; k < len; ++k) iterate[start + k * stride] = line[k];
      });
      double change = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(iterate[i]))
          throw NumericalError("lattice projection: non-finite iterate at sweep " +
                               std::to_string(sweep));
        residual[axis][i] = iterate[i] - input[i];
        change = std::max(change, std::abs(iterate[i] - previous[i]));
      }
      if (options.record_norms) out.norm_trace.push_back(weighted_norm(iterate, options.weights));

      const bool first_step = sweep == 1 && axis == 0;
      settled = (!first_step && change <= options.tol_mono) ? settled + 1 : 0;
      const double violation = lattice_max_violation(iterate, dims);
      out.max_violation = violation;
      if (violation <= options.tol_mono) {
        if (out.first_monotone_sweep == 0) out.first_monotone_sweep = sweep;
        // p - 1 unchanged steps in a row leave every residual unchanged: a fixed point.
        if (settled + 1 >= p) {
          out.converged = true;
          out.values = std::move(iterate);
          return out;
        }
      }
      previous = iterate;
    }
  }
  out.values = std::move(iterate);
  return out;
}

Proj2dReport project_surface(const SurfaceGrid& w, const Proj2dOptions& options) {
  const std::size_t dims[2] = {static_cast<std::size_t>(w.rows()),
                               static_cast<std::size_t>(w.cols())};
  const std::vector<double> flat = flatten(w.values());
  std::vector<double> flat_w;
  if (options.weights.size() > 0) {
    if (options.weights.rows() != w.rows() || options.weights.cols() != w.cols())
      throw ValidationError("surface projection: weight matrix shape mismatch");
    flat_w = flatten(options.weights);
  }
  LatticeOptions lo;
  lo.tol_mono = options.tol_mono;
  lo.max_iter = options.max_iter;
  lo.weights = flat_w;
  lo.record_norms = options.record_norms;
  LatticeProjection proj = project_lattice(flat, dims, lo);

  Proj2dReport report;
  report.result = w.with_values(unflatten(proj.values, w.rows(), w.cols()));
  report.iterations = proj.iterations;
  report.max_violation = proj.max_violation;
  report.converged = proj.converged;
  report.first_monotone_sweep = proj.first_monotone_sweep;
  report.norm_trace = std::move(proj.norm_trace);
  return report;
}

Proj2dReport project_surface(const SurfaceGrid& w, double tol_mono, std::size_t max_iter) {
  Proj2dOptions options;
  options.tol_mono = tol_mono;
  options.max_iter = max_iter;
  return project_surface(w, options);
}

MonotonicityCheck is_bimonotone(const SurfaceGrid& w, double tol) {
  const auto flat = flatten(w.values());
  const std::size_t dims[2] = {static_cast<std::size_t>(w.rows()),
                               static_cast<std::size_t>(w.cols())};
  MonotonicityCheck check;
  check.max_violation = lattice_max_violation(flat, dims);
  check.monotone = check.max_violation <= tol;
  return check;
}

SurfaceGrid upper_set_oracle(const SurfaceGrid& w, const Eigen::MatrixXd& weights) {
  const Eigen::Index rows = w.rows();
  const Eigen::Index cols = w.cols();
  const Eigen::Index n = rows * cols;
  if (n > 12) throw ValidationError("upper set oracle: grid has more than 12 cells");
  if (weights.size() > 0 && (weights.rows() != rows || weights.cols() != cols))
    throw ValidationError("upper set oracle: weight matrix shape mismatch");

  auto cell = [cols](Eigen::Index i, Eigen::Index j) { return i * cols + j; };
  std::vector<double> val(static_cast<std::size_t>(n));
  std::vector<double> mass(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      val[static_cast<std::size_t>(cell(i, j))] = w.values()(i, j);
      mass[static_cast<std::size_t>(cell(i, j))] = weights.size() > 0 ? weights(i, j) : 1.0;
    }

  // A set is a lower set when every member's immediate predecessors are members.
  const std::uint32_t full = (std::uint32_t{1} << n) - 1;
  std::vector<std::uint32_t> lower_sets;
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    bool closed = true;
    for (Eigen::Index i = 0; i < rows && closed; ++i)
      for (Eigen::Index j = 0; j < cols && closed; ++j) {
        if (!(mask >> cell(i, j) & 1U)) continue;
        if (i > 0 && !(mask >> cell(i - 1, j) & 1U)) closed = false;
        if (j > 0 && !(mask >> cell(i, j - 1) & 1U)) closed = false;
      }
    if (closed) lower_sets.push_back(mask);
  }
  // Upper sets are the complements of lower sets (plus the full set).
  std::vector<std::uint32_t> upper_sets{full};
  for (std::uint32_t l : lower_sets)
    if (l != full) upper_sets.push_back(full & ~l);

  auto average = [&](std::uint32_t set) {
    double num = 0.0;
    double den = 0.0;
    for (Eigen::Index c = 0; c < n; ++c)
      if (set >> c & 1U) {
        num += mass[static_cast<std::size_t>(c)] * val[static_cast<std::size_t>(c)];
        den += mass[static_cast<std::size_t>(c)];
      }
    return num / den;
  };

  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      const std::uint32_t bit = std::uint32_t{1} << cell(i, j);
      double best = std::numeric_limits<double>::infinity();
      for (std::uint32_t l : lower_sets) {
        if (!(l & bit)) continue;
        double worst = -std::numeric_limits<double>::infinity();
        for (std::uint32_t u : upper_sets)
          if (u & bit) worst = std::max(worst, average(l & u));
        best = std::min(best, worst);
      }
      out(i, j) = best;
    }
  return w.with_values(std::move(out));
}

}  // namespace monoproj
