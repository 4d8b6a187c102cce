#include "monoproj/pava.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "monoproj/error.hpp"

namespace monoproj {

GridFunction::GridFunction(std::vector<double> points, std::vector<double> values,
                           std::vector<double> weights)
    : points_(std::move(points)), values_(std::move(values)), weights_(std::move(weights)) {
  if (values_.empty()) throw ValidationError("grid function: empty input");
  if (points_.size() != values_.size())
    throw ValidationError("grid function: points and values differ in length");
  if (weights_.empty()) weights_.assign(values_.size(), 1.0);
  if (weights_.size() != values_.size())
    throw ValidationError("grid function: weights and values differ in length");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]))
      throw ValidationError("grid function: non-finite value at index " + std::to_string(i));
    if (!std::isfinite(points_[i]))
      throw ValidationError("grid function: non-finite point at index " + std::to_string(i));
    if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i]))
      throw ValidationError("grid function: weight at index " + std::to_string(i) +
                            " is not a positive finite number");
    if (i > 0 && !(points_[i - 1] < points_[i]))
      throw ValidationError("grid function: points not strictly increasing at index " +
                            std::to_string(i));
  }
}

GridFunction GridFunction::with_values(std::vector<double> values) const {
  return GridFunction(points_, std::move(values), weights_);
}

double GridFunction::weighted_mean() const {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    num += weights_[i] * values_[i];
    den += weights_[i];
  }
  return num / den;
}

void pava_inplace(std::span<double> values, std::span<const double> weights) {
  const std::size_t n = values.size();
  if (n < 2) return;
  const bool unit = weights.empty();

  // Stack of pooled blocks: mean, total weight, one-past-last index.
  struct Block {
    double mean;
    double weight;
    std::size_t end;
  };
  std::vector<Block> blocks;
  blocks.reserve(n);

  for (std::size_t i = 0; i < n; ++i) {
    Block cur{values[i], unit ? 1.0 : weights[i], i + 1};
    while (!blocks.empty() && blocks.back().mean > cur.mean) {
      const Block& prev = blocks.back();
      const double w = prev.weight + cur.weight;
      cur.mean = (prev.weight * prev.mean + cur.weight * cur.mean) / w;
      cur.weight = w;
      blocks.pop_back();
    }
    blocks.push_back(cur);
  }

  std::size_t begin = 0;
  for (const Block& b : blocks) {
    std::fill(values.begin() + static_cast<std::ptrdiff_t>(begin),
              values.begin() + static_cast<std::ptrdiff_t>(b.end), b.mean);
    begin = b.end;
  }
}

MonotoneGridFunction pava_project(const GridFunction& f) {
  std::vector<double> out = f.values();
  pava_inplace(out, f.weights());
  return MonotoneGridFunction(f.with_values(std::move(out)));
}

MonotoneGridFunction minmax_oracle(const GridFunction& f) {
  const std::size_t n = f.size();
  const auto& v = f.values();
  const auto& w = f.weights();

  // prefix sums: sum over [k, j] = s[j+1] - s[k]
  std::vector<double> sw(n + 1, 0.0);
  std::vector<double> swv(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    sw[i + 1] = sw[i] + w[i];
    swv[i + 1] = swv[i] + w[i] * v[i];
  }

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = i; j < n; ++j) {
      double worst = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k <= i; ++k) {
        const double avg = (swv[j + 1] - swv[k]) / (sw[j + 1] - sw[k]);
        worst = std::max(worst, avg);
      }
      best = std::min(best, worst);
    }
    out[i] = best;
  }
  return MonotoneGridFunction(f.with_values(std::move(out)));
}

namespace {

void require_same_grid(const GridFunction& f, const GridFunction& g) {
  if (f.points() != g.points()) throw ValidationError("grid functions live on different grids");
}

}  // namespace

double sup_distance(const GridFunction& f, const GridFunction& g) {
  require_same_grid(f, g);
  double d = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    d = std::max(d, std::abs(f.values()[i] - g.values()[i]));
  return d;
}

double weighted_l2_distance(const GridFunction& f, const GridFunction& g) {
  require_same_grid(f, g);
  if (f.weights() != g.weights()) throw ValidationError("grid functions carry different weights");
  double total = 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double d = f.values()[i] - g.values()[i];
    total += f.weights()[i];
    acc += f.weights()[i] * d * d;
  }
  return std::sqrt(acc / total);
}

}  // namespace monoproj
