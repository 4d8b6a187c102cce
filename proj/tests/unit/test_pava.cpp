#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "monoproj/error.hpp"
#include "monoproj/pava.hpp"
#include "oracles.hpp"

using namespace monoproj;

namespace {

std::vector<double> grid(std::size_t n) {
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<double>(i + 1) / static_cast<double>(n);
  return p;
}

GridFunction random_function(std::mt19937_64& rng, std::size_t n, bool weighted) {
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  std::vector<double> v(n);
  std::vector<double> w;
  for (auto& x : v) x = z(rng);
  if (weighted) {
    w.resize(n);
    for (auto& x : w) x = u(rng);
  }
  return GridFunction(grid(n), v, w);
}

void check_values(const std::vector<double>& got, const std::vector<double>& want, double tol) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(tol));
}

}  // namespace

TEST_CASE("pava examples") {
  check_values(pava_project(GridFunction(grid(3), {1, 2, 3})).values(), {1, 2, 3}, 1e-15);
  check_values(pava_project(GridFunction(grid(3), {3, 2, 1})).values(), {2, 2, 2}, 1e-15);
  check_values(pava_project(GridFunction(grid(3), {3, 1, 2})).values(), {2, 2, 2}, 1e-15);
  check_values(pava_project(GridFunction(grid(2), {4, 0}, {1, 3})).values(), {1, 1}, 1e-15);
  check_values(minmax_oracle(GridFunction(grid(2), {4, 0}, {1, 3})).values(), {1, 1}, 1e-15);
}

TEST_CASE("minmax oracle examples") {
  check_values(minmax_oracle(GridFunction(grid(3), {3, 1, 2})).values(), {2, 2, 2}, 1e-15);
  check_values(minmax_oracle(GridFunction({0.5}, {5})).values(), {5}, 1e-15);
  check_values(minmax_oracle(GridFunction(grid(2), {0, 1})).values(), {0, 1}, 1e-15);
}

TEST_CASE("pava keeps points and weights") {
  const GridFunction f({0.1, 0.2, 0.7}, {2, 1, 0}, {1, 2, 3});
  const auto p = pava_project(f);
  CHECK(p.points() == f.points());
  CHECK(p.weights() == f.weights());
}

TEST_CASE("grid function validation") {
  CHECK_THROWS_AS(GridFunction({}, {}), ValidationError);
  CHECK_THROWS_AS(GridFunction({0.1, 0.2}, {1}), ValidationError);
  CHECK_THROWS_AS(GridFunction({0.1, 0.2}, {1, NAN}), ValidationError);
  CHECK_THROWS_AS(GridFunction({0.1, 0.2}, {1, INFINITY}), ValidationError);
  CHECK_THROWS_AS(GridFunction({0.1, 0.2}, {1, 2}, {1, 0}), ValidationError);
  CHECK_THROWS_AS(GridFunction({0.1, 0.2}, {1, 2}, {1, -1}), ValidationError);
  CHECK_THROWS_AS(GridFunction({0.2, 0.2}, {1, 2}), ValidationError);
  CHECK_THROWS_AS(GridFunction({0.3, 0.2}, {1, 2}), ValidationError);
  CHECK_THROWS_AS(GridFunction({0.1, 0.2}, {1, 2}, {1}), ValidationError);
}

TEST_CASE("pava matches the min-max oracle on random weighted instances") {
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<std::size_t> size(1, 12);
  double worst = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const auto f = random_function(rng, size(rng), rep % 2 == 0);
    worst = std::max(worst, sup_distance(pava_project(f), minmax_oracle(f)));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("pava structural properties") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> size(1, 40);
  for (int rep = 0; rep < 300; ++rep) {
    const auto f = random_function(rng, size(rng), true);
    const auto p = pava_project(f);
    // monotone output
    for (std::size_t i = 1; i < p.size(); ++i) CHECK(p.values()[i - 1] <= p.values()[i]);
    // idempotence, exactly
    CHECK(pava_project(p).values() == p.values());
    // weighted mean preserved
    CHECK(std::abs(p.weighted_mean() - f.weighted_mean()) <= 1e-12);
    // every pooled block holds the weighted mean of its inputs
    std::size_t start = 0;
    for (std::size_t i = 1; i <= p.size(); ++i) {
      if (i < p.size() && p.values()[i] == p.values()[start]) continue;
      double num = 0.0;
      double den = 0.0;
      for (std::size_t k = start; k < i; ++k) {
        num += f.weights()[k] * f.values()[k];
        den += f.weights()[k];
      }
      CHECK(p.values()[start] == doctest::Approx(num / den).epsilon(1e-12));
      start = i;
    }
  }
}

TEST_CASE("monotone input is a fixed point; decreasing input collapses to the mean") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 100; ++rep) {
    auto f = random_function(rng, 15, true);
    std::vector<double> v = f.values();
    std::sort(v.begin(), v.end());
    const auto inc = f.with_values(v);
    CHECK(pava_project(inc).values() == inc.values());
    std::reverse(v.begin(), v.end());
    const auto dec = f.with_values(v);
    const double mean = dec.weighted_mean();
    const auto proj = pava_project(dec);
    for (double x : proj.values()) CHECK(x == doctest::Approx(mean).epsilon(1e-12));
  }
}

TEST_CASE("sup and weighted L2 contraction") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::size_t> size(1, 30);
  for (int rep = 0; rep < 500; ++rep) {
    const auto f = random_function(rng, size(rng), true);
    std::normal_distribution<double> z(0.0, 2.0);
    std::vector<double> gv(f.size());
    for (auto& x : gv) x = z(rng);
    const auto g = f.with_values(gv);
    const auto pf = pava_project(f);
    const auto pg = pava_project(g);
    CHECK(sup_distance(pf, pg) <= sup_distance(f, g) + 1e-12);
    CHECK(weighted_l2_distance(pf, pg) <= weighted_l2_distance(f, g) + 1e-12);
  }
}

TEST_CASE("distances") {
  const GridFunction f(grid(2), {0, 0});
  const GridFunction g(grid(2), {1, 3});
  CHECK(sup_distance(f, f) == 0.0);
  CHECK(sup_distance(f, g) == 3.0);
  const GridFunction a(grid(2), {0, 0}, {1, 5});
  const GridFunction b(grid(2), {1, 1}, {1, 5});
  CHECK(weighted_l2_distance(a, b) == doctest::Approx(1.0));
  CHECK(weighted_l2_distance(a, a) == 0.0);

  std::mt19937_64 rng(5);
  const auto r1 = random_function(rng, 20, true);
  const auto r2 = r1.with_values(random_function(rng, 20, false).values());
  double sup = 0.0;
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < 20; ++i) {
    const double d = r1.values()[i] - r2.values()[i];
    sup = std::max(sup, std::abs(d));
    num += r1.weights()[i] * d * d;
    den += r1.weights()[i];
  }
  CHECK(sup_distance(r1, r2) == doctest::Approx(sup).epsilon(1e-14));
  CHECK(weighted_l2_distance(r1, r2) == doctest::Approx(std::sqrt(num / den)).epsilon(1e-12));

  CHECK_THROWS_AS(sup_distance(f, GridFunction(grid(3), {0, 0, 0})), ValidationError);
  CHECK_THROWS_AS(sup_distance(f, GridFunction({0.1, 0.9}, {0, 0})), ValidationError);
  CHECK_THROWS_AS(weighted_l2_distance(a, f), ValidationError);
}

TEST_CASE("pava objective beats random monotone competitors") {
  std::mt19937_64 rng(1234);
  std::uniform_int_distribution<std::size_t> size(2, 10);
  std::normal_distribution<double> z(0.0, 0.3);
  for (int rep = 0; rep < 1000; ++rep) {
    const auto f = random_function(rng, size(rng), true);
    const auto p = pava_project(f);
    const double best = oracle::weighted_sse(f.values(), p.values(), f.weights());
    std::vector<double> trial(p.size());
    bool ok = true;
    for (int k = 0; k < 10000 && ok; ++k) {
      for (std::size_t i = 0; i < trial.size(); ++i) trial[i] = p.values()[i] + z(rng);
      std::sort(trial.begin(), trial.end());
      ok = best <= oracle::weighted_sse(f.values(), trial, f.weights()) + 1e-12;
    }
    REQUIRE(ok);
  }
}

TEST_CASE("pava_inplace on long inputs matches pava_project") {
  std::mt19937_64 rng(8);
  const auto f = random_function(rng, 5000, true);
  std::vector<double> v = f.values();
  pava_inplace(v, f.weights());
  CHECK(v == pava_project(f).values());
}
