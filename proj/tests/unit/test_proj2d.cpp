#include <doctest.h>

#include <cmath>
#include <random>

#include "monoproj/error.hpp"
#include "monoproj/proj2d.hpp"
#include "oracles.hpp"

using namespace monoproj;

namespace {

Eigen::MatrixXd mat(std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = z(rng);
  return m;
}

double frob_inner(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a.array() * b.array()).sum();
}

}  // namespace

TEST_CASE("bimonotone input is returned after one sweep") {
  const auto w = SurfaceGrid::from_matrix(mat({{0, 1}, {2, 3}}));
  const auto r = project_surface(w);
  CHECK(r.iterations == 1);
  CHECK(r.converged);
  CHECK(r.max_violation == 0.0);
  CHECK(r.result.values() == w.values());
}

TEST_CASE("hand case [[1,0],[0,1]]") {
  const auto w = SurfaceGrid::from_matrix(mat({{1, 0}, {0, 1}}));
  const Eigen::MatrixXd want = mat({{1.0 / 3, 1.0 / 3}, {1.0 / 3, 1}});
  const auto r = project_surface(w);
  CHECK(r.converged);
  CHECK((r.result.values() - want).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK((upper_set_oracle(w).values() - want).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("upper set oracle examples") {
  const auto mono = SurfaceGrid::from_matrix(mat({{0, 1, 1}, {2, 3, 5}}));
  CHECK((upper_set_oracle(mono).values() - mono.values()).cwiseAbs().maxCoeff() <= 1e-15);
  const auto flat = SurfaceGrid::from_matrix(Eigen::MatrixXd::Constant(3, 3, 2.5));
  CHECK((upper_set_oracle(flat).values().array() - 2.5).abs().maxCoeff() <= 1e-15);
  CHECK_THROWS_AS(upper_set_oracle(SurfaceGrid::from_matrix(Eigen::MatrixXd::Zero(4, 4))),
                  ValidationError);
}

TEST_CASE("upper set oracle reduces to pava on a single row") {
  const auto w = SurfaceGrid::from_matrix(mat({{3, 1, 2}}));
  const auto r = upper_set_oracle(w);
  for (Eigen::Index j = 0; j < 3; ++j) CHECK(r.values()(0, j) == doctest::Approx(2.0));
}

TEST_CASE("projection matches the oracle on random small grids") {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> dim(1, 3);
  std::uniform_real_distribution<double> mass(0.2, 2.0);
  double worst = 0.0;
  double worst_weighted = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const auto w = SurfaceGrid::from_matrix(random_matrix(rng, dim(rng), dim(rng)));
    const auto r = project_surface(w);
    REQUIRE(r.converged);
    worst = std::max(worst, (r.result.values() - upper_set_oracle(w).values()).cwiseAbs().maxCoeff());

    Proj2dOptions opt;
    opt.weights = Eigen::MatrixXd(w.rows(), w.cols());
    for (Eigen::Index i = 0; i < opt.weights.size(); ++i) opt.weights.data()[i] = mass(rng);
    const auto rw = project_surface(w, opt);
    REQUIRE(rw.converged);
    worst_weighted = std::max(
        worst_weighted,
        (rw.result.values() - upper_set_oracle(w, opt.weights).values()).cwiseAbs().maxCoeff());
  }
  CHECK(worst <= 1e-6);
  CHECK(worst_weighted <= 1e-6);
}

TEST_CASE("is_bimonotone") {
  auto c = is_bimonotone(SurfaceGrid::from_matrix(mat({{0, 1}, {1, 2}})), 0.0);
  CHECK(c.monotone);
  CHECK(c.max_violation == 0.0);
  c = is_bimonotone(SurfaceGrid::from_matrix(mat({{1, 0}, {0, 1}})), 1e-8);
  CHECK_FALSE(c.monotone);
  CHECK(c.max_violation == 1.0);
  // each line along t sorted, but the columns (along s) decrease
  c = is_bimonotone(SurfaceGrid::from_matrix(mat({{2, 3}, {0, 1}})), 1e-8);
  CHECK_FALSE(c.monotone);
  CHECK(c.max_violation == 2.0);
}

TEST_CASE("norm chain and limit orthogonality on 16x16 grids") {
  std::mt19937_64 rng(16);
  for (int rep = 0; rep < 20; ++rep) {
    const auto w = SurfaceGrid::from_matrix(random_matrix(rng, 16, 16));
    Proj2dOptions opt;
    opt.record_norms = true;
    const auto r = project_surface(w, opt);
    REQUIRE(r.converged);
    for (std::size_t k = 1; k < r.norm_trace.size(); ++k)
      CHECK(r.norm_trace[k] <= r.norm_trace[k - 1] + 1e-10);
    const Eigen::MatrixXd p = r.result.values();
    const Eigen::MatrixXd resid = w.values() - p;
    CHECK(std::abs(frob_inner(resid, p)) <= 1e-6 * w.values().squaredNorm());
    // dual cone: <w - P w, v> <= 0 for monotone v; the constants give equality
    CHECK(std::abs(resid.sum()) <= 1e-6 * w.values().squaredNorm());
    for (int k = 0; k < 20; ++k) {
      Eigen::MatrixXd v(16, 16);
      std::mt19937_64 vr(static_cast<std::uint64_t>(rep * 100 + k));
      const auto flat = oracle::smooth_bimonotone(16, 16, vr);
      for (Eigen::Index i = 0; i < 16; ++i)
        for (Eigen::Index j = 0; j < 16; ++j) v(i, j) = flat[static_cast<std::size_t>(i * 16 + j)];
      CHECK(frob_inner(resid, v) <= 1e-6 * w.values().squaredNorm());
    }
  }
}

TEST_CASE("sup-norm contraction across pairs") {
  std::mt19937_64 rng(77);
  for (int rep = 0; rep < 100; ++rep) {
    const auto a = SurfaceGrid::from_matrix(random_matrix(rng, 5, 4));
    const auto b = SurfaceGrid::from_matrix(random_matrix(rng, 5, 4));
    const auto pa = project_surface(a, 1e-12, 100000);
    const auto pb = project_surface(b, 1e-12, 100000);
    REQUIRE(pa.converged);
    REQUIRE(pb.converged);
    const double lhs = (pa.result.values() - pb.result.values()).cwiseAbs().maxCoeff();
    const double rhs = (a.values() - b.values()).cwiseAbs().maxCoeff();
    CHECK(lhs <= rhs + 1e-10);
  }
}

TEST_CASE("the first monotone iterate is recorded separately") {
  const auto w = SurfaceGrid::from_matrix(mat({{1, 0}, {0, 1}}));
  const auto r = project_surface(w);
  CHECK(r.first_monotone_sweep == 1);
  CHECK(r.iterations > 1);
}

TEST_CASE("iteration cap reports non-convergence") {
  std::mt19937_64 rng(1);
  const auto w = SurfaceGrid::from_matrix(random_matrix(rng, 20, 20));
  const auto r = project_surface(w, 1e-14, 2);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 2);
}

TEST_CASE("surface grid validation and options") {
  CHECK_THROWS_AS(SurfaceGrid({0, 1}, {0, 1}, Eigen::MatrixXd::Zero(3, 2)), ValidationError);
  CHECK_THROWS_AS(SurfaceGrid({1, 0}, {0, 1}, Eigen::MatrixXd::Zero(2, 2)), ValidationError);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 2);
  bad(0, 1) = NAN;
  CHECK_THROWS_AS(SurfaceGrid({0, 1}, {0, 1}, bad), ValidationError);
  const auto w = SurfaceGrid::from_matrix(Eigen::MatrixXd::Zero(2, 2));
  CHECK_THROWS_AS(project_surface(w, 0.0, 10), ValidationError);
  CHECK_THROWS_AS(project_surface(w, 1e-8, 0), ValidationError);
}

TEST_CASE("three-axis lattice projection satisfies the optimality conditions") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z(0.0, 1.0);
  const std::size_t dims[3] = {4, 5, 3};
  std::vector<double> w(60);
  for (auto& x : w) x = z(rng);
  LatticeOptions opt;
  opt.tol_mono = 1e-10;
  opt.max_iter = 100000;
  const auto r = project_lattice(w, dims, opt);
  REQUIRE(r.converged);
  CHECK(lattice_max_violation(r.values, dims) <= 1e-10);
  double inner = 0.0;
  double total = 0.0;
  double norm2 = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    inner += (w[i] - r.values[i]) * r.values[i];
    total += w[i] - r.values[i];
    norm2 += w[i] * w[i];
  }
  CHECK(std::abs(inner) <= 1e-6 * norm2);
  CHECK(std::abs(total) <= 1e-6 * norm2);
  // dual cone against monotone indicator functions of upper sets {x >= c}
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 5; ++b)
      for (std::size_t c = 0; c < 3; ++c) {
        double s = 0.0;
        for (std::size_t i = a; i < 4; ++i)
          for (std::size_t j = b; j < 5; ++j)
            for (std::size_t k = c; k < 3; ++k) {
              const std::size_t idx = (i * 5 + j) * 3 + k;
              s += w[idx] - r.values[idx];
            }
        CHECK(s <= 1e-6);
      }
}
