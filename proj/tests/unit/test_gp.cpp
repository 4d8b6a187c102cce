#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "monoproj/error.hpp"
#include "monoproj/gp.hpp"
#include "oracles.hpp"

using namespace monoproj;

namespace {

Eigen::MatrixXd random_points(std::mt19937_64& rng, Eigen::Index n, Eigen::Index d) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = u(rng);
  return x;
}

double log_normal_density(const Eigen::VectorXd& y, const Eigen::MatrixXd& c) {
  const Eigen::LLT<Eigen::MatrixXd> llt(c);
  const Eigen::VectorXd a = llt.matrixL().solve(y);
  const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return -0.5 * (a.squaredNorm() + logdet + static_cast<double>(y.size()) * std::log(2.0 * M_PI));
}

}  // namespace

TEST_CASE("se kernel closed form") {
  KernelParams p{2.0, {1.0}};
  const double a[1] = {0.3};
  const double b[1] = {1.3};
  CHECK(se_kernel(a, a, p) == doctest::Approx(0.5));
  p.beta = 1.0;
  CHECK(se_kernel(a, b, p) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(se_kernel(a, b, p) == doctest::Approx(0.367879).epsilon(1e-6));
  p.gammas = {1e-12};
  CHECK(se_kernel(a, b, p) == doctest::Approx(1.0).epsilon(1e-10));
  const double c2[2] = {0.0, 0.0};
  CHECK_THROWS_AS(se_kernel(a, c2, p), ValidationError);
  CHECK_THROWS_AS(se_kernel(a, b, KernelParams{0.0, {1.0}}), ValidationError);
  CHECK_THROWS_AS(se_kernel(a, b, KernelParams{1.0, {-1.0}}), ValidationError);
}

TEST_CASE("se kernel is stationary") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z(0.0, 3.0);
  const KernelParams p{0.7, {0.4, 2.0}};
  for (int rep = 0; rep < 200; ++rep) {
    double a[2] = {z(rng), z(rng)};
    double b[2] = {z(rng), z(rng)};
    const double before = se_kernel(a, b, p);
    const double shift[2] = {z(rng), z(rng)};
    for (int k = 0; k < 2; ++k) {
      a[k] += shift[k];
      b[k] += shift[k];
    }
    CHECK(se_kernel(a, b, p) == doctest::Approx(before).epsilon(1e-9));
  }
}

TEST_CASE("gram matrix") {
  const KernelParams p{4.0, {3.0, 0.5}};
  Eigen::MatrixXd one(1, 2);
  one << 0.2, 0.4;
  const auto k1 = gram_matrix(one, p, 0.01);
  CHECK(k1(0, 0) == doctest::Approx(0.25 + 0.01));

  std::mt19937_64 rng(5);
  const Eigen::MatrixXd x = random_points(rng, 5, 2);
  const Eigen::MatrixXd k = gram_matrix(x, p);
  CHECK((k - oracle::se_gram(x, p.beta, p.gammas)).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((k - k.transpose()).cwiseAbs().maxCoeff() == 0.0);

  const Eigen::MatrixXd big = random_points(rng, 60, 2);
  const Eigen::MatrixXd kb = gram_matrix(big, KernelParams{1.0, {1.0, 1.0}});
  CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(kb).eigenvalues().minCoeff() >= -1e-8);

  // duplicated points: singular, factorization needs a nugget
  Eigen::MatrixXd dup(2, 1);
  dup << 0.5, 0.5;
  const Eigen::MatrixXd kd = gram_matrix(dup, KernelParams{1.0, {1.0}});
  const auto chol = jittered_cholesky(kd, 1.0);
  CHECK(chol.nugget > 0.0);
  CHECK(chol.nugget <= 1e-4);
  CHECK_THROWS_AS(jittered_cholesky(-Eigen::MatrixXd::Identity(2, 2), 1.0), NumericalError);
}

TEST_CASE("latent conditional matches the dense formula") {
  std::mt19937_64 rng(9);
  const KernelParams p{1.5, {4.0}};
  const Eigen::MatrixXd x = random_points(rng, 3, 1);
  const Eigen::VectorXd y = Eigen::VectorXd::Random(3);
  const auto state = latent_conditional(y, x, p, 0.3);
  const auto ref = oracle::dense_conditional(oracle::se_gram(x, p.beta, p.gammas),
                                             Eigen::VectorXd::Constant(3, 0.09), y);
  CHECK((state.mean() - ref.mean).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((state.covariance() - ref.cov).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("latent conditional limits") {
  std::mt19937_64 rng(10);
  const KernelParams p{1.0, {2.0}};
  Eigen::MatrixXd x(4, 1);
  x << 0.0, 0.3, 0.6, 0.9;
  const Eigen::VectorXd y = Eigen::VectorXd::Random(4);
  CHECK(latent_conditional(y, x, p, 1e4).mean().cwiseAbs().maxCoeff() <= 1e-6);
  CHECK((latent_conditional(y, x, p, 1e-4).mean() - y).cwiseAbs().maxCoeff() <= 1e-4);
  CHECK_THROWS_AS(latent_conditional(y, x, p, 0.0), ValidationError);
  CHECK_THROWS_AS(latent_conditional(Eigen::VectorXd::Zero(3), x, p, 1.0), ValidationError);
}

TEST_CASE("latent conditional is invariant to reordering") {
  std::mt19937_64 rng(11);
  const KernelParams p{0.8, {1.0, 3.0}};
  const Eigen::MatrixXd x = random_points(rng, 12, 2);
  const Eigen::VectorXd y = Eigen::VectorXd::Random(12);
  std::vector<int> perm(12);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Eigen::MatrixXd xp(12, 2);
  Eigen::VectorXd yp(12);
  for (int i = 0; i < 12; ++i) {
    xp.row(i) = x.row(perm[static_cast<std::size_t>(i)]);
    yp(i) = y(perm[static_cast<std::size_t>(i)]);
  }
  const auto a = latent_conditional(y, x, p, 0.2);
  const auto b = latent_conditional(yp, xp, p, 0.2);
  for (int i = 0; i < 12; ++i) {
    const int pi = perm[static_cast<std::size_t>(i)];
    CHECK(std::abs(b.mean()(i) - a.mean()(pi)) <= 1e-8);
    for (int j = 0; j < 12; ++j)
      CHECK(std::abs(b.covariance()(i, j) - a.covariance()(pi, perm[static_cast<std::size_t>(j)])) <=
            1e-8);
  }
}

TEST_CASE("gaussian state sampling moments") {
  Eigen::MatrixXd cov(2, 2);
  cov << 1.0, 0.6, 0.6, 2.0;
  const GaussianState s(Eigen::Vector2d(1.0, -1.0), cov);
  Rng rng(3);
  const int n = 20000;
  Eigen::Vector2d m = Eigen::Vector2d::Zero();
  Eigen::Matrix2d c = Eigen::Matrix2d::Zero();
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd d = s.sample(rng);
    m += d;
    c += (d - s.mean()) * (d - s.mean()).transpose();
  }
  m /= n;
  c /= n;
  CHECK(std::abs(m(0) - 1.0) <= 4.0 * std::sqrt(1.0 / n));
  CHECK(std::abs(m(1) + 1.0) <= 4.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(c(0, 1) - 0.6) <= 0.05);
  CHECK(std::abs(c(1, 1) - 2.0) <= 0.1);
}

TEST_CASE("predict_grid") {
  const KernelParams p{2.0, {5.0}};
  Eigen::MatrixXd x(5, 1);
  x << 0.0, 0.25, 0.5, 0.75, 1.0;
  Rng rng(21);
  const GaussianState prior(Eigen::VectorXd::Zero(5), gram_matrix(x, p));

  SUBCASE("grid equal to the design returns the draw") {
    const Eigen::VectorXd w = prior.sample(rng);
    const auto out = predict_grid({w}, x, x, p, rng);
    CHECK((out.front() - w).cwiseAbs().maxCoeff() <= 1e-3);
  }

  SUBCASE("far point decorrelates") {
    Eigen::MatrixXd far(1, 1);
    far << 50.0;
    const Eigen::VectorXd w = prior.sample(rng);
    std::vector<Eigen::VectorXd> draws(4000, w);
    const auto out = predict_grid(draws, x, far, p, rng);
    double m = 0.0;
    double v = 0.0;
    for (const auto& o : out) m += o(0);
    m /= static_cast<double>(out.size());
    for (const auto& o : out) v += (o(0) - m) * (o(0) - m);
    v /= static_cast<double>(out.size() - 1);
    CHECK(std::abs(m) <= 4.0 * std::sqrt(0.5 / 4000.0));
    CHECK(v == doctest::Approx(0.5).epsilon(0.08));
  }

  SUBCASE("dense grid covariance matches the closed form") {
    Eigen::MatrixXd g(3, 1);
    g << 0.1, 0.4, 0.6;
    const Eigen::VectorXd w = prior.sample(rng);
    const int n = 4000;
    std::vector<Eigen::VectorXd> draws(n, w);
    const auto out = predict_grid(draws, x, g, p, rng);
    const Eigen::MatrixXd kxx = gram_matrix(x, p);
    const Eigen::MatrixXd kgx = cross_gram(g, x, p);
    const Eigen::MatrixXd kgg = gram_matrix(g, p);
    const Eigen::MatrixXd inv = kxx.fullPivLu().inverse();
    const Eigen::VectorXd mean = kgx * inv * w;
    const Eigen::MatrixXd cov = kgg - kgx * inv * kgx.transpose();
    Eigen::Vector3d m = Eigen::Vector3d::Zero();
    for (const auto& o : out) m += o;
    m /= n;
    Eigen::Matrix3d c = Eigen::Matrix3d::Zero();
    for (const auto& o : out) c += (o - m) * (o - m).transpose();
    c /= n - 1;
    for (int i = 0; i < 3; ++i) {
      CHECK(std::abs(m(i) - mean(i)) <= 4.0 * std::sqrt(cov(i, i) / n) + 1e-6);
      for (int j = 0; j < 3; ++j) {
        const double se = std::sqrt((cov(i, i) * cov(j, j) + cov(i, j) * cov(i, j)) / n);
        CHECK(std::abs(c(i, j) - cov(i, j)) <= 4.0 * se + 1e-6);
      }
    }
  }
}

TEST_CASE("domain map") {
  Eigen::MatrixXd x(3, 2);
  x << 1.0, 5.0, 3.0, 5.0, 2.0, 5.0;
  const auto map = DomainMap::fit(x);
  const Eigen::MatrixXd u = map.to_unit(x);
  CHECK(u(0, 0) == 0.0);
  CHECK(u(1, 0) == 1.0);
  CHECK(u(2, 0) == 0.5);
  CHECK(u(0, 1) == 0.5);
  CHECK((map.from_unit(map.to_unit(x)) - x).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("lattice detection") {
  const Lattice lat({{0.0, 1.0, 2.0}, {5.0, 6.0}});
  CHECK(lat.size() == 6);
  CHECK(lat.shape() == std::vector<std::size_t>{3, 2});
  const Eigen::MatrixXd pts = lat.points();
  CHECK(pts(1, 0) == 0.0);
  CHECK(pts(1, 1) == 6.0);
  const auto again = Lattice::detect(pts);
  REQUIRE(again.has_value());
  CHECK(again->axes() == lat.axes());
  Eigen::MatrixXd swapped = pts;
  swapped.row(0).swap(swapped.row(1));
  CHECK_FALSE(Lattice::detect(swapped).has_value());
  Eigen::MatrixXd one(3, 1);
  one << 0.1, 0.5, 0.7;
  CHECK(Lattice::detect(one).has_value());
  one(2, 0) = 0.5;
  CHECK_FALSE(Lattice::detect(one).has_value());
}

TEST_CASE("spectral Gram agrees with dense computations") {
  const Lattice lat({{0.0, 0.2, 0.5, 1.0}, {0.0, 0.3, 0.9}});
  const std::vector<double> gammas{3.0, 1.5};
  const SpectralGram sg(lat, gammas);
  const Eigen::MatrixXd x = lat.points();
  const Eigen::MatrixXd k = oracle::se_gram(x, 1.0, gammas);
  CHECK(sg.eigenvalues().sum() == doctest::Approx(k.trace()).epsilon(1e-12));

  Eigen::VectorXd y(12);
  for (int i = 0; i < 12; ++i) y(i) = std::sin(1.0 + i);
  CHECK((sg.unrotate(sg.rotate(y)) - y).cwiseAbs().maxCoeff() <= 1e-12);

  const double beta = 2.5;
  const double nv = 0.3;
  const Eigen::VectorXd r = sg.rotate(y);
  Eigen::MatrixXd c = k / beta;
  c.diagonal().array() += nv;
  CHECK(sg.log_marginal(r, beta, nv) == doctest::Approx(log_normal_density(y, c)).epsilon(1e-10));
  CHECK(dense_log_marginal(y, k, beta, Eigen::VectorXd::Constant(12, nv)) ==
        doctest::Approx(log_normal_density(y, c)).epsilon(1e-10));

  const auto ref = oracle::dense_conditional(k / beta, Eigen::VectorXd::Constant(12, nv), y);
  CHECK((sg.latent_mean(r, beta, nv) - ref.mean).cwiseAbs().maxCoeff() <= 1e-10);

  Rng rng(4);
  const int n = 20000;
  Eigen::VectorXd m = Eigen::VectorXd::Zero(12);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(12);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd d = sg.sample_latent(r, beta, nv, rng);
    m += d;
    v += (d - ref.mean).cwiseAbs2();
  }
  m /= n;
  v /= n;
  for (int i = 0; i < 12; ++i) {
    CHECK(std::abs(m(i) - ref.mean(i)) <= 4.0 * std::sqrt(ref.cov(i, i) / n));
    CHECK(v(i) == doctest::Approx(ref.cov(i, i)).epsilon(0.06));
  }
}
