#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "grfopt/errors.hpp"
#include "grfopt/gaussian.hpp"

using namespace grfopt;

TEST_CASE("cholesky of the identity needs no jitter") {
  const Matrix eye = Matrix::Identity(3, 3);
  const auto f = cholesky_psd(eye, JitterPolicy{});
  CHECK(f.jitter == 0.0);
  CHECK((f.lower - eye).norm() == 0.0);
}

TEST_CASE("rank one PSD matrix factors with a small jitter") {
  Matrix a(2, 2);
  a << 1, 1, 1, 1;
  const auto f = cholesky_psd(a, JitterPolicy::escalating(1e-12, 1e-6));
  CHECK(f.jitter > 0.0);
  CHECK(f.jitter <= 1e-6);
  const Matrix rebuilt = f.lower * f.lower.transpose();
  CHECK((rebuilt - a - f.jitter * Matrix::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("indefinite matrix is rejected") {
  Matrix a(2, 2);
  a << 1, 2, 2, 1;
  CHECK_THROWS_AS(cholesky_psd(a, JitterPolicy{}), NotPsdError);
  CHECK_THROWS_AS(cholesky_psd(a, JitterPolicy::none()), NotPsdError);
}

TEST_CASE("conditioning on an independent block changes nothing") {
  Vector mu1(2), mu2(2), obs(2);
  mu1 << 1, 2;
  mu2 << -1, 3;
  obs << 5, 7;
  Matrix s11 = Matrix::Identity(2, 2);
  Matrix s12 = Matrix::Zero(2, 2);
  Matrix s22(2, 2);
  s22 << 2, 0.5, 0.5, 1;
  const auto r = condition(mu1, mu2, s11, s12, s22, obs);
  CHECK((r.cond_mean - mu2).norm() == 0.0);
  CHECK((r.cond_cov - s22).norm() == 0.0);
  CHECK_FALSE(r.rank_deficient);
}

TEST_CASE("bivariate normal with correlation 0.6") {
  const Vector zero = Vector::Zero(1);
  Matrix s11(1, 1), s12(1, 1), s22(1, 1);
  s11 << 1;
  s12 << 0.6;
  s22 << 1;
  Vector obs(1);
  obs << 2;
  const auto r = condition(zero, zero, s11, s12, s22, obs);
  CHECK(r.cond_mean(0) == doctest::Approx(1.2).epsilon(1e-15));
  CHECK(r.cond_cov(0, 0) == doctest::Approx(0.64).epsilon(1e-15));
}

TEST_CASE("singular history falls back to the pseudo-inverse when allowed") {
  Matrix s11(2, 2);
  s11 << 1, 1, 1, 1;
  Matrix s12(2, 1);
  s12 << 0.5, 0.5;
  Matrix s22(1, 1);
  s22 << 1;
  Vector obs(2);
  obs << 1, 1;
  JitterPolicy p = JitterPolicy::none();
  CHECK_THROWS_AS(condition(Vector::Zero(2), Vector::Zero(1), s11, s12, s22, obs, p), NotPsdError);
  p.pseudo_inverse_fallback = true;
  const auto r = condition(Vector::Zero(2), Vector::Zero(1), s11, s12, s22, obs, p);
  CHECK(r.rank_deficient);
  // pinv([[1,1],[1,1]]) = [[1,1],[1,1]] / 4
  CHECK(r.cond_mean(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.cond_cov(0, 0) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("non-finite inputs are an argument error") {
  Matrix s(1, 1);
  s << 1;
  Vector obs(1);
  obs << std::nan("");
  CHECK_THROWS_AS(condition(Vector::Zero(1), Vector::Zero(1), s, s, s, obs), ArgumentError);
}

TEST_CASE("solve is exact on an invertible matrix") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> dist;
  Matrix b(6, 6);
  for (Eigen::Index i = 0; i < 6; ++i)
    for (Eigen::Index j = 0; j < 6; ++j) b(i, j) = dist(rng);
  const Matrix a = b * b.transpose() + 0.1 * Matrix::Identity(6, 6);
  Vector rhs(6);
  for (Eigen::Index i = 0; i < 6; ++i) rhs(i) = dist(rng);
  const auto f = cholesky_psd(a, JitterPolicy::none());
  const Vector x = cholesky_solve(f, rhs);
  CHECK((a * x - rhs).norm() <= 1e-9 * rhs.norm());
}

TEST_CASE("sequential conditioning equals joint conditioning") {
  // squared-exponential process on three points of the line
  const double t[3] = {0.0, 0.7, 1.5};
  Matrix k(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) k(i, j) = std::exp(-0.5 * (t[i] - t[j]) * (t[i] - t[j]));
  const double y0 = 0.3;
  const double y1 = -0.8;

  Vector obs(2);
  obs << y0, y1;
  const auto joint = condition(Vector::Zero(2), Vector::Zero(1), k.topLeftCorner(2, 2),
                               k.block(0, 2, 2, 1), k.block(2, 2, 1, 1), obs, JitterPolicy::none());

  // condition (x1, x2) on x0, then x2 on x1
  Vector o0(1);
  o0 << y0;
  const auto first = condition(Vector::Zero(1), Vector::Zero(2), k.block(0, 0, 1, 1),
                               k.block(0, 1, 1, 2), k.block(1, 1, 2, 2), o0, JitterPolicy::none());
  Vector o1(1);
  o1 << y1;
  const auto second = condition(first.cond_mean.head(1), first.cond_mean.tail(1),
                                first.cond_cov.block(0, 0, 1, 1), first.cond_cov.block(0, 1, 1, 1),
                                first.cond_cov.block(1, 1, 1, 1), o1, JitterPolicy::none());
  CHECK(std::abs(second.cond_mean(0) - joint.cond_mean(0)) < 1e-10);
  CHECK(std::abs(second.cond_cov(0, 0) - joint.cond_cov(0, 0)) < 1e-10);
}

TEST_CASE("conditional covariance is symmetric with clamped diagonal") {
  Matrix s11(2, 2);
  s11 << 2, 0.3, 0.3, 1;
  Matrix s12(2, 2);
  s12 << 0.2, 1.0, 0.4, -0.1;
  Matrix s22(2, 2);
  s22 << 1.5, 0.2, 0.2, 0.6;
  const auto r = condition(Vector::Zero(2), Vector::Zero(2), s11, s12, s22, Vector::Ones(2));
  CHECK((r.cond_cov - r.cond_cov.transpose()).norm() <= 1e-12);
  CHECK(r.cond_cov.diagonal().minCoeff() >= 0.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Eigen::MatrixXd(r.cond_cov.eval()));
  CHECK(eig.eigenvalues().minCoeff() >= -1e-12);
}

TEST_CASE("zero covariance returns the mean exactly") {
  RandomStream rng(1, 2);
  Vector mean(3);
  mean << 0.1, -2.0, 3.5;
  const Vector x = sample_mvn(mean, Matrix::Zero(3, 3), rng);
  CHECK(x(0) == 0.1);
  CHECK(x(1) == -2.0);
  CHECK(x(2) == 3.5);
}

TEST_CASE("chi-square mean matches its degrees of freedom") {
  RandomStream rng(5, 0);
  const int draws = 100000;
  for (double k : {1.0, 7.5, 1e9}) {
    double sum = 0.0;
    for (int i = 0; i < draws; ++i) sum += sample_chi_square(k, rng);
    const double mean = sum / draws;
    CHECK(std::abs(mean - k) <= 4.0 * std::sqrt(2.0 * k / draws));
  }
  CHECK_THROWS_AS(sample_chi_square(0.0, rng), ArgumentError);
}

TEST_CASE("standard bivariate normal has identity covariance") {
  RandomStream rng(9, 4);
  const int draws = 100000;
  const Vector mean = Vector::Zero(2);
  const Matrix cov = Matrix::Identity(2, 2);
  double s00 = 0, s11 = 0, s01 = 0;
  for (int i = 0; i < draws; ++i) {
    const Vector x = sample_mvn(mean, cov, rng);
    s00 += x(0) * x(0);
    s11 += x(1) * x(1);
    s01 += x(0) * x(1);
  }
  // se of a sample variance ~ sqrt(2 / M), of a sample covariance ~ sqrt(1 / M)
  CHECK(std::abs(s00 / draws - 1.0) <= 4.0 * std::sqrt(2.0 / draws));
  CHECK(std::abs(s11 / draws - 1.0) <= 4.0 * std::sqrt(2.0 / draws));
  CHECK(std::abs(s01 / draws) <= 4.0 * std::sqrt(1.0 / draws));
}

TEST_CASE("streams replay and differ by id") {
  RandomStream a(42, 7), b(42, 7), c(42, 8);
  const double xa = a.normal();
  CHECK(xa == b.normal());
  CHECK(xa != c.normal());
}
