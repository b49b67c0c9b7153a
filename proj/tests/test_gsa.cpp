#include <doctest.h>

#include <cmath>
#include <random>

#include "grfopt/errors.hpp"
#include "grfopt/gsa.hpp"

using namespace grfopt;

namespace {

// Information of a run given explicit x0 and gradients.
InfoView make_info(const Eigen::VectorXd& x0, const std::vector<Eigen::VectorXd>& grads,
                   const std::vector<double>& f) {
  const auto n = grads.size();
  Matrix gram(n, n);
  std::vector<double> x0g(n);
  for (std::size_t k = 0; k < n; ++k) {
    x0g[k] = x0.dot(grads[k]);
    for (std::size_t l = 0; l < n; ++l) gram(k, l) = grads[k].dot(grads[l]);
  }
  return InfoView(f, gram, x0g, x0.squaredNorm());
}

InfoView flat_info(std::size_t n, double g = 1.0) {
  return InfoView(std::vector<double>(n, 0.0), Matrix::Identity(n, n) * g, std::vector<double>(n, 0.0),
                  1.0);
}

struct Quadratic {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  double value(const Eigen::VectorXd& x) const { return 0.5 * x.dot(a * x) - b.dot(x); }
  Eigen::VectorXd grad(const Eigen::VectorXd& x) const { return a * x - b; }
};

Quadratic test_quadratic() {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> d;
  Eigen::MatrixXd m(5, 5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) m(i, j) = d(rng);
  Quadratic q;
  q.a = m * m.transpose() / 5.0 + 0.2 * Eigen::MatrixXd::Identity(5, 5);
  q.b = Eigen::VectorXd(5);
  for (int i = 0; i < 5; ++i) q.b(i) = d(rng);
  return q;
}

// Iterates of the prefactor form: x_n = h_x x0 + sum_k h_g[k] grad f(x_k).
std::vector<Eigen::VectorXd> unrolled(const GsaSpec& gsa, const Quadratic& q,
                                      const Eigen::VectorXd& x0, int steps) {
  std::vector<Eigen::VectorXd> xs{x0};
  std::vector<Eigen::VectorXd> grads{q.grad(x0)};
  std::vector<double> fs{q.value(x0)};
  for (int n = 1; n <= steps; ++n) {
    const PrefactorRow row = gsa.prefactors(n, make_info(x0, grads, fs));
    Eigen::VectorXd x = row.h_x * x0;
    for (int k = 0; k < n; ++k) x += row.h_g[k] * grads[k];
    xs.push_back(x);
    grads.push_back(q.grad(x));
    fs.push_back(q.value(x));
  }
  return xs;
}

void check_same(const std::vector<Eigen::VectorXd>& a, const std::vector<Eigen::VectorXd>& b) {
  REQUIRE(a.size() == b.size());
  for (std::size_t n = 0; n < a.size(); ++n) {
    CAPTURE(n);
    CHECK((a[n] - b[n]).norm() <= 1e-10 * std::max(1.0, b[n].norm()));
  }
}

}  // namespace

TEST_CASE("gradient descent prefactors") {
  const GsaSpec g = gd(0.1);
  const auto r1 = g.prefactors(1, flat_info(1));
  CHECK(r1.h_x == 1.0);
  CHECK(r1.h_g == std::vector<double>{-0.1});
  const auto r3 = g.prefactors(3, flat_info(3));
  CHECK(r3.h_g == std::vector<double>{-0.1, -0.1, -0.1});
  CHECK(g.x0_agnostic());
  CHECK(g.uses_latest_gradient());
  CHECK_THROWS_AS(gd(0.0), ArgumentError);
}

TEST_CASE("heavy ball prefactors") {
  const auto r = heavy_ball(1.0, 0.5).prefactors(2, flat_info(2));
  CHECK(r.h_g[0] == doctest::Approx(-1.5));
  CHECK(r.h_g[1] == doctest::Approx(-1.0));
  for (std::size_t n = 1; n < 6; ++n) {
    CHECK(heavy_ball(0.3, 0.7).prefactors(n, flat_info(n)).h_g.back() == doctest::Approx(-0.3));
    CHECK(heavy_ball(0.3, 0.0).prefactors(n, flat_info(n)).h_g ==
          gd(0.3).prefactors(n, flat_info(n)).h_g);
  }
  CHECK_THROWS_AS(heavy_ball(0.1, 1.0), ArgumentError);
}

TEST_CASE("nesterov prefactors") {
  const double a = 0.2, b = 0.6;
  const auto r = nesterov(a, b).prefactors(2, flat_info(2));
  // x2 = x0 - a (1 + b + b^2) g0 - a (1 + b) g1
  CHECK(r.h_g[0] == doctest::Approx(-a * (1 + b + b * b)));
  CHECK(r.h_g[1] == doctest::Approx(-a * (1 + b)));
  for (std::size_t n = 1; n < 5; ++n) {
    const auto p = nesterov(a, 0.0).prefactors(n, flat_info(n)).h_g;
    const auto q = gd(a).prefactors(n, flat_info(n)).h_g;
    for (std::size_t k = 0; k < n; ++k) CHECK(p[k] == doctest::Approx(q[k]));
  }
  CHECK(nesterov(a, b).uses_latest_gradient());
}

TEST_CASE("conjugate gradient prefactors") {
  const double a = 0.5;
  CHECK(fr_cg(a).prefactors(1, flat_info(1)).h_g == std::vector<double>{-a});
  // equal gradient norms: beta = 1 and the coefficients are partial sums
  const auto r = fr_cg(a).prefactors(3, flat_info(3, 2.0));
  CHECK(r.h_g[0] == doctest::Approx(-3 * a));
  CHECK(r.h_g[1] == doctest::Approx(-2 * a));
  CHECK(r.h_g[2] == doctest::Approx(-a));
  // vanishing gradient history restarts the direction
  const auto z = fr_cg(a).prefactors(3, flat_info(3, 0.0));
  CHECK(z.h_g == gd(a).prefactors(3, flat_info(3)).h_g);
}

TEST_CASE("unrolled prefactors reproduce the textbook recursions on a quadratic in R^5") {
  const Quadratic q = test_quadratic();
  Eigen::VectorXd x0(5);
  x0 << 1.0, -0.5, 0.3, 2.0, -1.2;
  const int steps = 20;
  const double alpha = 0.3, beta = 0.6;

  SUBCASE("gd") {
    std::vector<Eigen::VectorXd> ref{x0};
    for (int n = 1; n <= steps; ++n) ref.push_back(ref.back() - alpha * q.grad(ref.back()));
    check_same(unrolled(gd(alpha), q, x0, steps), ref);
  }
  SUBCASE("heavy ball") {
    std::vector<Eigen::VectorXd> ref{x0};
    Eigen::VectorXd m = Eigen::VectorXd::Zero(5);
    for (int n = 1; n <= steps; ++n) {
      m = beta * m - alpha * q.grad(ref.back());
      ref.push_back(ref.back() + m);
    }
    check_same(unrolled(heavy_ball(alpha, beta), q, x0, steps), ref);
  }
  SUBCASE("nesterov") {
    std::vector<Eigen::VectorXd> ref{x0};
    Eigen::VectorXd z = x0;
    for (int n = 1; n <= steps; ++n) {
      const Eigen::VectorXd z_next = ref.back() - alpha * q.grad(ref.back());
      ref.push_back(z_next + beta * (z_next - z));
      z = z_next;
    }
    check_same(unrolled(nesterov(alpha, beta), q, x0, steps), ref);
  }
  SUBCASE("fletcher-reeves") {
    std::vector<Eigen::VectorXd> ref{x0};
    Eigen::VectorXd g = q.grad(x0);
    Eigen::VectorXd d = -g;
    for (int n = 1; n <= steps; ++n) {
      ref.push_back(ref.back() + alpha * d);
      const Eigen::VectorXd g_next = q.grad(ref.back());
      d = -g_next + (g_next.squaredNorm() / g.squaredNorm()) * d;
      g = g_next;
    }
    check_same(unrolled(fr_cg(alpha), q, x0, steps), ref);
  }
}

TEST_CASE("x0-agnostic algorithms never read the x0 information") {
  for (const GsaSpec& g : {gd(0.1), heavy_ball(0.1, 0.5), nesterov(0.1, 0.5), fr_cg(0.1)}) {
    CHECK(g.x0_agnostic());
    for (std::size_t n = 1; n <= 6; ++n) {
      const InfoView info = flat_info(n, 0.5);
      const auto row = g.prefactors(n, info);
      CHECK(row.h_x == 1.0);
      CHECK(info.x0_reads() == 0);
    }
  }
  const GsaSpec projected = with_sphere_projection(gd(0.1), 1.0);
  CHECK_FALSE(projected.x0_agnostic());
  const InfoView info = flat_info(2);
  projected.prefactors(2, info);
  CHECK(info.x0_reads() > 0);
}

TEST_CASE("projection wrappers") {
  // inner iterate with only x0, |x0|^2 = 4: sphere of radius 1 halves it
  const GsaSpec keep("keep", {}, [](std::size_t n, const InfoView&) {
    return PrefactorRow{1.0, std::vector<double>(n, 0.0)};
  }, false, false);
  const InfoView info(std::vector<double>{0.0}, Matrix::Identity(1, 1), std::vector<double>{0.0}, 4.0);
  const auto sphere = with_sphere_projection(keep, 1.0).prefactors(1, info);
  CHECK(sphere.h_x == doctest::Approx(0.5));
  const auto ball = with_ball_projection(keep, 2.0).prefactors(1, info);
  CHECK(ball.h_x == doctest::Approx(1.0));
  CHECK(with_ball_projection(keep, 3.0).prefactors(1, info).h_x == 1.0);

  const InfoView zero(std::vector<double>{0.0}, Matrix::Zero(1, 1), std::vector<double>{0.0}, 0.0);
  CHECK_THROWS_AS(with_sphere_projection(keep, 1.0).prefactors(1, zero), DegenerateProjectionError);
}

TEST_CASE("iterate norm from information matches explicit coordinates") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> d;
  for (int dim : {3, 5}) {
    for (int trial = 0; trial < 50; ++trial) {
      const int n = 1 + trial % 4;
      Eigen::VectorXd x0(dim);
      for (int i = 0; i < dim; ++i) x0(i) = d(rng);
      std::vector<Eigen::VectorXd> grads(n, Eigen::VectorXd(dim));
      for (auto& g : grads)
        for (int i = 0; i < dim; ++i) g(i) = d(rng);
      PrefactorRow row{d(rng), {}};
      Eigen::VectorXd x = row.h_x * x0;
      for (int k = 0; k < n; ++k) {
        row.h_g.push_back(d(rng));
        x += row.h_g.back() * grads[k];
      }
      const InfoView info = make_info(x0, grads, std::vector<double>(n, 0.0));
      CHECK(info.satisfies_invariants());
      const double from_info = iterate_norm_sq(row, info);
      CHECK(std::abs(from_info - x.squaredNorm()) <= 1e-12 * std::max(1.0, x.squaredNorm()));

      const double radius = 0.8;
      const auto projected = with_sphere_projection(
          GsaSpec("fixed", {}, [row](std::size_t, const InfoView&) { return row; }, false, false),
          radius).prefactors(n, info);
      Eigen::VectorXd px = projected.h_x * x0;
      for (int k = 0; k < n; ++k) px += projected.h_g[k] * grads[k];
      CHECK(px.norm() == doctest::Approx(radius).epsilon(1e-12));
    }
  }
}

TEST_CASE("prefactor rows are checked") {
  const GsaSpec bad("bad", {}, [](std::size_t, const InfoView&) { return PrefactorRow{1.0, {}}; },
                    true, false);
  CHECK_THROWS_AS(bad.prefactors(2, flat_info(2)), ArgumentError);
  CHECK_THROWS_AS(gd(0.1).prefactors(0, flat_info(1)), ArgumentError);
  CHECK_THROWS_AS(gd(0.1).prefactors(3, flat_info(2)), ArgumentError);
}
