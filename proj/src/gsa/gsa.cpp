#include "grfopt/gsa.hpp"

#include <cmath>
#include <string>

#include "grfopt/errors.hpp"

namespace grfopt {

InfoView::InfoView(std::vector<double> f_values, Matrix grad_gram, std::vector<double> x0_grad,
                   double x0_norm_sq)
    : f_values_(std::move(f_values)),
      grad_gram_(std::move(grad_gram)),
      x0_grad_(std::move(x0_grad)),
      x0_norm_sq_(x0_norm_sq) {
  const auto n = static_cast<Eigen::Index>(f_values_.size());
  if (grad_gram_.rows() != n || grad_gram_.cols() != n || x0_grad_.size() != f_values_.size()) {
    throw ArgumentError("InfoView: inconsistent sizes");
  }
}

bool InfoView::satisfies_invariants(double slack) const {
  const auto n = static_cast<Eigen::Index>(size());
  if (x0_norm_sq_ < -slack) return false;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (grad_gram_(k, k) < -slack) return false;
    for (Eigen::Index l = 0; l < k; ++l) {
      const double scale = std::max(1.0, std::abs(grad_gram_(k, l)));
      if (std::abs(grad_gram_(k, l) - grad_gram_(l, k)) > slack * scale) return false;
    }
    const double lhs = x0_grad_[k] * x0_grad_[k];
    const double rhs = x0_norm_sq_ * grad_gram_(k, k);
    if (lhs > rhs + slack * std::max(1.0, rhs)) return false;
  }
  return true;
}

GsaSpec::GsaSpec(std::string name, std::map<std::string, double> parameters, PrefactorFn prefactors,
                 bool x0_agnostic, bool uses_latest_gradient)
    : name_(std::move(name)),
      parameters_(std::move(parameters)),
      fn_(std::move(prefactors)),
      x0_agnostic_(x0_agnostic),
      uses_latest_gradient_(uses_latest_gradient) {}

PrefactorRow GsaSpec::prefactors(std::size_t n, const InfoView& info) const {
  if (n == 0) throw ArgumentError("prefactors are defined for steps n >= 1");
  if (info.size() < n) throw ArgumentError("information does not cover steps 0..n-1");
  PrefactorRow row = fn_(n, info);
  if (row.h_g.size() != n) {
    throw ArgumentError(name_ + ": prefactor row has " + std::to_string(row.h_g.size()) +
                        " gradient coefficients at step " + std::to_string(n));
  }
  return row;
}

namespace {

void require_step(double alpha, const char* who) {
  if (alpha == 0.0 || !std::isfinite(alpha)) {
    throw ArgumentError(std::string(who) + ": step size must be finite and non-zero");
  }
}

void require_momentum(double beta, const char* who) {
  if (!(std::abs(beta) < 1.0)) {
    throw ArgumentError(std::string(who) + ": momentum must satisfy |beta| < 1");
  }
}

}  // namespace

GsaSpec gd(double alpha) {
  require_step(alpha, "gd");
  auto fn = [alpha](std::size_t n, const InfoView&) {
    return PrefactorRow{1.0, std::vector<double>(n, -alpha)};
  };
  return GsaSpec("gd", {{"alpha", alpha}}, fn, true, true);
}

GsaSpec heavy_ball(double alpha, double beta) {
  require_step(alpha, "heavy_ball");
  require_momentum(beta, "heavy_ball");
  auto fn = [alpha, beta](std::size_t n, const InfoView&) {
    PrefactorRow row{1.0, std::vector<double>(n)};
    // -alpha (1 + beta + ... + beta^{n-k-1}), accumulated from the newest gradient back
    double geometric = 0.0;
    double power = 1.0;
    for (std::size_t k = n; k-- > 0;) {
      geometric += power;
      power *= beta;
      row.h_g[k] = -alpha * geometric;
    }
    return row;
  };
  return GsaSpec("heavy_ball", {{"alpha", alpha}, {"beta", beta}}, fn, true, true);
}

GsaSpec nesterov(double alpha, double beta) {
  require_step(alpha, "nesterov");
  require_momentum(beta, "nesterov");
  auto fn = [alpha, beta](std::size_t n, const InfoView&) {
    std::vector<double> z_prev(n, 0.0);  // z_m
    std::vector<double> x(n, 0.0);       // x_m (evaluation point)
    std::vector<double> z_next(n, 0.0);
    for (std::size_t m = 0; m < n; ++m) {
      z_next = x;
      z_next[m] -= alpha;
      for (std::size_t k = 0; k < n; ++k) x[k] = (1.0 + beta) * z_next[k] - beta * z_prev[k];
      z_prev.swap(z_next);
    }
    return PrefactorRow{1.0, x};
  };
  return GsaSpec("nesterov", {{"alpha", alpha}, {"beta", beta}}, fn, true, true);
}

GsaSpec fr_cg(double alpha) {
  require_step(alpha, "fr_cg");
  auto fn = [alpha](std::size_t n, const InfoView& info) {
    std::vector<double> direction(n, 0.0);  // d_m in gradient coordinates
    PrefactorRow row{1.0, std::vector<double>(n, 0.0)};
    for (std::size_t m = 0; m < n; ++m) {
      double beta = 0.0;
      if (m > 0) {
        const double prev = info.grad_gram(m - 1, m - 1);
        beta = prev < 1e-14 ? 0.0 : info.grad_gram(m, m) / prev;
      }
      for (std::size_t k = 0; k < m; ++k) direction[k] *= beta;
      direction[m] = -1.0;
      for (std::size_t k = 0; k <= m; ++k) row.h_g[k] += alpha * direction[k];
    }
    return row;
  };
  return GsaSpec("fr_cg", {{"alpha", alpha}}, fn, true, true);
}

double iterate_norm_sq(const PrefactorRow& row, const InfoView& info) {
  const std::size_t n = row.h_g.size();
  double acc = row.h_x * row.h_x * info.x0_norm_sq();
  double cross = 0.0;
  for (std::size_t k = 0; k < n; ++k) cross += row.h_g[k] * info.x0_grad(k);
  acc += 2.0 * row.h_x * cross;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = 0; l < n; ++l) acc += row.h_g[k] * row.h_g[l] * info.grad_gram(k, l);
  }
  return acc;
}

GsaSpec with_projection(GsaSpec inner, Projection projection, double radius) {
  if (projection == Projection::none) return inner;
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw ArgumentError("projection radius must be positive and finite");
  }
  const bool sphere = projection == Projection::sphere;
  auto params = inner.parameters();
  params["radius"] = radius;
  const std::string name = inner.name() + (sphere ? "+sphere" : "+ball");
  const bool latest = inner.uses_latest_gradient();
  auto fn = [inner = std::move(inner), sphere, radius](std::size_t n, const InfoView& info) {
    PrefactorRow row = inner.prefactors(n, info);
    const double norm_sq = iterate_norm_sq(row, info);
    double scale = 1.0;
    if (sphere) {
      if (norm_sq < 1e-20) {
        throw DegenerateProjectionError("sphere projection of a (numerically) zero iterate");
      }
      scale = radius / std::sqrt(norm_sq);
    } else {
      scale = radius / std::max(std::sqrt(std::max(norm_sq, 0.0)), radius);
    }
    row.h_x *= scale;
    for (double& h : row.h_g) h *= scale;
    return row;
  };
  return GsaSpec(name, params, fn, false, latest);
}

GsaSpec with_sphere_projection(GsaSpec inner, double radius) {
  return with_projection(std::move(inner), Projection::sphere, radius);
}

GsaSpec with_ball_projection(GsaSpec inner, double radius) {
  return with_projection(std::move(inner), Projection::ball, radius);
}

}  // namespace grfopt
