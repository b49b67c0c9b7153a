#include "grfopt/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "grfopt/errors.hpp"
#include "grfopt/quadrature.hpp"

namespace grfopt {

KernelModel::KernelModel(std::string name, ScalarFn mean, ScalarFn mean_slope,
                         PartialsFn partials, KernelTags tags)
    : name_(std::move(name)),
      mean_(std::move(mean)),
      mean_slope_(std::move(mean_slope)),
      partials_(std::move(partials)),
      tags_(tags) {}

void check_domain(double s_x, double s_y, double ip_xy) {
  if (!(s_x >= 0.0) || !(s_y >= 0.0) || !std::isfinite(ip_xy)) {
    throw DomainError("kernel arguments outside D: negative or non-finite squared norm");
  }
  const double bound = 2.0 * std::sqrt(s_x * s_y);
  if (std::abs(ip_xy) > bound * (1.0 + 1e-9)) {
    std::ostringstream msg;
    msg << "kernel arguments outside D: |<x,y>| = " << std::abs(ip_xy)
        << " exceeds |x||y| = " << bound;
    throw DomainError(msg.str());
  }
}

KernelPair KernelModel::at(double s_x, double s_y, double ip_xy) const {
  check_domain(s_x, s_y, ip_xy);
  return {partials_(s_x, s_y, ip_xy)};
}

KernelModel KernelModel::with_partials(PartialsFn partials, std::string name) const {
  return KernelModel(std::move(name), mean_, mean_slope_, std::move(partials), tags_);
}

// --- Schoenberg mixtures -------------------------------------------------

SchoenbergMixture::SchoenbergMixture(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw InvalidMixtureError("Schoenberg mixture needs at least one atom");
  for (const auto& atom : atoms_) {
    if (!(atom.weight > 0.0) || !std::isfinite(atom.weight)) {
      throw InvalidMixtureError("Schoenberg atom weights must be positive and finite");
    }
    if (!(atom.scale >= 0.0) || !std::isfinite(atom.scale)) {
      throw InvalidMixtureError("Schoenberg atom scales must be non-negative and finite");
    }
  }
}

SchoenbergMixture::Values SchoenbergMixture::evaluate(double r) const {
  Values v{0.0, 0.0, 0.0};
  for (const auto& atom : atoms_) {
    const double t2 = atom.scale * atom.scale;
    const double e = atom.weight * std::exp(-t2 * r);
    v.c += e;
    v.c1 -= t2 * e;
    v.c2 += t2 * t2 * e;
  }
  return v;
}

double SchoenbergMixture::c(double r) const { return evaluate(r).c; }
double SchoenbergMixture::c1(double r) const { return evaluate(r).c1; }
double SchoenbergMixture::c2(double r) const { return evaluate(r).c2; }

// --- spin glass mixtures -------------------------------------------------

SpinGlassMixture::SpinGlassMixture(std::vector<double> coefficients)
    : coeffs_(std::move(coefficients)) {
  if (coeffs_.empty()) throw InvalidMixtureError("spin glass mixture needs coefficients");
  for (double c : coeffs_) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
      throw InvalidMixtureError("spin glass coefficients must be non-negative and finite");
    }
  }
}

double SpinGlassMixture::xi(double s) const {
  double acc = 0.0;
  for (std::size_t p = coeffs_.size(); p-- > 0;) acc = acc * s + coeffs_[p] * coeffs_[p];
  return acc;
}

double SpinGlassMixture::xi1(double s) const {
  double acc = 0.0;
  for (std::size_t p = coeffs_.size(); p-- > 1;) {
    acc = acc * s + static_cast<double>(p) * coeffs_[p] * coeffs_[p];
  }
  return acc;
}

double SpinGlassMixture::xi2(double s) const {
  double acc = 0.0;
  for (std::size_t p = coeffs_.size(); p-- > 2;) {
    acc = acc * s + static_cast<double>(p * (p - 1)) * coeffs_[p] * coeffs_[p];
  }
  return acc;
}

// --- built-in families ---------------------------------------------------

KernelModel lift_stationary(const SchoenbergMixture& mixture, double mean_level) {
  auto partials = [mixture](double l1, double l2, double l3) {
    const auto v = mixture.evaluate(l1 + l2 - l3);
    KernelPartials p;
    p.k = v.c;
    p.k1 = v.c1;
    p.k2 = v.c1;
    p.k3 = -v.c1;
    p.k12 = v.c2;
    p.k33 = v.c2;
    p.k13 = -v.c2;
    p.k23 = -v.c2;
    return p;
  };
  return KernelModel(
      "stationary_schoenberg", [mean_level](double) { return mean_level; },
      [](double) { return 0.0; }, partials, KernelTags{true, false});
}

KernelModel spin_glass_kernel(const SpinGlassMixture& mixture) {
  auto partials = [mixture](double, double, double l3) {
    KernelPartials p;
    p.k = mixture.xi(l3);
    p.k3 = mixture.xi1(l3);
    p.k33 = mixture.xi2(l3);
    return p;
  };
  return KernelModel(
      "spin_glass", [](double) { return 0.0; }, [](double) { return 0.0; }, partials,
      KernelTags{false, true});
}

KernelModel quadratic_kernel(double sigma_a, double sigma_eta, double r) {
  if (!(sigma_a > 0.0) || !(sigma_eta >= 0.0) || !(r > 0.0)) {
    throw ArgumentError("quadratic kernel needs sigma_A > 0, sigma_eta >= 0, R > 0");
  }
  const double a2 = sigma_a * sigma_a;
  const double slope = a2 * a2 * r * r;
  const double offset = 0.5 * sigma_eta * sigma_eta + 0.5 * a2 * r * r;
  auto partials = [slope](double, double, double l3) {
    KernelPartials p;
    p.k = slope * l3;
    p.k3 = slope;
    return p;
  };
  return KernelModel(
      "quadratic", [offset, a2](double s) { return offset + a2 * s; },
      [a2](double) { return a2; }, partials);
}

// --- covariance queries --------------------------------------------------

double cov_f_f(const KernelModel& kernel, double s_x, double s_y, double ip_xy) {
  return kernel.at(s_x, s_y, ip_xy).f_f();
}

double cov_df_f(const KernelModel& kernel, double s_x, double s_y, double ip_xy, double ip_xv,
                double ip_yv) {
  return kernel.at(s_x, s_y, ip_xy).df_f(ip_xv, ip_yv);
}

double cov_df_df(const KernelModel& kernel, double s_x, double s_y, double ip_xy, double ip_xv,
                 double ip_yv, double ip_xw, double ip_yw, double ip_vw) {
  return kernel.at(s_x, s_y, ip_xy).df_df(ip_xv, ip_yv, ip_xw, ip_yw, ip_vw);
}

double mean_f(const KernelModel& kernel, double s_x) {
  if (!(s_x >= 0.0)) throw DomainError("mean_f: squared norm must be non-negative");
  return kernel.mean(s_x);
}

double mean_df(const KernelModel& kernel, double s_x, double ip_xv) {
  if (!(s_x >= 0.0)) throw DomainError("mean_df: squared norm must be non-negative");
  return kernel.mean_slope(s_x) * ip_xv;
}

// --- barrier -------------------------------------------------------------

double alg_barrier(const SpinGlassMixture& mixture, int quadrature_points) {
  auto integrand = [&mixture](double s) {
    const double curvature = mixture.xi2(s);
    if (curvature < 0.0) {
      throw InvalidMixtureError("xi'' is negative on [0, 1]; barrier integral undefined");
    }
    return std::sqrt(curvature);
  };
  const auto result = integrate_adaptive(integrand, 0.0, 1.0, 1e-8, quadrature_points);
  if (!result.converged) {
    throw QuadratureError("barrier integral did not reach 1e-8 within " +
                          std::to_string(quadrature_points) + " subintervals");
  }
  return result.value;
}

// --- partial derivative validation ----------------------------------------

bool PartialsReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

std::vector<DomainPoint> interior_grid(int per_axis) {
  std::vector<DomainPoint> grid;
  if (per_axis < 1) return grid;
  auto lin = [per_axis](double lo, double hi, int i) {
    return per_axis == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (per_axis - 1);
  };
  for (int a = 0; a < per_axis; ++a) {
    for (int b = 0; b < per_axis; ++b) {
      for (int c = 0; c < per_axis; ++c) {
        const double l1 = lin(0.2, 1.4, a);
        const double l2 = lin(0.2, 1.4, b);
        const double l3 = lin(-0.8, 0.8, c) * 2.0 * std::sqrt(l1 * l2);
        grid.push_back({l1, l2, l3});
      }
    }
  }
  return grid;
}

PartialsReport validate_partials(const KernelModel& kernel, const std::vector<DomainPoint>& grid,
                                 double tol) {
  // Each entry: name, analytic accessor, accessor being differenced, axis.
  struct Spec {
    const char* name;
    double KernelPartials::*analytic;
    double KernelPartials::*base;
    int axis;
  };
  static constexpr Spec kSpecs[] = {
      {"k1", &KernelPartials::k1, &KernelPartials::k, 0},
      {"k2", &KernelPartials::k2, &KernelPartials::k, 1},
      {"k3", &KernelPartials::k3, &KernelPartials::k, 2},
      {"k12", &KernelPartials::k12, &KernelPartials::k1, 1},
      {"k13", &KernelPartials::k13, &KernelPartials::k1, 2},
      {"k23", &KernelPartials::k23, &KernelPartials::k2, 2},
      {"k33", &KernelPartials::k33, &KernelPartials::k3, 2},
  };

  PartialsReport report;
  report.tolerance = tol;
  for (const auto& spec : kSpecs) {
    PartialCheck check;
    check.partial = spec.name;
    for (const auto& pt : grid) {
      double x[3] = {pt.l1, pt.l2, pt.l3};
      auto central = [&](double h) {
        double plus[3] = {x[0], x[1], x[2]};
        double minus[3] = {x[0], x[1], x[2]};
        plus[spec.axis] += h;
        minus[spec.axis] -= h;
        const double up = kernel.partials(plus[0], plus[1], plus[2]).*spec.base;
        const double down = kernel.partials(minus[0], minus[1], minus[2]).*spec.base;
        return (up - down) / (2.0 * h);
      };
      // Richardson step removes the h^2 term, so exact zeros of cubic terms come out as zeros
      const double h = 1e-4 * std::max(1.0, std::abs(x[spec.axis]));
      const double fd = (4.0 * central(0.5 * h) - central(h)) / 3.0;
      const double analytic = kernel.partials(x[0], x[1], x[2]).*spec.analytic;
      const double abs_err = std::abs(analytic - fd);
      const double scale = std::max({std::abs(analytic), std::abs(fd), 1e-6});
      check.max_abs_error = std::max(check.max_abs_error, abs_err);
      check.max_rel_error = std::max(check.max_rel_error, abs_err / scale);
    }
    check.passed = check.max_rel_error <= tol;
    report.checks.push_back(check);
  }
  return report;
}

}  // namespace grfopt
