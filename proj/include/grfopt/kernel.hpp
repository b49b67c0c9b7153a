#pragma once

// Mean and covariance models of (non-stationary) isotropic Gaussian random
// functions f_N on R^N, scaled so that
//
//   E[f_N(x)]            = mu(|x|^2 / 2)
//   N Cov(f_N(x), f_N(y)) = kappa(|x|^2 / 2, |y|^2 / 2, <x, y>).
//
// Everything downstream (predictor, samplers) only ever sees inner products,
// never coordinates, so all covariance queries below take the relevant inner
// products directly.

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace grfopt {

/// kappa and its partial derivatives at one point (l1, l2, l3) of the domain
/// D = {l1, l2 >= 0, |l3| <= 2 sqrt(l1 l2)}.
struct KernelPartials {
  double k = 0.0;
  double k1 = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;
  double k12 = 0.0;
  double k13 = 0.0;
  double k23 = 0.0;
  double k33 = 0.0;
};

struct KernelTags {
  bool stationary = false;
  bool spin_glass = false;
};

/// Covariance bundle for one pair of points (x, y). `v` always differentiates
/// at x and `w` at y; all results are N times the true covariance.
struct KernelPair {
  KernelPartials p;

  double f_f() const { return p.k; }
  /// N Cov(D_v f(x), f(y))
  double df_f(double ip_xv, double ip_yv) const { return p.k1 * ip_xv + p.k3 * ip_yv; }
  /// N Cov(f(x), D_w f(y))
  double f_df(double ip_yw, double ip_xw) const { return p.k2 * ip_yw + p.k3 * ip_xw; }
  /// N Cov(D_v f(x), D_w f(y))
  double df_df(double ip_xv, double ip_yv, double ip_xw, double ip_yw, double ip_vw) const {
    return p.k12 * ip_xv * ip_yw + p.k13 * ip_xv * ip_xw + p.k23 * ip_yv * ip_yw +
           p.k33 * ip_yv * ip_xw + p.k3 * ip_vw;
  }
  /// Covariance of derivatives along a unit direction orthogonal to x and y.
  double orthogonal() const { return p.k3; }
};

class KernelModel {
 public:
  using ScalarFn = std::function<double(double)>;
  using PartialsFn = std::function<KernelPartials(double, double, double)>;

  KernelModel(std::string name, ScalarFn mean, ScalarFn mean_slope, PartialsFn partials,
              KernelTags tags = {});

  const std::string& name() const { return name_; }
  const KernelTags& tags() const { return tags_; }

  double mean(double s) const { return mean_(s); }
  double mean_slope(double s) const { return mean_slope_(s); }

  /// Unchecked evaluation; callers are responsible for staying in D.
  KernelPartials partials(double l1, double l2, double l3) const { return partials_(l1, l2, l3); }
  double kappa(double l1, double l2, double l3) const { return partials_(l1, l2, l3).k; }

  /// Pair bundle at (|x|^2/2, |y|^2/2, <x,y>); throws DomainError outside D
  /// (1e-9 relative slack on the Cauchy-Schwarz bound).
  KernelPair at(double s_x, double s_y, double ip_xy) const;

  /// Same mean, different covariance partials. Used to build perturbed
  /// kernels for the validation tooling.
  KernelModel with_partials(PartialsFn partials, std::string name) const;

 private:
  std::string name_;
  ScalarFn mean_;
  ScalarFn mean_slope_;
  PartialsFn partials_;
  KernelTags tags_;
};

/// Throws DomainError unless |ip_xy| <= 2 sqrt(s_x s_y) (1 + 1e-9).
void check_domain(double s_x, double s_y, double ip_xy);

/// nu = sum_j w_j delta_{t_j}; C(r) = sum_j w_j exp(-t_j^2 r).
class SchoenbergMixture {
 public:
  struct Atom {
    double weight;
    double scale;
  };

  explicit SchoenbergMixture(std::vector<Atom> atoms);

  const std::vector<Atom>& atoms() const { return atoms_; }

  double c(double r) const;
  double c1(double r) const;
  double c2(double r) const;

  /// C, C', C'' in one pass.
  struct Values {
    double c, c1, c2;
  };
  Values evaluate(double r) const;

 private:
  std::vector<Atom> atoms_;
};

/// xi(s) = sum_p c_p^2 s^p with coefficients indexed by p = 0..P.
class SpinGlassMixture {
 public:
  explicit SpinGlassMixture(std::vector<double> coefficients);

  const std::vector<double>& coefficients() const { return coeffs_; }

  double xi(double s) const;
  double xi1(double s) const;
  double xi2(double s) const;

 private:
  std::vector<double> coeffs_;
};

/// kappa(l1, l2, l3) = C(l1 + l2 - l3), constant mean.
KernelModel lift_stationary(const SchoenbergMixture& mixture, double mean_level);

/// kappa = xi(l3), mu = 0.
KernelModel spin_glass_kernel(const SpinGlassMixture& mixture);

/// Infinite-data limit of a random least-squares loss with isotropic features:
/// kappa = sigma_A^4 R^2 l3, mu(s) = sigma_eta^2/2 + sigma_A^2 R^2/2 + sigma_A^2 s.
KernelModel quadratic_kernel(double sigma_a, double sigma_eta, double r);

double cov_f_f(const KernelModel& kernel, double s_x, double s_y, double ip_xy);
double cov_df_f(const KernelModel& kernel, double s_x, double s_y, double ip_xy, double ip_xv,
                double ip_yv);
double cov_df_df(const KernelModel& kernel, double s_x, double s_y, double ip_xy, double ip_xv,
                 double ip_yv, double ip_xw, double ip_yw, double ip_vw);
double mean_f(const KernelModel& kernel, double s_x);
double mean_df(const KernelModel& kernel, double s_x, double ip_xv);

/// int_0^1 sqrt(xi''(s)) ds by adaptive Gauss-Kronrod, absolute tolerance
/// 1e-8, at most `quadrature_points` subintervals.
double alg_barrier(const SpinGlassMixture& mixture, int quadrature_points = 400);

struct PartialCheck {
  std::string partial;
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  bool passed = true;
};

struct PartialsReport {
  std::vector<PartialCheck> checks;
  double tolerance = 0.0;
  bool passed() const;
};

struct DomainPoint {
  double l1, l2, l3;
};

/// per_axis^3 grid strictly inside D: l1, l2 in [0.2, 1.4], l3 a fraction in
/// [-0.8, 0.8] of the Cauchy-Schwarz bound 2 sqrt(l1 l2).
std::vector<DomainPoint> interior_grid(int per_axis);

/// Compares analytic partials against central differences with step
/// 1e-5 * max(1, |coordinate|). First partials difference kappa; second
/// partials difference the analytic first partials.
PartialsReport validate_partials(const KernelModel& kernel, const std::vector<DomainPoint>& grid,
                                 double tol);

}  // namespace grfopt
