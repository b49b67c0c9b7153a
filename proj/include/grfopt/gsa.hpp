#pragma once

// Gradient span algorithms in dimension-free form. Step n emits
//
//   x_n = h_x x_0 + sum_{k<n} h_g[k] grad f(x_k),
//
// where the prefactors may only depend on the information gathered so far:
// function values, the gradient Gram matrix and the inner products of the
// gradients with x_0.

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "grfopt/gaussian.hpp"

namespace grfopt {

/// Information available after step n: values f(x_0..x_n), gradient Gram
/// matrix, <x_0, grad f(x_k)> and |x_0|^2. Reads of the x_0-dependent parts
/// are counted so that x_0-agnostic algorithms can be audited.
class InfoView {
 public:
  InfoView() = default;
  InfoView(std::vector<double> f_values, Matrix grad_gram, std::vector<double> x0_grad,
           double x0_norm_sq);

  /// Number of steps covered (n + 1).
  std::size_t size() const { return f_values_.size(); }

  double f(std::size_t k) const { return f_values_.at(k); }
  double grad_gram(std::size_t k, std::size_t l) const { return grad_gram_(k, l); }
  double x0_grad(std::size_t k) const {
    ++x0_reads_;
    return x0_grad_.at(k);
  }
  double x0_norm_sq() const {
    ++x0_reads_;
    return x0_norm_sq_;
  }

  const std::vector<double>& f_values() const { return f_values_; }
  const Matrix& grad_gram() const { return grad_gram_; }

  std::size_t x0_reads() const { return x0_reads_; }

  /// Symmetry, non-negative diagonal and Cauchy-Schwarz for x0_grad, each
  /// within `slack`. Does not count as an x_0 read.
  bool satisfies_invariants(double slack = 1e-9) const;

 private:
  std::vector<double> f_values_;
  Matrix grad_gram_;
  std::vector<double> x0_grad_;
  double x0_norm_sq_ = 0.0;
  mutable std::size_t x0_reads_ = 0;
};

struct PrefactorRow {
  double h_x = 1.0;
  std::vector<double> h_g;
};

class GsaSpec {
 public:
  /// (n, information after step n-1) -> prefactors of x_n.
  using PrefactorFn = std::function<PrefactorRow(std::size_t, const InfoView&)>;

  GsaSpec(std::string name, std::map<std::string, double> parameters, PrefactorFn prefactors,
          bool x0_agnostic, bool uses_latest_gradient);

  const std::string& name() const { return name_; }
  const std::map<std::string, double>& parameters() const { return parameters_; }
  bool x0_agnostic() const { return x0_agnostic_; }
  bool uses_latest_gradient() const { return uses_latest_gradient_; }

  /// Prefactors for step n >= 1; `info` must cover steps 0..n-1.
  PrefactorRow prefactors(std::size_t n, const InfoView& info) const;

 private:
  std::string name_;
  std::map<std::string, double> parameters_;
  PrefactorFn fn_;
  bool x0_agnostic_;
  bool uses_latest_gradient_;
};

GsaSpec gd(double alpha);
GsaSpec heavy_ball(double alpha, double beta);
/// Nesterov momentum with the look-ahead points as evaluation points:
/// z_{n+1} = x_n - alpha grad f(x_n), x_{n+1} = z_{n+1} + beta (z_{n+1} - z_n), z_0 = x_0.
GsaSpec nesterov(double alpha, double beta);
/// Fletcher-Reeves conjugate gradient with fixed step alpha.
GsaSpec fr_cg(double alpha);

enum class Projection { none, sphere, ball };

/// |x~_n|^2 of the iterate described by `row`, computed from the information.
double iterate_norm_sq(const PrefactorRow& row, const InfoView& info);

GsaSpec with_sphere_projection(GsaSpec inner, double radius);
GsaSpec with_ball_projection(GsaSpec inner, double radius);
GsaSpec with_projection(GsaSpec inner, Projection projection, double radius);

}  // namespace grfopt
