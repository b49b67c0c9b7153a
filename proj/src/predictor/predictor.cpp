#include "grfopt/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "grfopt/assembly.hpp"
#include "grfopt/errors.hpp"

namespace grfopt {

bool LimitCurve::any_frozen() const {
  return std::any_of(frozen.begin(), frozen.end(), [](bool b) { return b; });
}

namespace {

Matrix coordinates(const LimitCurve& curve, std::size_t points, std::size_t d) {
  Matrix coords = Matrix::Zero(points, d);
  for (std::size_t k = 0; k < points; ++k) {
    for (std::size_t i = 0; i < d; ++i) coords(k, i) = curve.y_at(k, i);
  }
  return coords;
}

// Appends step n = curve.size() given y_n already pushed onto curve.y_reps.
template <class Model>
void advance(LimitCurve& curve, const Model& model, const PredictorOptions& options) {
  const std::size_t n = curve.size();
  const std::size_t d = curve.dims.back();

  const StepBlocks blocks = assemble_step(model, coordinates(curve, n + 1, d));
  const Vector observed = history_vector(curve.f_limit, n, d, [&](std::size_t k, std::size_t i) {
    return curve.gamma_at(k, i);
  });
  const ConditioningResult column =
      condition(blocks.mu1, blocks.mu2, blocks.s11, blocks.s12, blocks.s22, observed,
                options.policy);

  // Derivatives along directions orthogonal to V_n vanish on the history.
  const ConditioningResult residual =
      condition(Vector::Zero(n), Vector::Zero(1), blocks.w11, blocks.w12, blocks.w22,
                Vector::Zero(n), options.policy);
  const double sigma_sq = residual.min_raw_diagonal;

  std::vector<double> gamma_n(column.cond_mean.data() + 1, column.cond_mean.data() + 1 + d);
  bool frozen = false;
  if (!(sigma_sq > options.rank_tolerance)) {
    if (n == 0) {
      throw DegenerateKernelError("kappa_3 at the starting point is " + to_message(sigma_sq) +
                                  "; the gradient has no isotropic component");
    }
    if (!options.freeze_dimension) {
      throw RankStallError("residual gradient variance " + to_message(sigma_sq) +
                           " at step " + std::to_string(n) + " (span stops growing)");
    }
    frozen = true;
  } else {
    gamma_n.push_back(std::sqrt(sigma_sq));
  }

  curve.f_limit.push_back(column.cond_mean(0));
  curve.gamma.push_back(std::move(gamma_n));
  curve.sigma_w.push_back(frozen ? 0.0 : std::sqrt(sigma_sq));
  curve.dims.push_back(frozen ? d : d + 1);
  curve.frozen.push_back(frozen);

  const std::size_t size = n + 1;
  Matrix gram = Matrix::Zero(size, size);
  Matrix rho = Matrix::Zero(size, size);
  if (n > 0) {
    gram.topLeftCorner(n, n) = curve.grad_gram_limit;
    rho.topLeftCorner(n, n) = curve.rho;
  }
  for (std::size_t k = 0; k <= n; ++k) {
    double g = 0.0;
    const std::size_t common = std::min(curve.gamma[k].size(), curve.gamma[n].size());
    for (std::size_t i = 0; i < common; ++i) g += curve.gamma[k][i] * curve.gamma[n][i];
    gram(n, k) = g;
    gram(k, n) = g;
  }
  const std::size_t width = curve.dims[n];
  for (std::size_t k = 0; k < n; ++k) {
    double dist_sq = 0.0;
    for (std::size_t i = 0; i < width; ++i) {
      const double diff = curve.y_at(n, i) - curve.y_at(k, i);
      dist_sq += diff * diff;
    }
    const double dist = std::sqrt(dist_sq);
    if (!(dist > options.distance_tolerance)) {
      throw CoincidentPointsError("limit iterates " + std::to_string(k) + " and " +
                                  std::to_string(n) + " coincide (distance " +
                                  std::to_string(dist) + ")");
    }
    rho(n, k) = dist;
    rho(k, n) = dist;
  }
  curve.grad_gram_limit = std::move(gram);
  curve.rho = std::move(rho);
}

template <class Model>
LimitCurve init_impl(const Model& model, double lambda, const PredictorOptions& options) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ArgumentError("initialization norm lambda must be finite and non-negative");
  }
  LimitCurve curve;
  curve.lambda = lambda;
  if (lambda > 0.0) {
    curve.dims.push_back(1);
    curve.y_reps.push_back({lambda});
  } else {
    curve.dims.push_back(0);
    curve.y_reps.push_back({});
  }
  advance(curve, model, options);
  return curve;
}

template <class Model>
void step_impl(LimitCurve& curve, const Model& model, const GsaSpec& gsa,
               const PredictorOptions& options) {
  const std::size_t n = curve.size();
  if (n == 0) throw ArgumentError("limit_step needs an initialized curve");
  const PrefactorRow row = gsa.prefactors(n, limiting_info(curve, n - 1));
  const std::size_t d = curve.dims.back();
  std::vector<double> y(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    double acc = (i == 0 && curve.lambda > 0.0) ? row.h_x * curve.lambda : 0.0;
    for (std::size_t k = 0; k < n; ++k) acc += row.h_g[k] * curve.gamma_at(k, i);
    y[i] = acc;
  }
  curve.y_reps.push_back(std::move(y));
  try {
    advance(curve, model, options);
  } catch (...) {
    curve.y_reps.pop_back();
    throw;
  }
}

template <class Model>
LimitCurve predict_impl(const Model& model, const GsaSpec& gsa, double lambda, std::size_t steps,
                        const PredictorOptions& options) {
  LimitCurve curve = init_impl(model, lambda, options);
  for (std::size_t n = 0; n < steps; ++n) step_impl(curve, model, gsa, options);
  return curve;
}

}  // namespace

LimitCurve limit_init(const KernelModel& kernel, double lambda, const PredictorOptions& options) {
  return init_impl(kernel, lambda, options);
}

LimitCurve limit_init(const StationaryModel& model, double lambda,
                      const PredictorOptions& options) {
  return init_impl(model, lambda, options);
}

void limit_step(LimitCurve& curve, const KernelModel& kernel, const GsaSpec& gsa,
                const PredictorOptions& options) {
  step_impl(curve, kernel, gsa, options);
}

void limit_step(LimitCurve& curve, const StationaryModel& model, const GsaSpec& gsa,
                const PredictorOptions& options) {
  step_impl(curve, model, gsa, options);
}

LimitCurve predict(const KernelModel& kernel, const GsaSpec& gsa, double lambda, std::size_t steps,
                   const PredictorOptions& options) {
  return predict_impl(kernel, gsa, lambda, steps, options);
}

LimitCurve predict(const StationaryModel& model, const GsaSpec& gsa, double lambda,
                   std::size_t steps, const PredictorOptions& options) {
  return predict_impl(model, gsa, lambda, steps, options);
}

InfoView limiting_info(const LimitCurve& curve, std::size_t n) {
  if (n >= curve.size()) throw ArgumentError("limiting_info: step beyond the computed curve");
  std::vector<double> f(curve.f_limit.begin(), curve.f_limit.begin() + n + 1);
  Matrix gram = curve.grad_gram_limit.topLeftCorner(n + 1, n + 1);
  std::vector<double> x0_grad(n + 1, 0.0);
  if (curve.lambda > 0.0) {
    for (std::size_t k = 0; k <= n; ++k) x0_grad[k] = curve.lambda * curve.gamma_at(k, 0);
  }
  return InfoView(std::move(f), std::move(gram), std::move(x0_grad), curve.lambda * curve.lambda);
}

HaltingTimes halting_times(const LimitCurve& curve, double epsilon) {
  HaltingTimes out;
  for (std::size_t n = 1; n < curve.size(); ++n) {
    const double g = curve.grad_gram_limit(n, n);
    if (!out.tau && g <= epsilon) out.tau = n;
    if (!out.tau_plus && g < epsilon) out.tau_plus = n;
  }
  return out;
}

}  // namespace grfopt
