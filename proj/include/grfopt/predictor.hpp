#pragma once

// Deterministic N -> infinity limit of a gradient span algorithm run on a
// scaled isotropic Gaussian random function.
//
// The recursion carries, for every step n,
//   f_n          limit of f_N(X_n)
//   gamma_n^(i)  limit of <grad f_N(X_n), v_i>, i < d_{n+1}
//   y_n          limit coordinates of X_n in the running orthonormal basis
//   sigma_w(n)   limit norm of the gradient component orthogonal to V_n
// and is advanced by conditioning the next (f, D_v f) column on the history
// (the conditional covariance carries a 1/N and drops out in the limit).

#include <cstddef>
#include <optional>
#include <vector>

#include "grfopt/gaussian.hpp"
#include "grfopt/gsa.hpp"
#include "grfopt/kernel.hpp"
#include "grfopt/stationary.hpp"

namespace grfopt {

struct PredictorOptions {
  JitterPolicy policy{};
  /// Keep d constant instead of failing when the residual variance vanishes.
  bool freeze_dimension = false;
  double rank_tolerance = 1e-12;
  double distance_tolerance = 1e-10;
};

class LimitCurve {
 public:
  double lambda = 0.0;

  std::vector<double> f_limit;
  /// gamma[k] has d_{k+1} entries; coordinates beyond are identically zero.
  std::vector<std::vector<double>> gamma;
  /// y_reps[k] has d_k entries (the limit iterate lives in V_k).
  std::vector<std::vector<double>> y_reps;
  std::vector<double> sigma_w;
  /// d_0 .. d_{T+1}
  std::vector<std::size_t> dims;
  /// Steps at which the dimension was held (freeze-dimension mode only).
  std::vector<bool> frozen;
  Matrix grad_gram_limit;
  Matrix rho;

  /// Number of populated steps T + 1.
  std::size_t size() const { return f_limit.size(); }
  double gamma_at(std::size_t k, std::size_t i) const {
    return i < gamma[k].size() ? gamma[k][i] : 0.0;
  }
  double y_at(std::size_t k, std::size_t i) const {
    return i < y_reps[k].size() ? y_reps[k][i] : 0.0;
  }
  bool any_frozen() const;
};

LimitCurve limit_init(const KernelModel& kernel, double lambda, const PredictorOptions& options = {});
LimitCurve limit_init(const StationaryModel& model, double lambda,
                      const PredictorOptions& options = {});

void limit_step(LimitCurve& curve, const KernelModel& kernel, const GsaSpec& gsa,
                const PredictorOptions& options = {});
void limit_step(LimitCurve& curve, const StationaryModel& model, const GsaSpec& gsa,
                const PredictorOptions& options = {});

LimitCurve predict(const KernelModel& kernel, const GsaSpec& gsa, double lambda, std::size_t steps,
                   const PredictorOptions& options = {});
LimitCurve predict(const StationaryModel& model, const GsaSpec& gsa, double lambda,
                   std::size_t steps, const PredictorOptions& options = {});

/// Limiting information after step n: f values, gradient Gram sum_i
/// gamma_k^(i) gamma_l^(i), <x_0, grad f(X_k)> = lambda gamma_k^(0) (zero when
/// lambda = 0) and |x_0|^2 = lambda^2.
InfoView limiting_info(const LimitCurve& curve, std::size_t n);

/// First step n > 0 satisfying the criterion, or nullopt if none is reached
/// within the available horizon.
using HaltingStep = std::optional<std::size_t>;

struct HaltingTimes {
  HaltingStep tau;       // first n > 0 with g_nn <= eps
  HaltingStep tau_plus;  // first n > 0 with g_nn <  eps
};

HaltingTimes halting_times(const LimitCurve& curve, double epsilon);

}  // namespace grfopt
