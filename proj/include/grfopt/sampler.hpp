#pragma once

// Exact finite-N simulation of the information process of a gradient span
// algorithm. The iterates are represented by their coordinates in the
// previsible orthonormal basis v_0, v_1, ... built from x_0 and the gradients,
// so a run never touches N-dimensional vectors: each step draws the
// (f, D_v f) block from its conditional Gaussian and the norm of the gradient
// part orthogonal to the current span from a scaled chi-square.
//
// `brute_force_path` is the ambient-space oracle for small N.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "grfopt/gaussian.hpp"
#include "grfopt/gsa.hpp"
#include "grfopt/kernel.hpp"
#include "grfopt/predictor.hpp"
#include "grfopt/stationary.hpp"

namespace grfopt {

struct SamplerOptions {
  JitterPolicy policy{};
  bool freeze_dimension = false;
  double rank_tolerance = 1e-12;
  /// Halting thresholds evaluated on the finished record.
  std::vector<double> epsilons;
};

struct TrajectoryRecord {
  std::uint64_t N = 0;
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;
  double lambda = 0.0;

  std::vector<double> f_values;
  /// sum_i G(k, i) G(l, i)
  Matrix grad_gram;
  std::vector<double> x0_grad;
  /// <grad f(X_k), v_i>; row k is exactly zero beyond dims[k + 1].
  /// Empty for ambient-space records.
  Matrix G;
  /// <X_k, v_i>
  Matrix x_coords;
  /// d_0 .. d_{T+1}
  std::vector<std::size_t> dims;

  std::vector<double> epsilons;
  std::vector<HaltingStep> halting;

  std::size_t size() const { return f_values.size(); }
  double grad_norm_sq(std::size_t n) const { return grad_gram(n, n); }
  /// Information after step n in the form consumed by GsaSpec.
  InfoView info(std::size_t n) const;
};

/// One trajectory of T = steps iterations in dimension N with |x_0| = lambda.
/// Requires N > steps + 2.
TrajectoryRecord simulate_info_path(const KernelModel& kernel, const GsaSpec& gsa, double lambda,
                                    std::uint64_t N, std::size_t steps, std::uint64_t stream_id,
                                    std::uint64_t master_seed, const SamplerOptions& options = {});
TrajectoryRecord simulate_info_path(const StationaryModel& model, const GsaSpec& gsa,
                                    double lambda, std::uint64_t N, std::size_t steps,
                                    std::uint64_t stream_id, std::uint64_t master_seed,
                                    const SamplerOptions& options = {});

/// Ambient-space oracle: explicit X_k in R^N (N = x0.size() <= 64, steps <= 6),
/// full (f, grad f) blocks conditioned on every earlier block.
TrajectoryRecord brute_force_path(const KernelModel& kernel, const GsaSpec& gsa, const Vector& x0,
                                  std::size_t steps, std::uint64_t stream_id,
                                  std::uint64_t master_seed, const SamplerOptions& options = {});

/// First n > 0 with |grad f(X_n)|^2 <= epsilon.
HaltingStep empirical_halting_time(const TrajectoryRecord& record, double epsilon);

}  // namespace grfopt
