#include "grfopt/sampler.hpp"

#include <cmath>
#include <string>

#include "grfopt/assembly.hpp"
#include "grfopt/errors.hpp"

namespace grfopt {

InfoView TrajectoryRecord::info(std::size_t n) const {
  if (n >= size()) throw ArgumentError("trajectory record does not cover the requested step");
  std::vector<double> f(f_values.begin(), f_values.begin() + n + 1);
  std::vector<double> x0g(x0_grad.begin(), x0_grad.begin() + n + 1);
  Matrix gram = grad_gram.topLeftCorner(n + 1, n + 1);
  return InfoView(std::move(f), std::move(gram), std::move(x0g), lambda * lambda);
}

HaltingStep empirical_halting_time(const TrajectoryRecord& record, double epsilon) {
  for (std::size_t n = 1; n < record.size(); ++n) {
    if (record.grad_norm_sq(n) <= epsilon) return n;
  }
  return std::nullopt;
}

namespace {

void finish_halting(TrajectoryRecord& record, const SamplerOptions& options) {
  record.epsilons = options.epsilons;
  record.halting.clear();
  for (double eps : options.epsilons) record.halting.push_back(empirical_halting_time(record, eps));
}

template <class Model>
TrajectoryRecord simulate_impl(const Model& model, const GsaSpec& gsa, double lambda,
                               std::uint64_t N, std::size_t steps, std::uint64_t stream_id,
                               std::uint64_t master_seed, const SamplerOptions& options) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ArgumentError("initialization norm lambda must be finite and non-negative");
  }
  if (N <= steps + 2) {
    throw ArgumentError("simulate_info_path needs N > steps + 2 (N = " + std::to_string(N) +
                        ", steps = " + std::to_string(steps) + ")");
  }
  const double n_dim = static_cast<double>(N);
  const std::size_t d0 = lambda > 0.0 ? 1 : 0;
  const std::size_t width = d0 + steps + 1;

  TrajectoryRecord rec;
  rec.N = N;
  rec.master_seed = master_seed;
  rec.stream_id = stream_id;
  rec.lambda = lambda;
  rec.G = Matrix::Zero(steps + 1, width);
  rec.x_coords = Matrix::Zero(steps + 1, width);
  rec.grad_gram = Matrix::Zero(steps + 1, steps + 1);
  rec.dims.push_back(d0);
  if (lambda > 0.0) rec.x_coords(0, 0) = lambda;

  RandomStream rng(master_seed, stream_id);

  for (std::size_t n = 0; n <= steps; ++n) {
    const std::size_t d = rec.dims.back();
    if (n > 0) {
      const PrefactorRow row = gsa.prefactors(n, rec.info(n - 1));
      for (std::size_t i = 0; i < d; ++i) {
        double acc = (i == 0 && lambda > 0.0) ? row.h_x * lambda : 0.0;
        for (std::size_t k = 0; k < n; ++k) acc += row.h_g[k] * rec.G(k, i);
        rec.x_coords(n, i) = acc;
      }
    }

    const Matrix coords = rec.x_coords.topLeftCorner(n + 1, d);
    const StepBlocks blocks = assemble_step(model, coords);
    const Vector observed = history_vector(rec.f_values, n, d, [&](std::size_t k, std::size_t i) {
      return rec.G(k, i);
    });
    const ConditioningResult column = condition(blocks.mu1, blocks.mu2, blocks.s11, blocks.s12,
                                                blocks.s22, observed, options.policy);
    const Matrix cov = column.cond_cov / n_dim;
    const Vector draw = sample_mvn(column.cond_mean, cov, rng, options.policy);

    const ConditioningResult residual =
        condition(Vector::Zero(n), Vector::Zero(1), blocks.w11, blocks.w12, blocks.w22,
                  Vector::Zero(n), options.policy);
    const double sigma_sq = residual.min_raw_diagonal;
    if (sigma_sq < -1e-10) {
      throw NumericalConsistencyError("negative residual gradient variance " +
                                      to_message(sigma_sq) + " at step " + std::to_string(n));
    }

    rec.f_values.push_back(draw(0));
    for (std::size_t i = 0; i < d; ++i) rec.G(n, i) = draw(1 + i);

    if (!(sigma_sq > options.rank_tolerance)) {
      if (n == 0) {
        throw DegenerateKernelError("kappa_3 at the starting point is " +
                                    to_message(sigma_sq));
      }
      if (!options.freeze_dimension) {
        throw RankStallError("residual gradient variance " + to_message(sigma_sq) +
                             " at step " + std::to_string(n));
      }
      rec.dims.push_back(d);
    } else {
      const double dof = n_dim - static_cast<double>(d);
      const double norm_sq = sigma_sq / n_dim * sample_chi_square(dof, rng);
      rec.G(n, d) = std::sqrt(norm_sq);
      rec.dims.push_back(d + 1);
    }

    for (std::size_t k = 0; k <= n; ++k) {
      const double g = rec.G.row(n).dot(rec.G.row(k));
      rec.grad_gram(n, k) = g;
      rec.grad_gram(k, n) = g;
    }
    rec.x0_grad.push_back(lambda > 0.0 ? lambda * rec.G(n, 0) : 0.0);
  }

  const auto used = static_cast<Eigen::Index>(rec.dims.back());
  rec.G = rec.G.leftCols(used).eval();
  rec.x_coords = rec.x_coords.leftCols(used).eval();
  finish_halting(rec, options);
  return rec;
}

}  // namespace

TrajectoryRecord simulate_info_path(const KernelModel& kernel, const GsaSpec& gsa, double lambda,
                                    std::uint64_t N, std::size_t steps, std::uint64_t stream_id,
                                    std::uint64_t master_seed, const SamplerOptions& options) {
  return simulate_impl(kernel, gsa, lambda, N, steps, stream_id, master_seed, options);
}

TrajectoryRecord simulate_info_path(const StationaryModel& model, const GsaSpec& gsa,
                                    double lambda, std::uint64_t N, std::size_t steps,
                                    std::uint64_t stream_id, std::uint64_t master_seed,
                                    const SamplerOptions& options) {
  return simulate_impl(model, gsa, lambda, N, steps, stream_id, master_seed, options);
}

}  // namespace grfopt
