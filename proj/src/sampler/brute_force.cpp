#include <cmath>
#include <string>

#include "grfopt/errors.hpp"
#include "grfopt/sampler.hpp"
#include "grfopt/simd.hpp"

namespace grfopt {

namespace {

// N times the covariance between the (f, d_1 f, ..., d_N f) blocks at a and b,
// written into out(row0 + r, col0 + c).
void fill_block(const KernelModel& kernel, const Vector& a, const Vector& b, Matrix& out,
                Eigen::Index row0, Eigen::Index col0) {
  const auto n = a.size();
  const auto p = kernel.at(0.5 * a.squaredNorm(), 0.5 * b.squaredNorm(), a.dot(b)).p;
  const std::span<const double> sa(a.data(), n);
  const std::span<const double> sb(b.data(), n);

  out(row0, col0) = p.k;
  std::vector<double> u(n), v(n), row(n);
  simd::combine2(p.k2, sb, p.k3, sa, u);  // Cov(f(a), d_j f(b))
  for (Eigen::Index j = 0; j < n; ++j) out(row0, col0 + 1 + j) = u[j];
  simd::combine2(p.k1, sa, p.k3, sb, u);  // Cov(d_i f(a), f(b))
  for (Eigen::Index i = 0; i < n; ++i) out(row0 + 1 + i, col0) = u[i];

  simd::combine2(p.k12, sb, p.k13, sa, u);
  simd::combine2(p.k23, sb, p.k33, sa, v);
  for (Eigen::Index i = 0; i < n; ++i) {
    simd::combine2(a(i), u, b(i), v, row);
    row[i] += p.k3;
    for (Eigen::Index j = 0; j < n; ++j) out(row0 + 1 + i, col0 + 1 + j) = row[j];
  }
}

}  // namespace

TrajectoryRecord brute_force_path(const KernelModel& kernel, const GsaSpec& gsa, const Vector& x0,
                                  std::size_t steps, std::uint64_t stream_id,
                                  std::uint64_t master_seed, const SamplerOptions& options) {
  const auto N = x0.size();
  if (N < 1 || N > 64) throw ArgumentError("brute_force_path supports 1 <= N <= 64");
  if (steps > 6) throw ArgumentError("brute_force_path supports at most 6 steps");

  const Eigen::Index block = N + 1;
  const double n_dim = static_cast<double>(N);

  TrajectoryRecord rec;
  rec.N = static_cast<std::uint64_t>(N);
  rec.master_seed = master_seed;
  rec.stream_id = stream_id;
  rec.lambda = x0.norm();
  rec.grad_gram = Matrix::Zero(steps + 1, steps + 1);
  rec.x_coords = Matrix::Zero(steps + 1, N);

  RandomStream rng(master_seed, stream_id);
  std::vector<Vector> points;
  std::vector<Vector> grads;
  Vector history;  // realized blocks in point order

  for (std::size_t n = 0; n <= steps; ++n) {
    Vector x = x0;
    if (n > 0) {
      const PrefactorRow row = gsa.prefactors(n, rec.info(n - 1));
      x = row.h_x * x0;
      for (std::size_t k = 0; k < n; ++k) {
        simd::axpy(row.h_g[k], std::span<const double>(grads[k].data(), N),
                   std::span<double>(x.data(), N));
      }
    }
    points.push_back(x);
    rec.x_coords.row(n) = x.transpose();

    const Eigen::Index hist = static_cast<Eigen::Index>(n) * block;
    Matrix s11(hist, hist), s12(hist, block), s22(block, block);
    Vector mu1(hist), mu2(block);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t l = k; l < n; ++l) {
        fill_block(kernel, points[k], points[l], s11, k * block, l * block);
        if (l != k) {
          s11.block(l * block, k * block, block, block) =
              s11.block(k * block, l * block, block, block).transpose();
        }
      }
      fill_block(kernel, points[k], x, s12, k * block, 0);
      const double s = 0.5 * points[k].squaredNorm();
      mu1(k * block) = kernel.mean(s);
      mu1.segment(k * block + 1, N) = kernel.mean_slope(s) * points[k];
    }
    fill_block(kernel, x, x, s22, 0, 0);
    s22 = 0.5 * (s22 + s22.transpose()).eval();
    const double s = 0.5 * x.squaredNorm();
    mu2(0) = kernel.mean(s);
    mu2.segment(1, N) = kernel.mean_slope(s) * x;

    const ConditioningResult column = condition(mu1, mu2, s11, s12, s22, history, options.policy);
    const Vector draw = sample_mvn(column.cond_mean, column.cond_cov / n_dim, rng, options.policy);

    history.conservativeResize(hist + block);
    history.tail(block) = draw;
    rec.f_values.push_back(draw(0));
    grads.push_back(draw.tail(N));
    for (std::size_t k = 0; k <= n; ++k) {
      const double g = simd::dot(std::span<const double>(grads[n].data(), N),
                                 std::span<const double>(grads[k].data(), N));
      rec.grad_gram(n, k) = g;
      rec.grad_gram(k, n) = g;
    }
    rec.x0_grad.push_back(x0.dot(grads[n]));
  }

  rec.epsilons = options.epsilons;
  for (double eps : options.epsilons) rec.halting.push_back(empirical_halting_time(rec, eps));
  return rec;
}

}  // namespace grfopt
