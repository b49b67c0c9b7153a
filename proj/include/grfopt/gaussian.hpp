#pragma once

// Conditional Gaussian algebra and the sampling primitives shared by the
// limit predictor and the finite-dimensional samplers.

#include <Eigen/Core>
#include <cstdint>
#include <random>

namespace grfopt {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// How hard to try before declaring a symmetric matrix not positive definite.
///
/// Factorization is attempted on A + jI for j in {0, start, 10 start, ..., max}.
/// If every rung fails and `pseudo_inverse_fallback` is set, `condition` solves
/// through an eigenvalue-thresholded pseudo-inverse instead of throwing.
struct JitterPolicy {
  bool escalate = true;
  double start = 1e-12;
  double max = 1e-8;
  bool pseudo_inverse_fallback = false;

  static JitterPolicy none() { return {false, 0.0, 0.0, false}; }
  static JitterPolicy escalating(double start, double max) { return {true, start, max, false}; }
};

struct CholeskyFactor {
  Matrix lower;
  double jitter = 0.0;
};

/// Lower factor L with L L^T = A + jI for the smallest admissible jitter j.
/// Throws NotPsdError when the last rung of the ladder fails.
CholeskyFactor cholesky_psd(const Matrix& a, const JitterPolicy& policy);

/// Solves (L L^T) x = b in place using the factor.
void cholesky_solve_in_place(const Matrix& lower, Eigen::Ref<Vector> b);
Vector cholesky_solve(const CholeskyFactor& factor, const Vector& b);
Matrix cholesky_solve(const CholeskyFactor& factor, const Matrix& b);

/// Moore-Penrose inverse of a symmetric matrix with eigenvalues below
/// rel_threshold * ||A||_2 treated as zero.
Matrix symmetric_pseudo_inverse(const Matrix& a, double rel_threshold = 1e-10);

struct ConditioningResult {
  Vector cond_mean;
  Matrix cond_cov;
  double jitter_used = 0.0;
  bool rank_deficient = false;
  /// Smallest diagonal entry of the conditional covariance before clamping.
  double min_raw_diagonal = 0.0;

  double log_jitter_used() const;
};

/// Distribution of block 2 given block 1 = observed for the jointly Gaussian
/// vector with means (mu1, mu2) and covariance [[S11, S12], [S12^T, S22]].
ConditioningResult condition(const Vector& mu1, const Vector& mu2, const Matrix& s11,
                             const Matrix& s12, const Matrix& s22, const Vector& observed,
                             const JitterPolicy& policy = {});

/// One independent random stream. Streams with the same (master_seed,
/// stream_id) replay identical sequences; distinct stream ids are seeded
/// through separate seed sequences.
class RandomStream {
 public:
  RandomStream(std::uint64_t master_seed, std::uint64_t stream_id);

  double normal();
  double gamma(double shape, double scale);
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// mean + L z, z standard normal, L a factor of cov. Coordinates whose
/// variance is exactly zero (zero row and column) are returned as the mean.
Vector sample_mvn(const Vector& mean, const Matrix& cov, RandomStream& rng,
                  const JitterPolicy& policy = {});

/// Chi-square with real-valued degrees of freedom via gamma(dof/2, 2); exact
/// for any dof > 0, including dof in the billions.
double sample_chi_square(double dof, RandomStream& rng);

}  // namespace grfopt
