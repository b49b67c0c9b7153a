#include "grfopt/gaussian.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <vector>

#include "grfopt/errors.hpp"
#include "grfopt/simd.hpp"

namespace grfopt {

namespace {

// Row-oriented Cholesky of a + jitter*I. Returns false on a non-positive or
// non-finite pivot; pivots below n*eps*max|diag| count as failures so that an
// exactly singular matrix is not accepted on rounding noise.
bool try_cholesky(const Matrix& a, double jitter, Matrix& lower) {
  const auto n = static_cast<std::size_t>(a.rows());
  lower.setZero(a.rows(), a.cols());
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a(i, i)));
  const double floor = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * max_diag;

  const auto& kern = simd::active();
  for (std::size_t i = 0; i < n; ++i) {
    double* row_i = lower.row(i).data();
    for (std::size_t j = 0; j <= i; ++j) {
      const double* row_j = lower.row(j).data();
      double s = a(i, j) - kern.dot(row_i, row_j, j);
      if (i == j) {
        s += jitter;
        if (!(s > floor) || !std::isfinite(s)) return false;
        row_i[i] = std::sqrt(s);
      } else {
        row_i[j] = s / row_j[j];
      }
    }
  }
  return true;
}

void check_finite(const Matrix& m, const char* name) {
  if (!m.allFinite()) throw ArgumentError(std::string("non-finite entries in ") + name);
}

void check_finite(const Vector& v, const char* name) {
  if (!v.allFinite()) throw ArgumentError(std::string("non-finite entries in ") + name);
}

}  // namespace

CholeskyFactor cholesky_psd(const Matrix& a, const JitterPolicy& policy) {
  if (a.rows() != a.cols()) throw ArgumentError("cholesky_psd: matrix is not square");
  CholeskyFactor out;
  if (try_cholesky(a, 0.0, out.lower)) return out;
  if (policy.escalate && policy.start > 0.0) {
    for (double j = policy.start; j <= policy.max * (1.0 + 1e-12); j *= 10.0) {
      if (try_cholesky(a, j, out.lower)) {
        out.jitter = j;
        return out;
      }
    }
  }
  throw NotPsdError("matrix of size " + std::to_string(a.rows()) +
                    " is not positive definite within the jitter ladder");
}

void cholesky_solve_in_place(const Matrix& lower, Eigen::Ref<Vector> b) {
  const auto n = static_cast<std::size_t>(lower.rows());
  const auto& kern = simd::active();
  double* x = b.data();
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = (x[i] - kern.dot(lower.row(i).data(), x, i)) / lower(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    x[i] /= lower(i, i);
    kern.axpy(-x[i], lower.row(i).data(), x, i);
  }
}

Vector cholesky_solve(const CholeskyFactor& factor, const Vector& b) {
  Vector x = b;
  cholesky_solve_in_place(factor.lower, x);
  return x;
}

Matrix cholesky_solve(const CholeskyFactor& factor, const Matrix& b) {
  Matrix out(b.rows(), b.cols());
  Vector col(b.rows());
  for (Eigen::Index c = 0; c < b.cols(); ++c) {
    col = b.col(c);
    cholesky_solve_in_place(factor.lower, col);
    out.col(c) = col;
  }
  return out;
}

Matrix symmetric_pseudo_inverse(const Matrix& a, double rel_threshold) {
  const Eigen::MatrixXd dense = a;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense);
  const Eigen::VectorXd& values = eig.eigenvalues();
  const double norm = values.size() == 0 ? 0.0 : values.cwiseAbs().maxCoeff();
  const double cut = rel_threshold * norm;
  Eigen::VectorXd inv(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    inv(i) = values(i) > cut ? 1.0 / values(i) : 0.0;
  }
  const Eigen::MatrixXd& q = eig.eigenvectors();
  return q * inv.asDiagonal() * q.transpose();
}

double ConditioningResult::log_jitter_used() const {
  return jitter_used > 0.0 ? std::log10(jitter_used) : -std::numeric_limits<double>::infinity();
}

ConditioningResult condition(const Vector& mu1, const Vector& mu2, const Matrix& s11,
                             const Matrix& s12, const Matrix& s22, const Vector& observed,
                             const JitterPolicy& policy) {
  const Eigen::Index n1 = mu1.size();
  const Eigen::Index n2 = mu2.size();
  if (s11.rows() != n1 || s11.cols() != n1 || s12.rows() != n1 || s12.cols() != n2 ||
      s22.rows() != n2 || s22.cols() != n2 || observed.size() != n1) {
    throw ArgumentError("condition: inconsistent block dimensions");
  }
  check_finite(mu1, "mu1");
  check_finite(mu2, "mu2");
  check_finite(s11, "S11");
  check_finite(s12, "S12");
  check_finite(s22, "S22");
  check_finite(observed, "observed");

  ConditioningResult out;
  if (n1 == 0) {
    out.cond_mean = mu2;
    out.cond_cov = s22;
  } else {
    Vector residual = observed - mu1;
    Matrix gain;  // S11^{-1} S12
    Vector weights;
    try {
      CholeskyFactor factor = cholesky_psd(s11, policy);
      out.jitter_used = factor.jitter;
      gain = cholesky_solve(factor, s12);
      weights = cholesky_solve(factor, residual);
    } catch (const NotPsdError&) {
      if (!policy.pseudo_inverse_fallback) throw;
      Matrix pinv = symmetric_pseudo_inverse(s11);
      gain = pinv * s12;
      weights = pinv * residual;
      out.rank_deficient = true;
    }
    out.cond_mean = mu2 + s12.transpose() * weights;
    out.cond_cov = s22 - s12.transpose() * gain;
    out.cond_cov = 0.5 * (out.cond_cov + out.cond_cov.transpose()).eval();
  }

  out.min_raw_diagonal = n2 == 0 ? 0.0 : out.cond_cov.diagonal().minCoeff();
  for (Eigen::Index i = 0; i < n2; ++i) {
    if (out.cond_cov(i, i) < 0.0) out.cond_cov(i, i) = 0.0;
  }
  return out;
}

RandomStream::RandomStream(std::uint64_t master_seed, std::uint64_t stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                    static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32), 0x67726fu};
  engine_.seed(seq);
}

double RandomStream::normal() { return normal_(engine_); }

double RandomStream::gamma(double shape, double scale) {
  std::gamma_distribution<double> dist(shape, scale);
  return dist(engine_);
}

Vector sample_mvn(const Vector& mean, const Matrix& cov, RandomStream& rng,
                  const JitterPolicy& policy) {
  const Eigen::Index n = mean.size();
  if (cov.rows() != n || cov.cols() != n) throw ArgumentError("sample_mvn: size mismatch");

  std::vector<Eigen::Index> active;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (cov(i, i) != 0.0 || cov.row(i).any() || cov.col(i).any()) active.push_back(i);
  }
  Vector out = mean;
  if (active.empty()) return out;

  const auto m = static_cast<Eigen::Index>(active.size());
  Matrix sub(m, m);
  for (Eigen::Index r = 0; r < m; ++r)
    for (Eigen::Index c = 0; c < m; ++c) sub(r, c) = cov(active[r], active[c]);
  CholeskyFactor factor = cholesky_psd(sub, policy);

  Vector z(m);
  for (Eigen::Index i = 0; i < m; ++i) z(i) = rng.normal();
  Vector shift = factor.lower.triangularView<Eigen::Lower>() * z;
  for (Eigen::Index r = 0; r < m; ++r) out(active[r]) += shift(r);
  return out;
}

double sample_chi_square(double dof, RandomStream& rng) {
  if (!(dof > 0.0) || !std::isfinite(dof)) {
    throw ArgumentError("chi-square degrees of freedom must be positive and finite");
  }
  return rng.gamma(0.5 * dof, 2.0);
}

}  // namespace grfopt
