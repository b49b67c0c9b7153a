#include "grfopt/simd.hpp"

namespace grfopt::simd::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void combine2(double a, const double* p, double b, const double* q, double* out,
              std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * p[i] + b * q[i];
}

}  // namespace grfopt::simd::scalar
