#pragma once

// Dense inner loops used by the factorizations and the ambient-space oracle.
//
// Every kernel has a portable scalar reference implementation; an AVX2/FMA
// variant is compiled into a separate translation unit and selected once at
// startup when the CPU supports it. Set GRFOPT_SIMD=scalar to force the
// reference path (the avx2 value is honoured only if the CPU supports it).

#include <cstddef>
#include <span>
#include <string_view>

namespace grfopt::simd {

enum class Isa { scalar, avx2 };

struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out = a * p + b * q
  void (*combine2)(double a, const double* p, double b, const double* q,
                   double* out, std::size_t n);
};

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void combine2(double a, const double* p, double b, const double* q, double* out,
              std::size_t n);
}  // namespace scalar

#if defined(GRFOPT_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void combine2(double a, const double* p, double b, const double* q, double* out,
              std::size_t n);
}  // namespace avx2
#endif

/// True if this binary carries the variant and the running CPU can execute it.
bool isa_available(Isa isa);

/// Kernel table for a specific ISA; throws ArgumentError if unavailable.
const KernelTable& table(Isa isa);

/// Table chosen at first use (best available, overridable by GRFOPT_SIMD).
const KernelTable& active();
Isa active_isa();
std::string_view isa_name(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

inline void combine2(double a, std::span<const double> p, double b,
                     std::span<const double> q, std::span<double> out) {
  active().combine2(a, p.data(), b, q.data(), out.data(), out.size());
}

}  // namespace grfopt::simd
