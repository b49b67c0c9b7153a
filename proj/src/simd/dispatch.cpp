#include <cstdlib>
#include <string>

#include "grfopt/errors.hpp"
#include "grfopt/simd.hpp"

namespace grfopt::simd {

namespace {

constexpr KernelTable kScalar{&scalar::dot, &scalar::axpy, &scalar::combine2};
#if defined(GRFOPT_HAVE_AVX2)
constexpr KernelTable kAvx2{&avx2::dot, &avx2::axpy, &avx2::combine2};
#endif

Isa select_isa() {
  const char* env = std::getenv("GRFOPT_SIMD");
  if (env != nullptr && std::string(env) == "scalar") return Isa::scalar;
  if (isa_available(Isa::avx2)) return Isa::avx2;
  return Isa::scalar;
}

}  // namespace

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(GRFOPT_HAVE_AVX2)
      __builtin_cpu_init();
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!isa_available(isa)) {
    throw ArgumentError("simd variant '" + std::string(isa_name(isa)) + "' is not available");
  }
#if defined(GRFOPT_HAVE_AVX2)
  if (isa == Isa::avx2) return kAvx2;
#endif
  return kScalar;
}

Isa active_isa() {
  static const Isa isa = select_isa();
  return isa;
}

const KernelTable& active() {
  static const KernelTable& t = table(active_isa());
  return t;
}

std::string_view isa_name(Isa isa) {
  return isa == Isa::avx2 ? "avx2" : "scalar";
}

}  // namespace grfopt::simd
