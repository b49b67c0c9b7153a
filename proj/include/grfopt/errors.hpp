#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace grfopt {

/// Broad classification used by the CLI to pick an exit code.
enum class ErrorClass { argument, config, numerical };

class Error : public std::runtime_error {
 public:
  Error(std::string kind, ErrorClass cls, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)), class_(cls) {}

  const std::string& kind() const noexcept { return kind_; }
  ErrorClass error_class() const noexcept { return class_; }

 private:
  std::string kind_;
  ErrorClass class_;
};

#define GRFOPT_DEFINE_ERROR(Name, tag, cls)                               \
  class Name : public Error {                                             \
   public:                                                                \
    explicit Name(const std::string& what) : Error(tag, cls, what) {}     \
  }

GRFOPT_DEFINE_ERROR(ArgumentError, "argument", ErrorClass::argument);
GRFOPT_DEFINE_ERROR(ConfigError, "config", ErrorClass::config);
GRFOPT_DEFINE_ERROR(DomainError, "domain", ErrorClass::numerical);
GRFOPT_DEFINE_ERROR(InvalidMixtureError, "invalid_mixture", ErrorClass::numerical);
GRFOPT_DEFINE_ERROR(DegenerateKernelError, "degenerate_kernel", ErrorClass::numerical);
GRFOPT_DEFINE_ERROR(DegenerateProjectionError, "degenerate_projection", ErrorClass::numerical);
GRFOPT_DEFINE_ERROR(NotPsdError, "not_psd", ErrorClass::numerical);
GRFOPT_DEFINE_ERROR(RankStallError, "rank_stall", ErrorClass::numerical);
GRFOPT_DEFINE_ERROR(CoincidentPointsError, "coincident_points", ErrorClass::numerical);
GRFOPT_DEFINE_ERROR(NumericalConsistencyError, "numerical_consistency", ErrorClass::numerical);
GRFOPT_DEFINE_ERROR(QuadratureError, "quadrature", ErrorClass::numerical);

#undef GRFOPT_DEFINE_ERROR

/// Shortest %g-style rendering, for error messages.
inline std::string to_message(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

}  // namespace grfopt
