#pragma once

#include <stdexcept>
#include <string>

namespace parisian {

/// Invalid parameters or configuration. Message names the violated constraint.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class NumericalFailure {
  truncation,          // a tail bound could not certify the requested mass
  root_not_bracketed,  // Lundberg equation has no sign change on the search interval
  dependency_missing,  // a lower-order grid was not available
  tolerance_not_met,   // cancellation produced a value below the clamp slack
  series_divergence,   // Neumann series failed to contract
  non_finite,          // integrand produced NaN or inf
};

inline const char* to_string(NumericalFailure kind) {
  switch (kind) {
    case NumericalFailure::truncation: return "truncation-failure";
    case NumericalFailure::root_not_bracketed: return "root-not-bracketed";
    case NumericalFailure::dependency_missing: return "dependency-missing";
    case NumericalFailure::tolerance_not_met: return "tolerance-not-met";
    case NumericalFailure::series_divergence: return "series-divergence";
    case NumericalFailure::non_finite: return "non-finite-integrand";
  }
  return "numerical-failure";
}

class NumericalError : public std::runtime_error {
 public:
  NumericalError(NumericalFailure kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  NumericalFailure kind() const noexcept { return kind_; }

 private:
  NumericalFailure kind_;
};

}  // namespace parisian
