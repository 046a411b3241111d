#ifndef PSWEEP_ERRORS_HPP
#define PSWEEP_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace psweep {

//! Base class for all solver errors so callers can catch the whole family.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct NonPositiveThreshold : Error {
  explicit NonPositiveThreshold(const std::string& msg) : Error(msg) {}
};

struct GridMismatch : Error {
  explicit GridMismatch(const std::string& msg) : Error(msg) {}
};

struct ThresholdViolation : Error {
  explicit ThresholdViolation(const std::string& msg) : Error(msg) {}
};

struct MissingDerivative : Error {
  explicit MissingDerivative(const std::string& msg) : Error(msg) {}
};

//! The constraint sets at s and t are too far apart for the shrink map.
struct WindowTooWide : Error {
  explicit WindowTooWide(const std::string& msg) : Error(msg) {}
};

struct ProxNoConvergence : Error {
  ProxNoConvergence(const std::string& msg, double residual)
      : Error(msg), last_residual(residual) {}
  double last_residual;
};

struct LinearNoConvergence : Error {
  LinearNoConvergence(const std::string& msg, double residual)
      : Error(msg), last_residual(residual) {}
  double last_residual;
};

struct PicardNoConvergence : Error {
  PicardNoConvergence(const std::string& msg, std::vector<double> ratios)
      : Error(msg), ratio_history(std::move(ratios)) {}
  std::vector<double> ratio_history;
};

struct BadParameters : Error {
  explicit BadParameters(const std::string& msg) : Error(msg) {}
};

struct BadPlan : Error {
  explicit BadPlan(const std::string& msg) : Error(msg) {}
};

struct DegenerateRadius : Error {
  explicit DegenerateRadius(const std::string& msg) : Error(msg) {}
};

struct ParseError : Error {
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

struct AssumptionViolation : Error {
  explicit AssumptionViolation(const std::string& msg) : Error(msg) {}
};

struct SuiteFailure : Error {
  explicit SuiteFailure(const std::string& msg) : Error(msg) {}
};

}  // namespace psweep

#endif
