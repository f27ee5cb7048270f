#pragma once
#include <stdexcept>
#include <string>

namespace shrinker {

enum class ErrorCode {
  DegenerateMetric,
  GridTooCoarse,
  InvalidSpec,
  ResolutionTooLow,
  InvalidDimension,
  NonpositiveRadius,
  NoRoot,
  NotLegendrian,
  NotClosed,
  AllProjectionsZero,
  SymmetryRequired,
  NonpositiveScale,
  GridMismatch,
  NotCritical,
  ZeroMeanCurvature,
  CaseNotCovered,
  CertificateFailed,
  UnknownName,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace shrinker
