#include "shrinker/geometry.hpp"

namespace shrinker {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateMetric: return "DegenerateMetric";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::ResolutionTooLow: return "ResolutionTooLow";
    case ErrorCode::InvalidDimension: return "InvalidDimension";
    case ErrorCode::NonpositiveRadius: return "NonpositiveRadius";
    case ErrorCode::NoRoot: return "NoRoot";
    case ErrorCode::NotLegendrian: return "NotLegendrian";
    case ErrorCode::NotClosed: return "NotClosed";
    case ErrorCode::AllProjectionsZero: return "AllProjectionsZero";
    case ErrorCode::SymmetryRequired: return "SymmetryRequired";
    case ErrorCode::NonpositiveScale: return "NonpositiveScale";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::NotCritical: return "NotCritical";
    case ErrorCode::ZeroMeanCurvature: return "ZeroMeanCurvature";
    case ErrorCode::CaseNotCovered: return "CaseNotCovered";
    case ErrorCode::CertificateFailed: return "CertificateFailed";
    case ErrorCode::UnknownName: return "UnknownName";
  }
  return "Unknown";
}

}  // namespace shrinker
