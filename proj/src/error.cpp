#include "mag/error.hpp"

namespace mag {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidDimension: return "InvalidDimension";
    case ErrorCode::EmptyDomain: return "EmptyDomain";
    case ErrorCode::NonPositiveStep: return "NonPositiveStep";
    case ErrorCode::DegenerateFrame: return "DegenerateFrame";
    case ErrorCode::PointTooCloseToBoundary: return "PointTooCloseToBoundary";
    case ErrorCode::StrategyUnavailable: return "StrategyUnavailable";
    case ErrorCode::SlotVarianceMismatch: return "SlotVarianceMismatch";
    case ErrorCode::SlotReuse: return "SlotReuse";
    case ErrorCode::SingularMetric: return "SingularMetric";
    case ErrorCode::FrameMismatch: return "FrameMismatch";
    case ErrorCode::GeneratorShapeMismatch: return "GeneratorShapeMismatch";
    case ErrorCode::NumericalRankAmbiguity: return "NumericalRankAmbiguity";
    case ErrorCode::AnholonomicFrameUnsupported: return "AnholonomicFrameUnsupported";
    case ErrorCode::FlowLeftDomain: return "FlowLeftDomain";
    case ErrorCode::ExtrapolationNonConvergent: return "ExtrapolationNonConvergent";
    case ErrorCode::ConfigParseError: return "ConfigParseError";
    case ErrorCode::CatalogMiss: return "CatalogMiss";
  }
  return "Unknown";
}

}  // namespace mag
