#include "tangent_topo/errors.hpp"

namespace ttopo {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidPolyhedron: return "InvalidPolyhedron";
    case ErrorCode::SeparationViolation: return "SeparationViolation";
    case ErrorCode::DegenerateCut: return "DegenerateCut";
    case ErrorCode::BasePointOutside: return "BasePointOutside";
    case ErrorCode::AntipodalEndpoints: return "AntipodalEndpoints";
    case ErrorCode::AntipodalPair: return "AntipodalPair";
    case ErrorCode::OnBoundary: return "OnBoundary";
    case ErrorCode::NotInPlane: return "NotInPlane";
    case ErrorCode::MaxRefinement: return "MaxRefinement";
    case ErrorCode::NotClosed: return "NotClosed";
    case ErrorCode::ResolutionTooCoarse: return "ResolutionTooCoarse";
    case ErrorCode::CoarseSampling: return "CoarseSampling";
    case ErrorCode::InvalidField: return "InvalidField";
    case ErrorCode::NoAdmissibleS: return "NoAdmissibleS";
    case ErrorCode::NonConstantEdge: return "NonConstantEdge";
    case ErrorCode::ParallelEndpoints: return "ParallelEndpoints";
    case ErrorCode::ResidualTooLarge: return "ResidualTooLarge";
    case ErrorCode::SOnBoundaryImage: return "SOnBoundaryImage";
    case ErrorCode::NotRegularValue: return "NotRegularValue";
    case ErrorCode::AntipodalFanPair: return "AntipodalFanPair";
    case ErrorCode::SOnTriangleBoundary: return "SOnTriangleBoundary";
    case ErrorCode::DualRouteMismatch: return "DualRouteMismatch";
    case ErrorCode::SumRuleViolation: return "SumRuleViolation";
    case ErrorCode::GeodesicAntipodal: return "GeodesicAntipodal";
    case ErrorCode::NonzeroWinding: return "NonzeroWinding";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace ttopo
