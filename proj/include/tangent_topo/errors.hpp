#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ttopo {

enum class ErrorCode {
  // geometry
  InvalidPolyhedron,
  SeparationViolation,
  DegenerateCut,
  BasePointOutside,
  // sphere
  AntipodalEndpoints,
  AntipodalPair,
  OnBoundary,
  NotInPlane,
  MaxRefinement,
  NotClosed,
  ResolutionTooCoarse,
  // fields
  CoarseSampling,
  InvalidField,
  // invariants
  NoAdmissibleS,
  NonConstantEdge,
  ParallelEndpoints,
  ResidualTooLarge,
  SOnBoundaryImage,
  NotRegularValue,
  AntipodalFanPair,
  SOnTriangleBoundary,
  DualRouteMismatch,
  // synthesis
  SumRuleViolation,
  GeodesicAntipodal,
  NonzeroWinding,
  // io
  ParseError,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so that
/// callers (notably the CLI) can branch on the kind of failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, std::string(to_string(code)) + ": " + what);
}

}  // namespace ttopo
