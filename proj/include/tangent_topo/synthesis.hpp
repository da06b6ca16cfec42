#pragma once

// Representative boundary fields for admissible invariant sets.

#include <memory>
#include <random>
#include <vector>

#include "tangent_topo/fields.hpp"
#include "tangent_topo/invariants.hpp"

namespace ttopo {

inline constexpr int kMaxWrapping = 8;

/// An invariant set whose sum rules hold, with the covering-patch frame (xi x eta = s).
struct AdmissibleInvariants {
  InvariantSet inv;
  Vec3 xi;   // xi, eta orthonormal, perpendicular to s
  Vec3 eta;
};

/// Validates sizes, edge parallelism, the reference direction and both sum
/// rules. Edge orientations are snapped to the exact edge directions.
AdmissibleInvariants make_admissible(InvariantSet inv, const TruncatedPolyhedron& phat);

/// sin(2 pi rho) (cos(w phi) xi + sin(w phi) eta) + cos(2 pi rho) s.
UnitVector covering_patch(double rho, double phi, int omega, const Vec3& xi, const Vec3& eta, const Vec3& s);

/// Contraction of a closed loop in the great circle perpendicular to `axis`
/// through its lifted angle: h(rho, phi) = R(axis, rho theta(phi)) loop(0).
class LoopContraction {
 public:
  LoopContraction(Vec3 axis, Vec3 ref, std::vector<double> t, std::vector<double> theta);
  /// Lifted angle at phi in [0, 2 pi], linear between samples.
  double theta(double phi) const;
  UnitVector at(double rho, double phi) const;
  const Vec3& axis() const { return axis_; }
  const Vec3& reference() const { return ref_; }

 private:
  Vec3 axis_, ref_;
  std::vector<double> t_, theta_;
};

/// Loop parameter t in [0, 1] corresponds to phi = 2 pi t. Throws
/// NonzeroWinding when the loop winds around the axis, NotInPlane when a
/// sample leaves the great circle.
LoopContraction face_loop_contraction(const SphericalPath& loop, const Vec3& axis);

/// The representative field of the class described by `inv`.
TangentField representative_boundary(const AdmissibleInvariants& inv, std::shared_ptr<const TruncatedPolyhedron> phat);

/// Random admissible invariant set with |kink| <= max_kink and |wrapping| <= max_wrap.
InvariantSet random_admissible(const TruncatedPolyhedron& phat, std::mt19937_64& rng, const UnitVector& s,
                               int max_kink = 3, int max_wrap = 3);

}  // namespace ttopo
