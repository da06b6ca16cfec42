#pragma once

// Tangent unit-vector fields on the boundary of a truncated polyhedron.

#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "tangent_topo/geometry.hpp"
#include "tangent_topo/sphere.hpp"

namespace ttopo {

struct QuadratureConfig {
  int depth = 6;  // chart subdivision depth (2^depth rings per face)
  double tol_tangency = 1e-8;
  double tol_continuity = 1e-6;
  int max_depth = 9;  // refinement budget for face meshes
  int max_trace_samples = 1 << 20;
};

/// Field values at the nodes of one face mesh.
struct FaceSample {
  FaceRef face;
  FaceMesh mesh;
  std::vector<Vec3> values;
  int depth = -1;  // -1 for meshes that did not come from a chart
};

class TangentField {
 public:
  using Evaluator = std::function<UnitVector(const FaceRef&, const Vec3&)>;

  /// `eval` must be re-entrant; it is called concurrently.
  static TangentField analytic(std::shared_ptr<const TruncatedPolyhedron> host, Evaluator eval);
  /// One FaceSample per face of the host. Values are renormalized.
  static TangentField sampled(std::shared_ptr<const TruncatedPolyhedron> host, std::vector<FaceSample> faces);

  const TruncatedPolyhedron& host() const { return *host_; }
  const std::shared_ptr<const TruncatedPolyhedron>& host_ptr() const { return host_; }
  bool is_analytic() const { return static_cast<bool>(eval_); }

  UnitVector evaluate(const FaceRef& face, const Vec3& x) const;

  /// Analytic fields are evaluated on the face's chart mesh at `depth`;
  /// sampled fields return their stored mesh whatever the depth.
  FaceSample sample(const FaceRef& face, int depth) const;

  /// Value inside triangle `tri` of `s` at barycentric weights (1 - b1 - b2, b1, b2).
  UnitVector evaluate_in(const FaceSample& s, int tri, double b1, double b2) const;

  /// Stored samples of a sampled field (empty for analytic fields).
  const std::vector<FaceSample>& samples() const { return samples_; }

  /// Pointwise map n -> g(face, x, n), applied to the evaluator or to every stored node.
  TangentField mapped(std::function<Vec3(const FaceRef&, const Vec3&, const Vec3&)> g) const;

 private:
  std::shared_ptr<const TruncatedPolyhedron> host_;
  Evaluator eval_;
  std::vector<FaceSample> samples_;
};

/// Geodesic interpolation inside a triangle with a fixed vertex order.
UnitVector spherical_barycentric(const Vec3& n0, const Vec3& n1, const Vec3& n2, double b1, double b2);

struct TangencyDiagnostics {
  std::vector<double> face_violation;  // max |n . F| per truncated face
  double max_face_violation = 0.0;
  double max_edge_misalignment = 0.0;  // max |n x edge direction| on truncated edges
  double max_continuity_gap = 0.0;     // across shared edges
  bool tangent = true;
  bool continuous = true;
  bool passed() const { return tangent && continuous; }
};

TangencyDiagnostics validate_tangency(const TangentField& field, const QuadratureConfig& cfg = {});

TangentField antipodal(const TangentField& field);

/// Field values along the straight segment from -> to on `face`. Analytic
/// fields are refined until consecutive samples are < pi/2 apart; sampled
/// fields raise CoarseSampling instead.
SphericalPath boundary_trace(const TangentField& field, const FaceRef& face, const Vec3& from, const Vec3& to,
                             int samples, const QuadratureConfig& cfg = {});

/// Trace along cleaved edge B(a, c), positively oriented about the face normal
/// of c and evaluated on truncated face c.
SphericalPath trace_cleaved_edge(const TangentField& field, int cleaved_edge, int samples = 32,
                                 const QuadratureConfig& cfg = {});

/// Trace of the whole boundary of `face`, segment by segment in positive
/// order; parameter k + t on segment k is rescaled to [0, 1].
SphericalPath trace_face_boundary(const TangentField& field, const FaceRef& face, int samples_per_segment = 32,
                                  const QuadratureConfig& cfg = {});

/// Surface Dirichlet energy sum over faces of the integral of |grad n|^2, a
/// boundary proxy for the one-constant Frank energy.
double frank_energy_surface(const TangentField& field, const QuadratureConfig& cfg = {});
double face_energy(const FaceSample& s);

/// Small tangency-preserving deformation: rotation about each truncated-face
/// normal by an angle that vanishes on truncated edges, extended into cleaved
/// faces and composed there with an interior rotation vanishing on their rim.
struct TangentPerturbation {
  double amplitude = 0.05;  // max rotation on truncated faces (rad)
  Vec3 wave{3.0, 2.0, 1.0};
  double phase = 0.0;
  double falloff = 0.1;  // fraction of the diameter over which the edge taper acts
  Vec3 interior_axis{0, 0, 1};
  double interior_amplitude = 0.05;
  Vec3 interior_wave{1.0, -2.0, 2.5};
};

TangentPerturbation random_perturbation(std::mt19937_64& rng, double max_amplitude = 0.1);
TangentField perturbed(const TangentField& field, const TangentPerturbation& p, double t = 1.0);

}  // namespace ttopo
