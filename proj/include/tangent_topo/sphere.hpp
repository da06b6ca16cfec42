#pragma once

// Primitive computations on the unit sphere.

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "tangent_topo/vec3.hpp"

namespace ttopo {

inline constexpr double kTolUnit = 1e-12;
inline constexpr double kTolAntipodal = 1e-9;

/// A point of S^2. Renormalized on construction.
class UnitVector {
 public:
  UnitVector() = default;
  explicit UnitVector(const Vec3& v);
  UnitVector(double x, double y, double z) : UnitVector(Vec3{x, y, z}) {}

  const Vec3& vec() const { return v_; }
  operator const Vec3&() const { return v_; }
  double x() const { return v_.x; }
  double y() const { return v_.y; }
  double z() const { return v_.z; }
  UnitVector operator-() const { return from_normalized(-v_); }

  /// Wraps a vector already known to have unit norm (no renormalization).
  static UnitVector from_normalized(const Vec3& v) {
    UnitVector u;
    u.v_ = v;
    return u;
  }

 private:
  Vec3 v_{0, 0, 1};
};

/// Point at fraction tau of the shortest great-circle arc from `from` to `to`.
UnitVector geodesic_point(const UnitVector& from, const UnitVector& to, double tau);

/// Oriented area of the geodesic triangle abc, 2 arg((1 + a.b + b.c + c.a) + i (a x b).c).
double spherical_triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);

/// Same formula without the antipodal guard; for hot loops over checked data.
inline double spherical_triangle_area_unchecked(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 2.0 * std::atan2(triple(a, b, c), 1.0 + dot(a, b) + dot(b, c) + dot(c, a));
}

/// 0 if s lies outside the geodesic triangle abc, otherwise the orientation
/// sign of its boundary about s.
int triangle_sigma(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& s);

/// Inclusive membership test used when scanning meshes for preimages.
bool triangle_contains(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& s, double slack);

/// Signed rotation angle from p to q about `axis`, in (-pi, pi].
inline double signed_angle_about(const Vec3& axis, const Vec3& p, const Vec3& q) {
  return std::atan2(dot(cross(p, q), axis), dot(p, q));
}

/// Samples of a curve on S^2 with monotone parameters in [0, 1].
struct SphericalPath {
  std::vector<double> t;
  std::vector<UnitVector> points;

  std::size_t size() const { return points.size(); }
  /// Largest angle between consecutive samples.
  double max_step() const;
  SphericalPath reversed() const;
};

inline constexpr double kNyquistStep = kPi / 2.0;

/// Samples `f` on [0, 1] starting from `initial` uniform points and bisecting
/// every interval whose endpoints are >= pi/2 apart. Throws MaxRefinement when
/// more than `max_samples` would be needed.
SphericalPath sample_path(const std::function<UnitVector(double)>& f, int initial, int max_samples = 1 << 20);

/// Continuous rotation angle about `axis` accumulated from path(0) to path(1).
double unwrap_rotation_angle(const SphericalPath& path, const Vec3& axis, double tol_tangency = 1e-8);

/// Closed oriented triangulation whose vertices carry images on S^2.
struct SphereMap {
  std::vector<std::array<int, 3>> triangles;
  std::vector<Vec3> images;
};

struct DegreeResult {
  int degree = 0;
  double total_area = 0.0;
  double residual = 0.0;  // |total / 4pi - degree|
};

inline constexpr double kDegreeResidualLimit = 0.1;

/// Throws NotClosed / ResolutionTooCoarse; see DegreeResult.
DegreeResult mesh_degree(const SphereMap& map);

/// Each triangle split into four, images interpolated along geodesics.
SphereMap subdivide(const SphereMap& map);

/// Checks that every undirected edge is used exactly twice, once per direction.
bool is_closed_surface(std::span<const std::array<int, 3>> triangles);

/// Icosahedron subdivided `level` times, projected to the sphere.
SphereMap icosphere(int level);
/// Latitude/longitude triangulation with `rows` latitude bands and `cols`
/// longitude sectors; images set to the vertex positions.
SphereMap polar_sphere(int rows, int cols);

}  // namespace ttopo
