#pragma once

// Shared helpers and independent oracles for the unit tests.

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <random>
#include <string>

#include "tangent_topo/geometry.hpp"
#include "tangent_topo/sphere.hpp"

namespace ttopo::testing {

inline std::shared_ptr<const TruncatedPolyhedron> shared_truncated(const std::string& name, double lambda = 0.25) {
  static std::map<std::pair<std::string, double>, std::shared_ptr<const TruncatedPolyhedron>> cache;
  auto& slot = cache[{name, lambda}];
  if (!slot)
    slot = std::make_shared<const TruncatedPolyhedron>(truncate(builtin_polyhedron(name), TruncationSpec::from_lambda(lambda)));
  return slot;
}

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  for (;;) {
    const Vec3 v{g(rng), g(rng), g(rng)};
    if (norm(v) > 1e-3) return normalized(v);
  }
}

/// Oriented area of the minor-arc triangle from L'Huilier's theorem.
inline double lhuilier_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double x = std::acos(std::clamp(dot(b, c), -1.0, 1.0));
  const double y = std::acos(std::clamp(dot(c, a), -1.0, 1.0));
  const double z = std::acos(std::clamp(dot(a, b), -1.0, 1.0));
  const double s = 0.5 * (x + y + z);
  const double p = std::tan(0.5 * s) * std::tan(0.5 * (s - x)) * std::tan(0.5 * (s - y)) * std::tan(0.5 * (s - z));
  const double e = 4.0 * std::atan(std::sqrt(std::max(p, 0.0)));
  return triple(a, b, c) < 0.0 ? -e : e;
}

/// Girard: angle excess from the interior angles of the triangle.
inline double girard_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  const auto angle_at = [](const Vec3& p, const Vec3& q, const Vec3& r) {
    const Vec3 u = normalized(q - p * dot(p, q));
    const Vec3 v = normalized(r - p * dot(p, r));
    return std::acos(std::clamp(dot(u, v), -1.0, 1.0));
  };
  const double e = angle_at(a, b, c) + angle_at(b, c, a) + angle_at(c, a, b) - kPi;
  return triple(a, b, c) < 0.0 ? -e : e;
}

}  // namespace ttopo::testing
