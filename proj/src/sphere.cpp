#include "tangent_topo/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "tangent_topo/errors.hpp"
#include "tangent_topo/kernels.hpp"

namespace ttopo {

UnitVector::UnitVector(const Vec3& v) {
  const double n = norm(v);
  if (!(n > 0.0) || !std::isfinite(n)) fail(ErrorCode::InvalidField, "cannot normalize a zero or non-finite vector");
  v_ = v / n;
}

UnitVector geodesic_point(const UnitVector& from, const UnitVector& to, double tau) {
  const double theta = angle_between(from, to);
  if (theta > kPi - kTolAntipodal) fail(ErrorCode::AntipodalEndpoints, "geodesic endpoints are antipodal");
  if (tau <= 0.0) return from;
  if (tau >= 1.0) return to;
  if (theta < 1e-12) return UnitVector(from.vec() * (1.0 - tau) + to.vec() * tau);
  const double s = std::sin(theta);
  return UnitVector(from.vec() * (std::sin((1.0 - tau) * theta) / s) + to.vec() * (std::sin(tau * theta) / s));
}

double spherical_triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double lim = -1.0 + 0.5 * kTolAntipodal * kTolAntipodal;
  if (dot(a, b) <= lim || dot(b, c) <= lim || dot(c, a) <= lim)
    fail(ErrorCode::AntipodalPair, "triangle has an antipodal vertex pair");
  return spherical_triangle_area_unchecked(a, b, c);
}

int triangle_sigma(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& s) {
  const Vec3 ab = cross(a, b), bc = cross(b, c), ca = cross(c, a);
  const double det = dot(ab, c);
  // Signed sines of the distance from s to each edge's great circle.
  const auto side = [&](const Vec3& n) {
    const double len = norm(n);
    return len > 0.0 ? dot(n, s) / len : 0.0;
  };
  const double e[3] = {side(ab), side(bc), side(ca)};
  if (std::fabs(det) < kTolUnit) {
    for (const double x : e)
      if (std::fabs(x) <= kTolAntipodal) fail(ErrorCode::OnBoundary, "s lies on a degenerate triangle");
    return 0;
  }
  const double sgn = det > 0 ? 1.0 : -1.0;
  bool inside = true;
  for (const double x : e) {
    if (x * sgn < -kTolAntipodal) return 0;
    if (x * sgn <= kTolAntipodal) inside = false;
  }
  if (!inside) fail(ErrorCode::OnBoundary, "s lies on the triangle boundary");
  return det > 0 ? 1 : -1;
}

bool triangle_contains(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& s, double slack) {
  for (const Vec3* v : {&a, &b, &c})
    if (angle_between(*v, s) <= slack) return true;
  const double det = triple(a, b, c);
  if (std::fabs(det) < 1e-15) return false;
  const double alpha = triple(b, c, s) / det;
  const double beta = triple(c, a, s) / det;
  const double gamma = triple(a, b, s) / det;
  const double total = alpha + beta + gamma;
  if (total <= 0.0) return false;
  return std::min({alpha, beta, gamma}) >= -slack * total;
}

double SphericalPath::max_step() const {
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) m = std::max(m, angle_between(points[i], points[i + 1]));
  return m;
}

SphericalPath SphericalPath::reversed() const {
  SphericalPath r;
  for (std::size_t i = points.size(); i-- > 0;) {
    r.t.push_back(1.0 - t[i]);
    r.points.push_back(points[i]);
  }
  return r;
}

SphericalPath sample_path(const std::function<UnitVector(double)>& f, int initial, int max_samples) {
  if (initial < 2) initial = 2;
  SphericalPath path;
  for (int i = 0; i < initial; ++i) {
    const double t = static_cast<double>(i) / (initial - 1);
    path.t.push_back(t);
    path.points.push_back(f(t));
  }
  // Bisect until every step is comfortably below the pi/2 bound.
  constexpr double target = kNyquistStep / 2.0;
  for (;;) {
    bool refined = false;
    SphericalPath next;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      next.t.push_back(path.t[i]);
      next.points.push_back(path.points[i]);
      if (angle_between(path.points[i], path.points[i + 1]) >= target) {
        const double tm = 0.5 * (path.t[i] + path.t[i + 1]);
        if (tm <= path.t[i] || tm >= path.t[i + 1])
          fail(ErrorCode::MaxRefinement, "path is discontinuous at t = " + std::to_string(path.t[i]));
        next.t.push_back(tm);
        next.points.push_back(f(tm));
        refined = true;
      }
    }
    next.t.push_back(path.t.back());
    next.points.push_back(path.points.back());
    path = std::move(next);
    if (!refined) break;
    if (static_cast<int>(path.size()) > max_samples)
      fail(ErrorCode::MaxRefinement, "path needs more than " + std::to_string(max_samples) + " samples");
  }
  return path;
}

double unwrap_rotation_angle(const SphericalPath& path, const Vec3& axis, double tol_tangency) {
  for (const auto& p : path.points)
    if (std::fabs(dot(p.vec(), axis)) > tol_tangency)
      fail(ErrorCode::NotInPlane, "path sample is not orthogonal to the rotation axis");
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const double step = signed_angle_about(axis, path.points[i], path.points[i + 1]);
    if (std::fabs(step) >= kNyquistStep)
      fail(ErrorCode::MaxRefinement, "consecutive samples are pi/2 or more apart");
    total += step;
  }
  return total;
}

bool is_closed_surface(std::span<const std::array<int, 3>> triangles) {
  std::map<std::pair<int, int>, int> directed;
  for (const auto& t : triangles)
    for (int k = 0; k < 3; ++k) ++directed[{t[k], t[(k + 1) % 3]}];
  for (const auto& [e, count] : directed) {
    if (count != 1) return false;
    const auto it = directed.find({e.second, e.first});
    if (it == directed.end() || it->second != 1) return false;
  }
  return !triangles.empty();
}

DegreeResult mesh_degree(const SphereMap& map) {
  if (!is_closed_surface(map.triangles)) fail(ErrorCode::NotClosed, "triangulation is not a closed oriented surface");
  DegreeResult r;
  r.total_area = kernels::parallel::signed_area_sum(map.triangles, map.images);
  const double ratio = r.total_area / kFourPi;
  r.degree = static_cast<int>(std::lround(ratio));
  r.residual = std::fabs(ratio - r.degree);
  if (r.residual >= kDegreeResidualLimit)
    fail(ErrorCode::ResolutionTooCoarse, "degree residual " + std::to_string(r.residual) + " is too large");
  return r;
}

SphereMap subdivide(const SphereMap& map) {
  SphereMap out;
  out.images = map.images;
  std::map<std::pair<int, int>, int> mid;
  const auto midpoint = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    const auto it = mid.find({key.first, key.second});
    if (it != mid.end()) return it->second;
    const int id = static_cast<int>(out.images.size());
    out.images.push_back(geodesic_point(UnitVector(map.images[a]), UnitVector(map.images[b]), 0.5).vec());
    mid[{key.first, key.second}] = id;
    return id;
  };
  for (const auto& t : map.triangles) {
    const int ab = midpoint(t[0], t[1]), bc = midpoint(t[1], t[2]), ca = midpoint(t[2], t[0]);
    out.triangles.push_back({t[0], ab, ca});
    out.triangles.push_back({ab, t[1], bc});
    out.triangles.push_back({ca, bc, t[2]});
    out.triangles.push_back({ab, bc, ca});
  }
  return out;
}

namespace {

void orient_outward(SphereMap& m) {
  for (auto& t : m.triangles) {
    const Vec3& a = m.images[t[0]];
    const Vec3& b = m.images[t[1]];
    const Vec3& c = m.images[t[2]];
    if (dot(cross(b - a, c - a), a + b + c) < 0) std::swap(t[1], t[2]);
  }
}

}  // namespace

SphereMap icosphere(int level) {
  const double g = (1.0 + std::sqrt(5.0)) / 2.0;
  SphereMap m;
  for (const Vec3& v : {Vec3{-1, g, 0}, Vec3{1, g, 0}, Vec3{-1, -g, 0}, Vec3{1, -g, 0}, Vec3{0, -1, g}, Vec3{0, 1, g},
                        Vec3{0, -1, -g}, Vec3{0, 1, -g}, Vec3{g, 0, -1}, Vec3{g, 0, 1}, Vec3{-g, 0, -1}, Vec3{-g, 0, 1}})
    m.images.push_back(normalized(v));
  m.triangles = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                 {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                 {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  orient_outward(m);
  for (int i = 0; i < level; ++i) m = subdivide(m);
  return m;
}

SphereMap polar_sphere(int rows, int cols) {
  SphereMap m;
  m.images.push_back({0, 0, 1});
  for (int i = 1; i < rows; ++i) {
    const double alpha = kPi * i / rows;
    for (int j = 0; j < cols; ++j) {
      const double beta = kTwoPi * j / cols;
      m.images.push_back({std::sin(alpha) * std::cos(beta), std::sin(alpha) * std::sin(beta), std::cos(alpha)});
    }
  }
  const int south = static_cast<int>(m.images.size());
  m.images.push_back({0, 0, -1});
  const auto id = [&](int ring, int j) { return 1 + (ring - 1) * cols + ((j % cols) + cols) % cols; };
  for (int j = 0; j < cols; ++j) m.triangles.push_back({0, id(1, j), id(1, j + 1)});
  for (int i = 1; i + 1 < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      m.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  for (int j = 0; j < cols; ++j) m.triangles.push_back({south, id(rows - 1, j + 1), id(rows - 1, j)});
  orient_outward(m);
  return m;
}

}  // namespace ttopo
