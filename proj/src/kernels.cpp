#include "tangent_topo/kernels.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "tangent_topo/sphere.hpp"

namespace ttopo::kernels {

namespace {

double triangle_energy(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& n0, const Vec3& n1,
                       const Vec3& n2) {
  // Linear interpolant on the triangle: with edges e1 = p1 - p0, e2 = p2 - p0
  // and Gram matrix G, |grad f|^2 = d^T G^-1 d where d = (f1 - f0, f2 - f0).
  const Vec3 e1 = p1 - p0, e2 = p2 - p0;
  const double g11 = dot(e1, e1), g12 = dot(e1, e2), g22 = dot(e2, e2);
  const double det = g11 * g22 - g12 * g12;
  if (det <= 0.0) return 0.0;
  const Vec3 d1 = n1 - n0, d2 = n2 - n0;
  const double a = dot(d1, d1), b = dot(d1, d2), c = dot(d2, d2);
  const double grad2 = (g22 * a - 2.0 * g12 * b + g11 * c) / det;
  return 0.5 * std::sqrt(det) * grad2;
}

double tri_area(std::span<const Triangle> tris, std::span<const Vec3> im, std::size_t i) {
  const auto& t = tris[i];
  return spherical_triangle_area_unchecked(im[t[0]], im[t[1]], im[t[2]]);
}

double tri_angle(std::span<const Triangle> tris, std::span<const Vec3> im, std::size_t i) {
  const auto& t = tris[i];
  return std::max({angle_between(im[t[0]], im[t[1]]), angle_between(im[t[1]], im[t[2]]),
                   angle_between(im[t[2]], im[t[0]])});
}

template <class F>
double blocked_sum(std::size_t n, F&& term) {
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(blocks, 0.0);
  const long long nb = static_cast<long long>(blocks);
#pragma omp parallel for schedule(static)
  for (long long b = 0; b < nb; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = std::min(n, lo + kBlock);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    partial[static_cast<std::size_t>(b)] = s;
  }
  return pairwise_sum(partial);
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
  if (values.empty()) return 0.0;
  if (values.size() == 1) return values[0];
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

namespace serial {

double signed_area_sum(std::span<const Triangle> triangles, std::span<const Vec3> images) {
  double s = 0.0;
  for (std::size_t i = 0; i < triangles.size(); ++i) s += tri_area(triangles, images, i);
  return s;
}

double max_edge_angle(std::span<const Triangle> triangles, std::span<const Vec3> images) {
  double m = 0.0;
  for (std::size_t i = 0; i < triangles.size(); ++i) m = std::max(m, tri_angle(triangles, images, i));
  return m;
}

double dirichlet_energy(std::span<const Triangle> triangles, std::span<const Vec3> positions,
                        std::span<const Vec3> values) {
  double s = 0.0;
  for (const auto& t : triangles)
    s += triangle_energy(positions[t[0]], positions[t[1]], positions[t[2]], values[t[0]], values[t[1]], values[t[2]]);
  return s;
}

}  // namespace serial

namespace parallel {

double signed_area_sum(std::span<const Triangle> triangles, std::span<const Vec3> images) {
  return blocked_sum(triangles.size(), [&](std::size_t i) { return tri_area(triangles, images, i); });
}

double max_edge_angle(std::span<const Triangle> triangles, std::span<const Vec3> images) {
  double m = 0.0;
  const long long n = static_cast<long long>(triangles.size());
#pragma omp parallel for reduction(max : m) schedule(static)
  for (long long i = 0; i < n; ++i) m = std::max(m, tri_angle(triangles, images, static_cast<std::size_t>(i)));
  return m;
}

double dirichlet_energy(std::span<const Triangle> triangles, std::span<const Vec3> positions,
                        std::span<const Vec3> values) {
  return blocked_sum(triangles.size(), [&](std::size_t i) {
    const auto& t = triangles[i];
    return triangle_energy(positions[t[0]], positions[t[1]], positions[t[2]], values[t[0]], values[t[1]], values[t[2]]);
  });
}

}  // namespace parallel

void set_max_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace ttopo::kernels
