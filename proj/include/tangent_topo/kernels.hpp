#pragma once

// Data-parallel inner loops. Each kernel has a plain serial reference in
// `serial::` and an OpenMP version in `parallel::`. The parallel versions sum
// fixed-size blocks and combine them by pairwise reduction, so their result
// does not depend on the number of threads.

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "tangent_topo/vec3.hpp"

namespace ttopo::kernels {

using Triangle = std::array<int, 3>;

inline constexpr std::size_t kBlock = 512;

namespace serial {

/// Sum of oriented geodesic-triangle areas of the image triangles.
double signed_area_sum(std::span<const Triangle> triangles, std::span<const Vec3> images);

/// Largest angle between images of adjacent nodes.
double max_edge_angle(std::span<const Triangle> triangles, std::span<const Vec3> images);

/// Sum over triangles of area * |grad n|^2 for the piecewise-linear
/// interpolant of the (ambient) vector values.
double dirichlet_energy(std::span<const Triangle> triangles, std::span<const Vec3> positions,
                        std::span<const Vec3> values);

}  // namespace serial

namespace parallel {

double signed_area_sum(std::span<const Triangle> triangles, std::span<const Vec3> images);
double max_edge_angle(std::span<const Triangle> triangles, std::span<const Vec3> images);
double dirichlet_energy(std::span<const Triangle> triangles, std::span<const Vec3> positions,
                        std::span<const Vec3> values);

}  // namespace parallel

/// Pairwise (tree) summation of `values`.
double pairwise_sum(std::span<const double> values);

/// Evaluates f(i) for i in [0, n) into a vector, in parallel. `f` must be re-entrant.
template <class T>
std::vector<T> parallel_generate(std::size_t n, const std::function<T(std::size_t)>& f) {
  std::vector<T> out(n);
  const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
  return out;
}

/// Upper bound on worker threads used by the parallel kernels (<= 0 keeps the default).
void set_max_threads(int n);
int max_threads();

}  // namespace ttopo::kernels
