// Serial reference kernels against their OpenMP versions on sphere meshes,
// plus one end-to-end extraction.

#include <benchmark/benchmark.h>

#include <map>
#include <memory>
#include <random>

#include "tangent_topo/kernels.hpp"
#include "tangent_topo/sphere.hpp"
#include "tangent_topo/synthesis.hpp"

namespace {

using namespace ttopo;

struct Mesh {
  std::vector<kernels::Triangle> triangles;
  std::vector<Vec3> positions;
  std::vector<Vec3> values;
};

const Mesh& mesh(int level) {
  static std::map<int, Mesh> cache;
  auto it = cache.find(level);
  if (it != cache.end()) return it->second;
  const SphereMap s = icosphere(level);
  Mesh m;
  m.triangles = s.triangles;
  m.positions = s.images;
  // A smooth field with some rotation so that the energy kernel has work to do.
  for (const Vec3& p : s.images) m.values.push_back(normalized(rotate(Vec3{0, 0, 1}, 2.0 * p.z, p)));
  return cache.emplace(level, std::move(m)).first->second;
}

void set_counters(benchmark::State& state, const Mesh& m) {
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * m.triangles.size()));
}

template <double (*Kernel)(std::span<const kernels::Triangle>, std::span<const Vec3>)>
void area_kernel(benchmark::State& state) {
  const Mesh& m = mesh(static_cast<int>(state.range(0)));
  kernels::set_max_threads(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(m.triangles, m.values));
  kernels::set_max_threads(0);
  set_counters(state, m);
}

template <double (*Kernel)(std::span<const kernels::Triangle>, std::span<const Vec3>, std::span<const Vec3>)>
void energy_kernel(benchmark::State& state) {
  const Mesh& m = mesh(static_cast<int>(state.range(0)));
  kernels::set_max_threads(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(m.triangles, m.positions, m.values));
  kernels::set_max_threads(0);
  set_counters(state, m);
}

void sizes(benchmark::internal::Benchmark* b) {
  for (int level : {4, 6, 7}) b->Args({level, 1});
}

void sizes_threads(benchmark::internal::Benchmark* b) {
  for (int level : {4, 6, 7})
    for (int threads : {1, 2, 4}) b->Args({level, threads});
}

BENCHMARK(area_kernel<kernels::serial::signed_area_sum>)->Name("signed_area_sum/serial")->Apply(sizes)->UseRealTime();
BENCHMARK(area_kernel<kernels::parallel::signed_area_sum>)->Name("signed_area_sum/parallel")->Apply(sizes_threads)->UseRealTime();
BENCHMARK(area_kernel<kernels::serial::max_edge_angle>)->Name("max_edge_angle/serial")->Apply(sizes)->UseRealTime();
BENCHMARK(area_kernel<kernels::parallel::max_edge_angle>)->Name("max_edge_angle/parallel")->Apply(sizes_threads)->UseRealTime();
BENCHMARK(energy_kernel<kernels::serial::dirichlet_energy>)->Name("dirichlet_energy/serial")->Apply(sizes)->UseRealTime();
BENCHMARK(energy_kernel<kernels::parallel::dirichlet_energy>)->Name("dirichlet_energy/parallel")->Apply(sizes_threads)->UseRealTime();

void extract_representative(benchmark::State& state) {
  const auto phat = std::make_shared<const TruncatedPolyhedron>(
      truncate(builtin_polyhedron("cube"), TruncationSpec::from_lambda(0.25)));
  std::mt19937_64 rng(1);
  const UnitVector s = choose_reference_s(*phat, 1);
  const auto field = representative_boundary(make_admissible(random_admissible(*phat, rng, s), *phat), phat);
  ExtractOptions o;
  o.s = s;
  o.cfg.depth = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(extract_all(field, o).invariants.wrapping_numbers.data());
}
BENCHMARK(extract_representative)->Arg(5)->Arg(6)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
