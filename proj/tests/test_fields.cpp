#include <gtest/gtest.h>

#include <random>

#include "support.hpp"
#include "tangent_topo/errors.hpp"
#include "tangent_topo/fields.hpp"
#include "tangent_topo/synthesis.hpp"

namespace ttopo {
namespace {

using testing::shared_truncated;

// Every truncated edge of the cube oriented along +x, +y or +z with all kinks
// and wrappings zero is admissible: each face sees two flips.
InvariantSet axis_aligned(const TruncatedPolyhedron& phat, const UnitVector& s) {
  InvariantSet inv;
  inv.s = s;
  for (const auto& e : phat.truncated_edges())
    inv.edge_orientations.push_back({std::fabs(e.direction.x), std::fabs(e.direction.y), std::fabs(e.direction.z)});
  inv.kink_numbers.assign(phat.cleaved_edges().size(), 0);
  inv.wrapping_numbers.assign(phat.cleaved_faces().size(), 0);
  return inv;
}

const UnitVector kS(-1, -2, -4);

TangentField representative(const InvariantSet& inv, const std::shared_ptr<const TruncatedPolyhedron>& phat) {
  return representative_boundary(make_admissible(inv, *phat), phat);
}

TangentField random_representative(const std::string& name, std::uint64_t seed, InvariantSet* out = nullptr) {
  const auto phat = shared_truncated(name);
  std::mt19937_64 rng(seed);
  const UnitVector s = choose_reference_s(*phat, seed);
  InvariantSet inv = random_admissible(*phat, rng, s);
  if (out) *out = inv;
  return representative(inv, phat);
}

int truncated_face_of_edge(const TruncatedPolyhedron& phat, int b) {
  for (const auto& f : phat.truncated_faces())
    for (const auto& seg : f.segments)
      if (seg.truncated_edge == b) return f.ref.index;
  return -1;
}

TEST(Tangency, RepresentativeIsInPlane) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto d = validate_tangency(random_representative("cube", seed));
    EXPECT_LT(d.max_face_violation, 1e-12);
    EXPECT_LT(d.max_edge_misalignment, 1e-12);
    EXPECT_LT(d.max_continuity_gap, 1e-9);
    EXPECT_TRUE(d.passed());
  }
}

TEST(Tangency, ConstantFieldAgainstFaceNormals) {
  const auto phat = shared_truncated("cube");
  const auto field = TangentField::analytic(phat, [](const FaceRef&, const Vec3&) { return UnitVector(0, 0, 1); });
  const auto d = validate_tangency(field);
  for (const auto& f : phat->truncated_faces()) {
    const double expected = std::fabs(f.normal.z);
    EXPECT_NEAR(d.face_violation[f.ref.index], expected, 1e-12);
  }
  EXPECT_NEAR(d.max_face_violation, 1.0, 1e-12);
  EXPECT_FALSE(d.tangent);
}

TEST(Antipodal, NegatesEverywhere) {
  const TangentField f = random_representative("tetrahedron", 4);
  const TangentField g = antipodal(f);
  const auto& phat = f.host();
  for (const FaceRef& ref : phat.all_faces()) {
    const PolarChart chart = polar_chart(phat, ref);
    for (double rho : {0.0, 0.3, 0.8, 1.0})
      for (double phi : {0.0, 1.1, 3.3}) {
        const Vec3 x = chart.point(rho, phi);
        EXPECT_LT(distance(g.evaluate(ref, x), -f.evaluate(ref, x).vec()), 1e-15);
      }
  }
  EXPECT_TRUE(validate_tangency(g).passed());
}

TEST(Trace, ConstantAlongTruncatedEdges) {
  InvariantSet inv;
  const TangentField f = random_representative("cube", 5, &inv);
  const auto& phat = f.host();
  for (const auto& e : phat.truncated_edges()) {
    const int c = truncated_face_of_edge(phat, e.edge);
    ASSERT_GE(c, 0);
    const auto path = boundary_trace(f, {FaceKind::Truncated, c}, phat.vertices()[e.start], phat.vertices()[e.end], 16);
    for (const auto& p : path.points) EXPECT_LT(distance(p, inv.edge_orientations[e.edge]), 1e-12);
  }
}

TEST(Trace, ReversedCurveGivesReversedPath) {
  const TangentField f = random_representative("cube", 6);
  const auto& phat = f.host();
  const auto& ce = phat.cleaved_edges()[3];
  const FaceRef face{FaceKind::Truncated, ce.face};
  const Vec3 a = phat.vertices()[ce.start], b = phat.vertices()[ce.end];
  const auto fwd = boundary_trace(f, face, a, b, 33);
  const auto back = boundary_trace(f, face, b, a, 33).reversed();
  ASSERT_EQ(fwd.size(), back.size());
  for (std::size_t i = 0; i < fwd.size(); ++i) EXPECT_LT(distance(fwd.points[i], back.points[i]), 1e-12);
}

TEST(Trace, KinkOneWindsOnceBeyondMinimalRotation) {
  const auto phat = shared_truncated("cube");
  std::mt19937_64 rng(7);
  int checked = 0;
  for (int attempt = 0; attempt < 40 && checked < 3; ++attempt) {
    const InvariantSet inv = random_admissible(*phat, rng, kS);
    const auto f = representative(inv, phat);
    for (std::size_t id = 0; id < inv.kink_numbers.size(); ++id) {
      if (inv.kink_numbers[id] != 1) continue;
      const auto& ce = phat->cleaved_edges()[id];
      const Vec3 axis = phat->truncated_faces()[ce.face].normal;
      const auto path = trace_cleaved_edge(f, static_cast<int>(id), 64);
      const double xi = unwrap_rotation_angle(path, axis);
      const double eta = signed_angle_about(axis, path.points.front(), path.points.back());
      EXPECT_NEAR(xi, eta + kTwoPi, 1e-9);
      ++checked;
      break;
    }
  }
  EXPECT_EQ(checked, 3);
}

TEST(SampledField, ReproducesStoredValues) {
  const TangentField f = random_representative("octahedron", 8);
  const auto& phat = f.host();
  std::vector<FaceSample> samples;
  for (const FaceRef& ref : phat.all_faces()) samples.push_back(f.sample(ref, 3));
  const TangentField g = TangentField::sampled(f.host_ptr(), samples);
  EXPECT_FALSE(g.is_analytic());
  for (const FaceSample& s : samples) {
    const FaceSample back = g.sample(s.face, 6);
    ASSERT_EQ(back.mesh.nodes.size(), s.mesh.nodes.size());
    for (std::size_t i = 0; i < s.values.size(); i += 7) {
      EXPECT_LT(distance(g.evaluate(s.face, s.mesh.nodes[i]), s.values[i]), 1e-9);
      EXPECT_LT(distance(back.values[i], s.values[i]), 1e-15);
    }
    EXPECT_LT(distance(g.evaluate_in(s, 0, 1.0, 0.0), s.values[s.mesh.triangles[0][1]]), 1e-15);
  }
  EXPECT_TRUE(validate_tangency(g).passed());
}

TEST(SampledField, RejectsMissingFaces) {
  const TangentField f = random_representative("cube", 9);
  std::vector<FaceSample> samples;
  for (const FaceRef& ref : f.host().all_faces()) samples.push_back(f.sample(ref, 1));
  samples.pop_back();
  try {
    TangentField::sampled(f.host_ptr(), samples);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidField);
  }
}

TEST(SphericalBarycentric, Corners) {
  const Vec3 a{1, 0, 0}, b{0, 1, 0}, c{0, 0, 1};
  EXPECT_LT(distance(spherical_barycentric(a, b, c, 0, 0), a), 1e-15);
  EXPECT_LT(distance(spherical_barycentric(a, b, c, 1, 0), b), 1e-15);
  EXPECT_LT(distance(spherical_barycentric(a, b, c, 0, 1), c), 1e-15);
}

TEST(Energy, ConstantFaceContributesNothing) {
  const auto phat = shared_truncated("cube");
  const auto field = TangentField::analytic(phat, [](const FaceRef&, const Vec3&) { return UnitVector(1, 0, 0); });
  EXPECT_EQ(face_energy(field.sample({FaceKind::Cleaved, 0}, 4)), 0.0);
}

TEST(Energy, HigherWrappingCostsMore) {
  const auto phat = shared_truncated("cube");
  InvariantSet one = axis_aligned(*phat, kS), two = one;
  one.wrapping_numbers[0] = 1;
  one.wrapping_numbers[1] = -1;
  two.wrapping_numbers[0] = 2;
  two.wrapping_numbers[1] = -2;
  const FaceRef face{FaceKind::Cleaved, 0};
  const double e1 = face_energy(representative(one, phat).sample(face, 6));
  const double e2 = face_energy(representative(two, phat).sample(face, 6));
  EXPECT_GT(e2, e1);
}

TEST(Energy, ConvergesUnderRefinement) {
  const auto phat = shared_truncated("cube");
  const auto f = representative(axis_aligned(*phat, kS), phat);
  QuadratureConfig c6, c7;
  c6.depth = 6;
  c7.depth = 7;
  const double e6 = frank_energy_surface(f, c6), e7 = frank_energy_surface(f, c7);
  EXPECT_GT(e6, 0.0);
  EXPECT_LT(std::fabs(e7 - e6) / e6, 0.01);
}

TEST(Perturbation, PreservesTangencyAndEdges) {
  std::mt19937_64 rng(10);
  InvariantSet inv;
  const TangentField f = random_representative("cube", 11, &inv);
  for (int i = 0; i < 5; ++i) {
    const TangentPerturbation p = random_perturbation(rng, 0.1);
    EXPECT_LE(std::fabs(p.amplitude), 0.1);
    const TangentField g = perturbed(f, p);
    EXPECT_TRUE(validate_tangency(g).passed());
    const auto eps = extract_edge_orientations(g);
    for (std::size_t b = 0; b < eps.size(); ++b) EXPECT_LT(distance(eps[b], inv.edge_orientations[b]), 1e-9);
    // The deformation actually moves interior values.
    const FaceRef face{FaceKind::Truncated, 0};
    const Vec3 x = polar_chart(f.host(), face).point(0.5, 1.0);
    EXPECT_GT(distance(g.evaluate(face, x), f.evaluate(face, x)), 1e-6);
  }
}

}  // namespace
}  // namespace ttopo
