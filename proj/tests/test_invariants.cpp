#include <gtest/gtest.h>

#include <random>

#include "support.hpp"
#include "tangent_topo/errors.hpp"
#include "tangent_topo/invariants.hpp"
#include "tangent_topo/synthesis.hpp"

namespace ttopo {
namespace {

using testing::shared_truncated;

const UnitVector kS(-1, -2, -4);

InvariantSet axis_aligned(const TruncatedPolyhedron& phat, const UnitVector& s) {
  InvariantSet inv;
  inv.s = s;
  for (const auto& e : phat.truncated_edges())
    inv.edge_orientations.push_back({std::fabs(e.direction.x), std::fabs(e.direction.y), std::fabs(e.direction.z)});
  inv.kink_numbers.assign(phat.cleaved_edges().size(), 0);
  inv.wrapping_numbers.assign(phat.cleaved_faces().size(), 0);
  return inv;
}

TangentField representative(const InvariantSet& inv, const std::shared_ptr<const TruncatedPolyhedron>& phat) {
  return representative_boundary(make_admissible(inv, *phat), phat);
}

ExtractOptions with_s(const UnitVector& s) {
  ExtractOptions o;
  o.s = s;
  return o;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::IoError;
}

TEST(ReferenceS, SeededChoiceIsAdmissibleAndDeterministic) {
  const auto phat = shared_truncated("cube");
  for (std::uint64_t seed : {0u, 1u, 17u, 123456u}) {
    const UnitVector s = choose_reference_s(*phat, seed);
    double m = 1.0;
    for (const auto& f : phat->truncated_faces()) m = std::min(m, std::fabs(dot(s.vec(), f.normal)));
    EXPECT_GE(m, kMarginS);
    EXPECT_EQ(choose_reference_s(*phat, seed).vec(), s.vec());
  }
  EXPECT_NE(choose_reference_s(*phat, 0).vec(), choose_reference_s(*phat, 1).vec());
}

TEST(ReferenceS, AdmissibilityExamples) {
  const auto phat = shared_truncated("cube");
  EXPECT_TRUE(is_admissible_s(*phat, normalized(Vec3{1, 1, 1})));
  EXPECT_FALSE(is_admissible_s(*phat, Vec3{1, 0, 0}));
  EXPECT_EQ(code_of([&] { extract_all(representative(axis_aligned(*phat, kS), phat), with_s(UnitVector(1, 0, 0))); }),
            ErrorCode::NoAdmissibleS);
}

TEST(EdgeOrientations, RepresentativeAndAntipode) {
  const auto phat = shared_truncated("tetrahedron");
  std::mt19937_64 rng(3);
  const InvariantSet inv = random_admissible(*phat, rng, choose_reference_s(*phat, 3));
  const auto f = representative(inv, phat);
  const auto eps = extract_edge_orientations(f);
  const auto anti = extract_edge_orientations(antipodal(f));
  for (std::size_t b = 0; b < eps.size(); ++b) {
    EXPECT_LT(distance(eps[b], inv.edge_orientations[b]), 1e-12);
    EXPECT_LT(distance(anti[b], -inv.edge_orientations[b]), 1e-12);
  }
}

SphericalPath rotation(const Vec3& axis, const Vec3& x0, double total) {
  return sample_path([&](double t) { return UnitVector(rotate(axis, total * t, x0)); }, 8);
}

TEST(Kink, FromPaths) {
  const Vec3 axis = normalized(Vec3{0.2, -0.3, 1.0});
  const Vec3 x0 = any_orthogonal(axis);
  for (double eta : {-2.5, -0.1, 0.4, 1.0, 3.0}) {
    const KinkResult k0 = kink_from_path(rotation(axis, x0, eta), axis);
    EXPECT_EQ(k0.kink, 0);
    EXPECT_NEAR(k0.eta, eta, 1e-12);
    EXPECT_EQ(kink_from_path(rotation(axis, x0, eta + kTwoPi), axis).kink, 1);
    EXPECT_EQ(kink_from_path(rotation(axis, x0, eta - 2 * kTwoPi), axis).kink, -2);
    EXPECT_LT(kink_from_path(rotation(axis, x0, eta + kTwoPi), axis).residual, kKinkResidualTol);
  }
}

TEST(Kink, RepresentativeWithMinusTwo) {
  const auto phat = shared_truncated("cube");
  std::mt19937_64 rng(21);
  for (int attempt = 0; attempt < 50; ++attempt) {
    const InvariantSet inv = random_admissible(*phat, rng, kS);
    const auto it = std::find(inv.kink_numbers.begin(), inv.kink_numbers.end(), -2);
    if (it == inv.kink_numbers.end()) continue;
    const auto k = extract_kink(representative(inv, phat), static_cast<int>(it - inv.kink_numbers.begin()));
    EXPECT_EQ(k.kink, -2);
    EXPECT_NEAR(k.xi, k.eta - 2 * kTwoPi, 1e-6);
    return;
  }
  FAIL() << "no kink of -2 drawn";
}

TEST(Wrapping, ConstantFieldIsZeroOnBothRoutes) {
  const auto phat = shared_truncated("cube");
  const auto f = TangentField::analytic(phat, [](const FaceRef&, const Vec3&) { return UnitVector(0.6, 0, 0.8); });
  const FaceSample s = f.sample({FaceKind::Cleaved, 2}, 4);
  const auto w = wrapping_integral(s, kS);
  EXPECT_EQ(w.wrapping, 0);
  EXPECT_EQ(w.area_term, 0.0);
  const auto p = wrapping_preimage(f, s, kS);
  EXPECT_EQ(p.wrapping, 0);
  EXPECT_TRUE(p.preimages.empty());
}

TEST(Wrapping, CoveringPatchDegree) {
  const auto phat = shared_truncated("cube");
  for (int omega : {1, 2, 3}) {
    InvariantSet inv = axis_aligned(*phat, kS);
    inv.wrapping_numbers[0] = omega;
    inv.wrapping_numbers[5] = -omega;
    const auto f = representative(inv, phat);
    EXPECT_EQ(extract_wrapping_integral(f, 0, kS).wrapping, omega);
    EXPECT_EQ(extract_wrapping_integral(f, 5, kS).wrapping, -omega);
    EXPECT_EQ(extract_wrapping_integral(f, 3, kS).wrapping, 0);
    // The antipodal map of the glued sphere: -n against -s.
    EXPECT_EQ(extract_wrapping_integral(antipodal(f), 0, -kS).wrapping, -omega);
  }
}

TEST(Wrapping, UnitPatchHasOnePositivePreimage) {
  const auto phat = shared_truncated("cube");
  InvariantSet inv = axis_aligned(*phat, kS);
  inv.wrapping_numbers[0] = 1;
  inv.wrapping_numbers[7] = -1;
  const auto f = representative(inv, phat);
  const auto p = extract_wrapping_preimage(f, 0, kS);
  EXPECT_EQ(p.wrapping, 1);
  ASSERT_EQ(p.preimages.size(), 1u);
  EXPECT_EQ(p.preimages[0].local_degree, 1);
  EXPECT_GT(p.preimages[0].det, kTolRegular);
  const auto q = extract_wrapping_preimage(f, 7, kS);
  EXPECT_EQ(q.wrapping, -1);
}

TEST(Wrapping, RoutesAgreeOnRandomRepresentatives) {
  for (const char* name : {"cube", "tetrahedron"}) {
    const auto phat = shared_truncated(name);
    std::mt19937_64 rng(99);
    for (int i = 0; i < 4; ++i) {
      const UnitVector s = choose_reference_s(*phat, 40 + i);
      const InvariantSet inv = random_admissible(*phat, rng, s);
      const auto report = extract_all(representative(inv, phat), with_s(s));
      for (const auto& w : report.wrappings) {
        ASSERT_NE(w.preimage_status, PreimageStatus::NotRegular) << name << " " << i;
        EXPECT_EQ(*w.preimage_wrapping, w.integral.wrapping);
      }
    }
  }
}

TEST(TrappedArea, ConstantFieldTrapsNothing) {
  const auto phat = shared_truncated("cube");
  const auto f = TangentField::analytic(phat, [](const FaceRef&, const Vec3&) { return UnitVector(0, 1, 0); });
  EXPECT_EQ(trapped_area_direct(f, 4), 0.0);
}

TEST(TrappedArea, CubeCornerOctant) {
  const auto phat = shared_truncated("cube");
  const InvariantSet inv = axis_aligned(*phat, kS);
  const auto f = representative(inv, phat);
  int positive = 0;
  for (int a = 0; a < 8; ++a) {
    // Oracle: the octant spanned by the corner orientations, listed in boundary order.
    const auto corners = phat->corner_edges(a);
    ASSERT_EQ(corners.size(), 3u);
    const double octant = spherical_triangle_area(inv.edge_orientations[corners[0]], inv.edge_orientations[corners[1]],
                                                  inv.edge_orientations[corners[2]]);
    EXPECT_NEAR(std::fabs(octant), kPi / 2, 1e-12);
    EXPECT_NEAR(trapped_area_from_invariants(inv, *phat, a), octant, 1e-12);
    EXPECT_NEAR(trapped_area_direct(f, a), octant, 2e-2);
    positive += octant > 0;
  }
  EXPECT_EQ(positive, 4);
}

TEST(TrappedArea, EachWrapAddsFourPi) {
  const auto phat = shared_truncated("cube");
  const int a = 1;  // corner whose orientations (ex, ey, ez) run in boundary order
  InvariantSet inv = axis_aligned(*phat, kS);
  ASSERT_NEAR(trapped_area_from_invariants(inv, *phat, a), kPi / 2, 1e-12);
  inv.wrapping_numbers[a] = 1;
  inv.wrapping_numbers[0] = -1;
  EXPECT_NEAR(trapped_area_from_invariants(inv, *phat, a), kPi / 2 + kFourPi, 1e-12);
  EXPECT_NEAR(trapped_area_direct(representative(inv, phat), a), kPi / 2 + kFourPi, 2e-2);
}

TEST(TrappedArea, AntipodeNegates) {
  const auto phat = shared_truncated("tetrahedron");
  std::mt19937_64 rng(5);
  const InvariantSet inv = random_admissible(*phat, rng, choose_reference_s(*phat, 5));
  const auto f = representative(inv, phat);
  const auto g = antipodal(f);
  for (int a = 0; a < 4; ++a) EXPECT_NEAR(trapped_area_direct(g, a), -trapped_area_direct(f, a), 1e-9);
}

TEST(TrappedArea, ClosedFormIndependentOfS) {
  const auto phat = shared_truncated("cube");
  std::mt19937_64 rng(6);
  const UnitVector s0 = choose_reference_s(*phat, 6);
  const InvariantSet inv = random_admissible(*phat, rng, s0);
  const auto f = representative(inv, phat);
  std::vector<double> reference;
  for (int a = 0; a < 8; ++a) reference.push_back(trapped_area_from_invariants(inv, *phat, a));
  for (std::uint64_t seed : {100u, 200u, 300u}) {
    ExtractOptions o;
    o.seed = seed;
    const auto r = extract_all(f, o);
    for (int a = 0; a < 8; ++a) EXPECT_NEAR(r.wrappings[a].trapped_closed, reference[a], 1e-6) << seed << " " << a;
  }
}

std::vector<Vec3> circulating(const TruncatedPolyhedron& phat, int c, bool alternate) {
  std::vector<Vec3> eps;
  for (const auto& e : phat.truncated_edges()) eps.push_back(e.direction);
  int k = 0;
  for (const auto& seg : phat.truncated_faces()[c].segments) {
    if (seg.truncated_edge < 0) continue;
    const Vec3 d = phat.truncated_edges()[seg.truncated_edge].direction * (seg.reversed ? -1.0 : 1.0);
    eps[seg.truncated_edge] = (alternate && k++ % 2 == 1) ? -d : d;
  }
  return eps;
}

TEST(SumRules, CubeFaceFlipCounts) {
  const auto phat = shared_truncated("cube");
  for (int c = 0; c < 6; ++c) {
    InvariantSet inv = axis_aligned(*phat, kS);
    inv.edge_orientations = circulating(*phat, c, false);
    EXPECT_EQ(orientation_flips(*phat, c, inv.edge_orientations), 0);
    EXPECT_EQ(check_sum_rules(inv, *phat).faces[c].required, -1);
    inv.edge_orientations = circulating(*phat, c, true);
    EXPECT_EQ(orientation_flips(*phat, c, inv.edge_orientations), 4);
    EXPECT_EQ(check_sum_rules(inv, *phat).faces[c].required, 1);
  }
}

TEST(SumRules, WrappingSum) {
  const auto phat = shared_truncated("cube");
  InvariantSet inv = axis_aligned(*phat, kS);
  inv.wrapping_numbers[0] = 1;
  inv.wrapping_numbers[1] = -1;
  EXPECT_TRUE(check_sum_rules(inv, *phat).wrapping_passed);
  EXPECT_TRUE(check_sum_rules(inv, *phat).passed());
  inv.wrapping_numbers[1] = 0;
  const auto v = check_sum_rules(inv, *phat);
  EXPECT_FALSE(v.wrapping_passed);
  EXPECT_EQ(v.wrapping_sum, 1);
}

TEST(SumRules, HoldOnExtractedInvariants) {
  const auto phat = shared_truncated("octahedron");
  std::mt19937_64 rng(8);
  const UnitVector s = choose_reference_s(*phat, 8);
  const auto r = extract_all(representative(random_admissible(*phat, rng, s), phat), with_s(s));
  EXPECT_TRUE(r.verdicts.passed());
  EXPECT_TRUE(r.all_passed());
}

TEST(DirectorClass, CanonicalAcrossAntipodes) {
  const auto phat = shared_truncated("cube");
  std::mt19937_64 rng(9);
  for (int i = 0; i < 10; ++i) {
    const InvariantSet inv = random_admissible(*phat, rng, kS);
    const InvariantSet anti = antipodal_image(inv);
    EXPECT_TRUE(same_invariants(antipodal_image(anti), inv));
    for (std::size_t k = 0; k < inv.kink_numbers.size(); ++k) EXPECT_EQ(anti.kink_numbers[k], inv.kink_numbers[k]);
    const InvariantSet d1 = director_class(inv), d2 = director_class(anti);
    EXPECT_TRUE(same_invariants(d1, d2));
    EXPECT_TRUE(same_invariants(d1, inv) || same_invariants(d1, anti));
  }
}

TEST(ExtractAll, RoundTripsRepresentatives) {
  for (const char* name : {"cube", "tetrahedron", "octahedron"}) {
    const auto phat = shared_truncated(name);
    std::mt19937_64 rng(12);
    for (int i = 0; i < 2; ++i) {
      const UnitVector s = choose_reference_s(*phat, 12 + i);
      const InvariantSet inv = random_admissible(*phat, rng, s);
      const auto r = extract_all(representative(inv, phat), with_s(s));
      EXPECT_TRUE(same_invariants(r.invariants, inv)) << name << " " << i;
      EXPECT_LT(r.max_trapped_residual(), 2e-2);
    }
  }
}

TEST(ExtractAll, DifferentWrappingsAreNotHomotopic) {
  const auto phat = shared_truncated("cube");
  InvariantSet a = axis_aligned(*phat, kS), b = a;
  b.wrapping_numbers[2] = 1;
  b.wrapping_numbers[3] = -1;
  const auto ra = extract_all(representative(a, phat), with_s(kS));
  const auto rb = extract_all(representative(b, phat), with_s(kS));
  EXPECT_FALSE(same_invariants(ra.invariants, rb.invariants));
  EXPECT_TRUE(same_invariants(ra.invariants, a));
  EXPECT_TRUE(same_invariants(rb.invariants, b));
}

TEST(ExtractAll, StableUnderSmallHomotopies) {
  const auto phat = shared_truncated("cube");
  std::mt19937_64 rng(13);
  const UnitVector s = choose_reference_s(*phat, 13);
  const InvariantSet inv = random_admissible(*phat, rng, s);
  const auto f = representative(inv, phat);
  for (int i = 0; i < 3; ++i) {
    const auto r = extract_all(perturbed(f, random_perturbation(rng, 0.1)), with_s(s));
    EXPECT_TRUE(same_invariants(r.invariants, inv));
  }
}

}  // namespace
}  // namespace ttopo
