#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <vector>

#include "support.hpp"
#include "tangent_topo/errors.hpp"
#include "tangent_topo/geometry.hpp"

namespace ttopo {
namespace {

struct Plane {
  Vec3 n;
  double d;  // n . x <= d inside
};

struct HullOracle {
  std::vector<Vec3> vertices;
  int edges = 0;
  int faces = 0;
};

// Brute-force half-space intersection: every feasible triple-plane
// intersection is a vertex, every plane carrying >= 3 vertices a face, every
// vertex pair sharing two planes an edge.
HullOracle intersect_halfspaces(const std::vector<Plane>& planes, double tol) {
  HullOracle h;
  std::vector<std::vector<int>> incidence;
  const int np = static_cast<int>(planes.size());
  for (int i = 0; i < np; ++i)
    for (int j = i + 1; j < np; ++j)
      for (int k = j + 1; k < np; ++k) {
        const Vec3 &a = planes[i].n, &b = planes[j].n, &c = planes[k].n;
        const double det = triple(a, b, c);
        if (std::fabs(det) < 1e-12) continue;
        const Vec3 x = (cross(b, c) * planes[i].d + cross(c, a) * planes[j].d + cross(a, b) * planes[k].d) / det;
        bool inside = true;
        for (const auto& p : planes) inside = inside && dot(p.n, x) <= p.d + tol;
        if (!inside) continue;
        bool seen = false;
        for (const auto& v : h.vertices) seen = seen || distance(v, x) < 1e3 * tol;
        if (seen) continue;
        h.vertices.push_back(x);
        std::vector<int> on;
        for (int q = 0; q < np; ++q)
          if (std::fabs(dot(planes[q].n, x) - planes[q].d) < tol) on.push_back(q);
        incidence.push_back(on);
      }
  std::vector<int> per_plane(np, 0);
  for (const auto& on : incidence)
    for (int q : on) ++per_plane[q];
  for (int c : per_plane) h.faces += c >= 3;
  for (std::size_t u = 0; u < incidence.size(); ++u)
    for (std::size_t w = u + 1; w < incidence.size(); ++w) {
      int shared = 0;
      for (int q : incidence[u])
        for (int r : incidence[w]) shared += q == r;
      h.edges += shared >= 2;
    }
  return h;
}

Vec3 vertex_average(const ConvexPolyhedron& poly) {
  Vec3 c{};
  for (const Vec3& v : poly.vertices()) c += v;
  return c / static_cast<double>(poly.num_vertices());
}

// Cut at vertex a: normal along a - centroid, pushed inward by lambda times
// the nearest-neighbour distance.
Plane cut_plane(const ConvexPolyhedron& poly, int a, double lambda) {
  const Vec3 v = poly.vertices()[a];
  double nearest = 1e300;
  for (const Vec3& w : poly.vertices())
    if (w != v) nearest = std::min(nearest, distance(v, w));
  const Vec3 n = normalized(v - vertex_average(poly));
  return {n, dot(n, v) - lambda * nearest};
}

std::vector<Plane> truncation_planes(const ConvexPolyhedron& poly, double lambda) {
  std::vector<Plane> planes;
  for (int c = 0; c < poly.num_faces(); ++c) {
    const Vec3 n = poly.face_normals()[c];
    planes.push_back({n, dot(n, poly.vertices()[poly.faces()[c][0]])});
  }
  for (int a = 0; a < poly.num_vertices(); ++a) planes.push_back(cut_plane(poly, a, lambda));
  return planes;
}

// Where the edge from u towards w crosses the cut plane of u.
Vec3 edge_cut(const ConvexPolyhedron& poly, int u, int w, double lambda) {
  const Plane p = cut_plane(poly, u, lambda);
  const Vec3 a = poly.vertices()[u], d = poly.vertices()[w] - a;
  return a + d * ((p.d - dot(p.n, a)) / dot(p.n, d));
}

class Builtins : public ::testing::TestWithParam<const char*> {};

TEST_P(Builtins, MatchesHalfspaceOracle) {
  const auto poly = builtin_polyhedron(GetParam());
  const auto phat = truncate(poly, TruncationSpec::from_lambda(0.25));
  const HullOracle h = intersect_halfspaces(truncation_planes(poly, 0.25), 1e-9);
  EXPECT_EQ(phat.num_vertices(), static_cast<int>(h.vertices.size()));
  EXPECT_EQ(phat.num_edges(), h.edges);
  EXPECT_EQ(phat.num_faces(), h.faces);
  for (const Vec3& v : phat.vertices()) {
    double best = 1e9;
    for (const Vec3& w : h.vertices) best = std::min(best, distance(v, w));
    EXPECT_LT(best, 1e-9);
  }
}

TEST_P(Builtins, AdjacencyInvariantsHold) {
  const auto phat = truncate(builtin_polyhedron(GetParam()), TruncationSpec::from_lambda(0.25));
  const auto problems = check_adjacency(phat);
  EXPECT_TRUE(problems.empty()) << problems.front();
  EXPECT_EQ(phat.euler_characteristic(), 2);
}

TEST_P(Builtins, TruncatedEdgeIdsFollowConvention) {
  const auto poly = builtin_polyhedron(GetParam());
  const double lambda = 0.2;
  const auto phat = truncate(poly, TruncationSpec::from_lambda(lambda));
  ASSERT_EQ(static_cast<int>(phat.truncated_edges().size()), poly.num_edges());
  for (int b = 0; b < poly.num_edges(); ++b) {
    const auto& e = poly.edges()[b];
    const auto& te = phat.truncated_edges()[b];
    EXPECT_EQ(te.start, 2 * b);
    EXPECT_EQ(te.end, 2 * b + 1);
    EXPECT_LT(distance(phat.vertices()[2 * b], edge_cut(poly, e.v0, e.v1, lambda)), 1e-12);
    EXPECT_LT(distance(phat.vertices()[2 * b + 1], edge_cut(poly, e.v1, e.v0, lambda)), 1e-12);
    EXPECT_LT(distance(te.direction, normalized(poly.vertices()[e.v1] - poly.vertices()[e.v0])), 1e-12);
  }
}

TEST_P(Builtins, CleavedEdgesPositiveAboutTruncatedFace) {
  const auto phat = truncate(builtin_polyhedron(GetParam()), TruncationSpec::from_lambda(0.25));
  for (const auto& ce : phat.cleaved_edges()) {
    const auto& f = phat.truncated_faces()[ce.face];
    const Vec3 centre = phat.vertices()[ce.start] * 0.5 + phat.vertices()[ce.end] * 0.5;
    Vec3 mid{};
    for (int v : f.corners) mid += phat.vertices()[v];
    mid = mid / static_cast<double>(f.corners.size());
    const Vec3 dir = phat.vertices()[ce.end] - phat.vertices()[ce.start];
    EXPECT_GT(dot(cross(centre - mid, dir), f.normal), 0.0);
    EXPECT_EQ(phat.cleaved_edge_index(ce.vertex, ce.face), &ce - phat.cleaved_edges().data());
  }
}

TEST_P(Builtins, RigidMotionInvariance) {
  const auto poly = builtin_polyhedron(GetParam());
  const double c = std::cos(0.7), s = std::sin(0.7);
  const std::array<Vec3, 3> rot{Vec3{c, -s, 0}, Vec3{s * 0.6, c * 0.6, -0.8}, Vec3{s * 0.8, c * 0.8, 0.6}};
  const Vec3 shift{3.0, -1.5, 2.0};
  const auto moved = poly.transformed(rot, shift);
  const auto a = truncate(poly, TruncationSpec::from_lambda(0.25));
  const auto b = truncate(moved, TruncationSpec::from_lambda(0.25));
  ASSERT_EQ(a.num_vertices(), b.num_vertices());
  EXPECT_EQ(a.num_edges(), b.num_edges());
  EXPECT_EQ(a.num_faces(), b.num_faces());
  for (int i = 0; i < a.num_vertices(); ++i) {
    const Vec3 v = a.vertices()[i];
    const Vec3 expected = Vec3{dot(rot[0], v), dot(rot[1], v), dot(rot[2], v)} + shift;
    EXPECT_LT(distance(b.vertices()[i], expected), 1e-9);
  }
  EXPECT_TRUE(check_adjacency(b).empty());
}

INSTANTIATE_TEST_SUITE_P(Polyhedra, Builtins, ::testing::Values("cube", "tetrahedron", "octahedron"));

TEST(Truncate, CubeCounts) {
  const auto phat = truncate(builtin_polyhedron("cube"), TruncationSpec::from_lambda(0.25));
  EXPECT_EQ(phat.cleaved_faces().size(), 8u);
  EXPECT_EQ(phat.truncated_faces().size(), 6u);
  EXPECT_EQ(phat.truncated_edges().size(), 12u);
  EXPECT_EQ(phat.cleaved_edges().size(), 24u);
  EXPECT_EQ(phat.num_vertices(), 24);
  EXPECT_EQ(phat.num_edges(), 36);
  EXPECT_EQ(phat.num_faces(), 14);
  EXPECT_EQ(phat.euler_characteristic(), 2);
  for (const auto& f : phat.cleaved_faces()) EXPECT_EQ(f.corners.size(), 3u);
  for (const auto& f : phat.truncated_faces()) EXPECT_EQ(f.corners.size(), 8u);
}

TEST(Truncate, TetrahedronCounts) {
  const auto phat = truncate(builtin_polyhedron("tetrahedron"), TruncationSpec::from_lambda(0.25));
  EXPECT_EQ(phat.cleaved_faces().size(), 4u);
  EXPECT_EQ(phat.truncated_faces().size(), 4u);
  EXPECT_EQ(phat.truncated_edges().size(), 6u);
  EXPECT_EQ(phat.cleaved_edges().size(), 12u);
  for (const auto& f : phat.cleaved_faces()) EXPECT_EQ(f.corners.size(), 3u);
  for (const auto& f : phat.truncated_faces()) EXPECT_EQ(f.corners.size(), 6u);
}

TEST(Truncate, TruncatedFacesAlternate) {
  const auto phat = truncate(builtin_polyhedron("octahedron"), TruncationSpec::from_lambda(0.2));
  for (const auto& f : phat.truncated_faces())
    for (std::size_t k = 0; k < f.segments.size(); ++k) {
      const bool cleaved = f.segments[k].cleaved_edge >= 0;
      const bool next_cleaved = f.segments[(k + 1) % f.segments.size()].cleaved_edge >= 0;
      EXPECT_NE(cleaved, next_cleaved);
    }
  for (const auto& f : phat.cleaved_faces())
    for (const auto& seg : f.segments) {
      EXPECT_GE(seg.cleaved_edge, 0);
      EXPECT_TRUE(seg.reversed);
    }
}

TEST(Truncate, LambdaOutsideRangeRejected) {
  const auto poly = builtin_polyhedron("cube");
  for (double lambda : {0.0, 0.5, 0.7, -0.1}) {
    try {
      truncate(poly, TruncationSpec::from_lambda(lambda));
      ADD_FAILURE() << lambda;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::SeparationViolation);
    }
  }
}

TEST(Truncate, LambdaCutsCrossingOnCubeEdgesAreDegenerate) {
  // On the cube the cut reaches lambda sqrt(3) along each edge, so the cuts of
  // adjacent corners meet at the midpoint for lambda = 1 / (2 sqrt 3) and cross beyond it.
  const auto poly = builtin_polyhedron("cube");
  for (double lambda : {0.5 / std::sqrt(3.0), 0.3, 0.45}) {
    try {
      truncate(poly, TruncationSpec::from_lambda(lambda));
      ADD_FAILURE() << lambda;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::DegenerateCut);
    }
  }
  EXPECT_NO_THROW(truncate(poly, TruncationSpec::from_lambda(0.28)));
}

TEST(Truncate, CutsMeetingAtEdgeMidpointAreDegenerate) {
  const auto poly = builtin_polyhedron("cube");
  std::vector<CutPlane> planes;
  for (int a = 0; a < poly.num_vertices(); ++a) {
    const Vec3 v = poly.vertices()[a];
    const auto& e = *std::find_if(poly.edges().begin(), poly.edges().end(), [&](const PolyEdge& e) { return e.v0 == a || e.v1 == a; });
    // Through the midpoints of the three edges at v.
    planes.push_back({normalized(v - poly.centroid()), (poly.vertices()[e.v0] + poly.vertices()[e.v1]) * 0.5});
  }
  const Vec3 mid = (poly.vertices()[0] + poly.vertices()[1]) * 0.5;
  ASSERT_NEAR(dot(planes[0].normal, mid - planes[0].point), 0.0, 1e-12);
  try {
    truncate(poly, TruncationSpec::from_planes(planes));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateCut);
  }
}

TEST(Polyhedron, AcceptsEitherFaceOrientation) {
  // Square pyramid with mixed face orientations; apex of degree 4.
  const std::vector<Vec3> v{{-1, -1, 0}, {1, -1, 0}, {1, 1, 0}, {-1, 1, 0}, {0, 0, 1}};
  const auto poly = ConvexPolyhedron::create(v, {{0, 1, 2, 3}, {0, 1, 4}, {2, 1, 4}, {2, 3, 4}, {0, 4, 3}});
  EXPECT_EQ(poly.num_edges(), 8);
  for (int c = 0; c < poly.num_faces(); ++c) {
    const Vec3 p = poly.vertices()[poly.faces()[c][0]];
    EXPECT_GT(dot(poly.face_normals()[c], p - poly.centroid()), 0.0);
  }
  const auto phat = truncate(poly, TruncationSpec::from_lambda(0.2));
  EXPECT_TRUE(check_adjacency(phat).empty());
  EXPECT_EQ(phat.cleaved_faces()[4].corners.size(), 4u);
}

TEST(Polyhedron, NonConvexRejected) {
  const auto cube = builtin_polyhedron("cube");
  std::vector<Vec3> dented = cube.vertices();
  dented[6] = dented[6] * 0.8;
  EXPECT_THROW(ConvexPolyhedron::create(dented, cube.faces()), Error);
  try {
    ConvexPolyhedron::create({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {{0, 2, 1}, {0, 1, 3}, {1, 2, 3}});
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidPolyhedron);
  }
}

TEST(Polyhedron, UnknownBuiltin) { EXPECT_THROW(builtin_polyhedron("dodecahedron"), Error); }

TEST(PolarChart, CollapsesToBaseAndAnchor) {
  const auto phat = testing::shared_truncated("cube");
  for (const FaceRef& ref : phat->all_faces()) {
    const PolarChart chart = polar_chart(*phat, ref);
    const auto& f = phat->face(ref);
    for (double phi : {0.0, 1.0, 4.0}) EXPECT_LT(distance(chart.point(0.0, phi), chart.base()), 1e-15);
    EXPECT_LT(distance(chart.point(1.0, 0.0), phat->vertices()[f.corners[0]]), 1e-15);
    EXPECT_EQ(f.corners[0], *std::min_element(f.corners.begin(), f.corners.end()));
  }
}

TEST(PolarChart, LocateInvertsPoint) {
  const auto phat = testing::shared_truncated("octahedron");
  for (const FaceRef& ref : phat->all_faces()) {
    const PolarChart chart = polar_chart(*phat, ref);
    for (double rho : {0.05, 0.4, 0.99})
      for (double phi : {0.1, 2.0, 5.9}) {
        const auto loc = chart.locate(chart.point(rho, phi));
        EXPECT_NEAR(loc.chart.rho, rho, 1e-12);
        EXPECT_NEAR(loc.chart.phi, phi, 1e-12);
      }
  }
}

TEST(PolarChart, MeshTilesFacePositively) {
  const auto phat = testing::shared_truncated("tetrahedron");
  for (const FaceRef& ref : phat->all_faces()) {
    const PolarChart chart = polar_chart(*phat, ref);
    const auto& f = phat->face(ref);
    const auto poly = phat->polygon(ref);
    Vec3 twice_area{};
    for (std::size_t k = 0; k < poly.size(); ++k) twice_area += cross(poly[k], poly[(k + 1) % poly.size()]);
    for (int depth : {0, 1, 3}) {
      const FaceMesh m = chart.mesh(depth);
      EXPECT_EQ(m.triangles.size(), f.corners.size() << (2 * depth));
      EXPECT_EQ(m.boundary.size(), f.corners.size() << depth);
      double area = 0.0;
      for (const auto& t : m.triangles) {
        const double a = dot(cross(m.nodes[t[1]] - m.nodes[t[0]], m.nodes[t[2]] - m.nodes[t[0]]), f.normal);
        EXPECT_GT(a, 0.0);
        area += 0.5 * a;
      }
      EXPECT_NEAR(area, 0.5 * dot(twice_area, f.normal), 1e-12);
    }
  }
}

TEST(PolarChart, BaseOutsideRejected) {
  const auto phat = testing::shared_truncated("cube");
  const FaceRef ref{FaceKind::Truncated, 0};
  try {
    polar_chart(*phat, ref, phat->vertices()[phat->face(ref).corners[0]] * 3.0);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BasePointOutside);
  }
}

}  // namespace
}  // namespace ttopo
