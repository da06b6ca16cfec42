#pragma once

// Convex polyhedra, vertex truncation, and polygonal-polar charts.
//
// Index conventions used throughout the library:
//   * Original edge b joins vertices (u, w) with u < w. In the truncated
//     polyhedron the cut point of edge b near u has id 2b and the one near w
//     has id 2b + 1, so truncated edge b runs from vertex 2b to vertex 2b + 1.
//   * Cleaved face a is the cut at original vertex a; truncated face c is the
//     remnant of original face c.
//   * Every face boundary is listed positively about its outward normal and
//     starts at its lowest-index corner (phi = 0 of its polar chart).

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "tangent_topo/vec3.hpp"

namespace ttopo {

struct PolyEdge {
  int v0 = 0;  // v0 < v1
  int v1 = 0;
  int left_face = -1;   // face whose cycle contains v0 -> v1
  int right_face = -1;  // face whose cycle contains v1 -> v0
};

class ConvexPolyhedron {
 public:
  /// Validates and builds a polyhedron. Face cycles may come in either
  /// orientation; they are reoriented outward using the centroid test.
  static ConvexPolyhedron create(std::vector<Vec3> vertices, std::vector<std::vector<int>> faces);

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<std::vector<int>>& faces() const { return faces_; }
  const std::vector<PolyEdge>& edges() const { return edges_; }
  const std::vector<Vec3>& face_normals() const { return normals_; }
  const Vec3& centroid() const { return centroid_; }
  /// Scale-aware geometric tolerance (1e-9 of the bounding-box diagonal).
  double tol() const { return tol_; }
  double diameter() const { return diameter_; }

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_faces() const { return static_cast<int>(faces_.size()); }

  /// Edge joining u and w (any order), or -1.
  int edge_index(int u, int w) const;
  /// Position of vertex a inside the cycle of face c, or -1.
  int position_in_face(int c, int a) const;
  int degree(int a) const;

  ConvexPolyhedron transformed(const std::array<Vec3, 3>& rotation_rows, const Vec3& shift) const;

 private:
  std::vector<Vec3> vertices_;
  std::vector<std::vector<int>> faces_;
  std::vector<PolyEdge> edges_;
  std::vector<Vec3> normals_;
  std::vector<std::vector<int>> vertex_edges_;
  Vec3 centroid_;
  double tol_ = 0.0;
  double diameter_ = 0.0;
};

ConvexPolyhedron builtin_polyhedron(const std::string& name);
std::vector<std::string> builtin_names();

struct CutPlane {
  Vec3 normal;  // outward, pointing toward the removed vertex
  Vec3 point;
};

/// Either explicit cut planes (one per vertex) or a fraction lambda in (0, 1/2).
struct TruncationSpec {
  std::optional<double> lambda;
  std::vector<CutPlane> planes;

  static TruncationSpec from_lambda(double lambda) { return {lambda, {}}; }
  static TruncationSpec from_planes(std::vector<CutPlane> planes) { return {std::nullopt, std::move(planes)}; }
};

std::vector<CutPlane> resolve_cut_planes(const ConvexPolyhedron& poly, const TruncationSpec& spec);

enum class FaceKind { Cleaved, Truncated };

struct FaceRef {
  FaceKind kind = FaceKind::Cleaved;
  int index = 0;
  auto operator<=>(const FaceRef&) const = default;
};

std::string to_string(const FaceRef& f);

/// Cleaved edge B(a, c): the segment where the cut at vertex a meets face c,
/// oriented positively about the face normal of c.
struct CleavedEdge {
  int vertex = 0;
  int face = 0;
  int start = 0;  // truncated-polyhedron vertex ids
  int end = 0;
  int start_edge = 0;  // truncated edge through `start`
  int end_edge = 0;    // truncated edge through `end`
};

struct TruncatedEdge {
  int edge = 0;
  int start = 0;  // = 2 * edge
  int end = 0;    // = 2 * edge + 1
  Vec3 direction;
};

/// One side of a face boundary. Exactly one of cleaved_edge / truncated_edge is >= 0.
struct BoundarySegment {
  int cleaved_edge = -1;
  int truncated_edge = -1;
  bool reversed = false;  // traversed against the stored edge orientation
};

struct PolygonFace {
  FaceRef ref;
  Vec3 normal;
  std::vector<int> corners;
  std::vector<BoundarySegment> segments;  // segment k joins corners k and k+1
};

class TruncatedPolyhedron {
 public:
  const ConvexPolyhedron& parent() const { return parent_; }
  const std::vector<CutPlane>& cuts() const { return cuts_; }
  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<PolygonFace>& cleaved_faces() const { return cleaved_; }
  const std::vector<PolygonFace>& truncated_faces() const { return truncated_; }
  const std::vector<TruncatedEdge>& truncated_edges() const { return truncated_edges_; }
  const std::vector<CleavedEdge>& cleaved_edges() const { return cleaved_edges_; }

  const PolygonFace& face(const FaceRef& f) const;
  std::vector<FaceRef> all_faces() const;
  std::vector<Vec3> polygon(const FaceRef& f) const;

  /// Id of cleaved edge B(a, c), or -1.
  int cleaved_edge_index(int vertex, int face) const;

  /// Truncated edges met at the corners of cleaved face a, in boundary order.
  std::vector<int> corner_edges(int vertex) const;

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_edges() const { return static_cast<int>(truncated_edges_.size() + cleaved_edges_.size()); }
  int num_faces() const { return static_cast<int>(cleaved_.size() + truncated_.size()); }
  int euler_characteristic() const { return num_vertices() - num_edges() + num_faces(); }
  double tol() const { return parent_.tol(); }

 private:
  friend TruncatedPolyhedron truncate(const ConvexPolyhedron&, const TruncationSpec&);

  ConvexPolyhedron parent_;
  std::vector<CutPlane> cuts_;
  std::vector<Vec3> vertices_;
  std::vector<PolygonFace> cleaved_;
  std::vector<PolygonFace> truncated_;
  std::vector<TruncatedEdge> truncated_edges_;
  std::vector<CleavedEdge> cleaved_edges_;
  std::vector<int> cleaved_lookup_;  // vertex * num_faces + face -> cleaved edge
};

TruncatedPolyhedron truncate(const ConvexPolyhedron& poly, const TruncationSpec& spec);

/// Combinatorial checks: alternation on truncated faces, cleaved-only
/// boundaries on cleaved faces, opposite-orientation pairing of every edge
/// (the boundary of the boundary vanishes), corner counts, Euler
/// characteristic, and positive geometric orientation. Returns the list of
/// violated conditions (empty when everything holds).
std::vector<std::string> check_adjacency(const TruncatedPolyhedron& phat);

struct ChartPoint {
  double rho = 0.0;
  double phi = 0.0;
};

/// Triangulation of one face produced by uniform subdivision of the chart's
/// fan triangles. Triangles are positively oriented about the face normal;
/// `boundary` lists the outer ring nodes in positive order.
struct FaceMesh {
  std::vector<Vec3> nodes;
  std::vector<ChartPoint> chart;  // may be empty for meshes read from files
  std::vector<std::array<int, 3>> triangles;
  std::vector<int> boundary;
};

/// Polygonal-polar coordinates y(rho, phi) = rho z(phi) + (1 - rho) base,
/// with z piecewise linear and constant-speed on each boundary segment.
class PolarChart {
 public:
  PolarChart(std::vector<Vec3> boundary, Vec3 normal, std::optional<Vec3> base = std::nullopt);

  const Vec3& base() const { return base_; }
  const Vec3& normal() const { return normal_; }
  const std::vector<Vec3>& boundary() const { return boundary_; }
  int segments() const { return static_cast<int>(boundary_.size()); }

  Vec3 boundary_point(double phi) const;
  Vec3 point(double rho, double phi) const;
  Vec3 point(const ChartPoint& p) const { return point(p.rho, p.phi); }

  struct Location {
    int sector = 0;
    double u = 0.0;  // position along boundary segment `sector`
    ChartPoint chart;
  };
  /// Inverse chart for points of the host polygon (clamped to it).
  Location locate(const Vec3& x) const;

  /// Uniform 4-fold subdivision of the fan to `depth` levels (2^depth rings).
  FaceMesh mesh(int depth) const;

  double phi_of(int sector, double u) const;

 private:
  std::vector<Vec3> boundary_;
  Vec3 normal_;
  Vec3 base_;
  Vec3 e1_, e2_;
};

PolarChart polar_chart(const TruncatedPolyhedron& phat, const FaceRef& face,
                       std::optional<Vec3> base = std::nullopt);

}  // namespace ttopo
