#include "tangent_topo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "tangent_topo/errors.hpp"

namespace ttopo {

namespace {

Vec3 newell_normal(const std::vector<Vec3>& pts) {
  Vec3 n;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec3& p = pts[i];
    const Vec3& q = pts[(i + 1) % pts.size()];
    n.x += (p.y - q.y) * (p.z + q.z);
    n.y += (p.z - q.z) * (p.x + q.x);
    n.z += (p.x - q.x) * (p.y + q.y);
  }
  return n;
}

Vec3 average(const std::vector<Vec3>& pts) {
  Vec3 c;
  for (const auto& p : pts) c += p;
  return c / static_cast<double>(pts.size());
}

template <class T>
void rotate_to_min(std::vector<T>& cycle, std::vector<BoundarySegment>* segs = nullptr) {
  const auto it = std::min_element(cycle.begin(), cycle.end());
  const auto shift = it - cycle.begin();
  std::rotate(cycle.begin(), it, cycle.end());
  if (segs) std::rotate(segs->begin(), segs->begin() + shift, segs->end());
}

}  // namespace

ConvexPolyhedron ConvexPolyhedron::create(std::vector<Vec3> vertices, std::vector<std::vector<int>> faces) {
  ConvexPolyhedron p;
  const int nv = static_cast<int>(vertices.size());
  if (nv < 4) fail(ErrorCode::InvalidPolyhedron, "need at least 4 vertices");
  if (faces.size() < 4) fail(ErrorCode::InvalidPolyhedron, "need at least 4 faces");

  Vec3 lo = vertices[0], hi = vertices[0];
  for (const auto& v : vertices) {
    lo = {std::min(lo.x, v.x), std::min(lo.y, v.y), std::min(lo.z, v.z)};
    hi = {std::max(hi.x, v.x), std::max(hi.y, v.y), std::max(hi.z, v.z)};
  }
  p.diameter_ = norm(hi - lo);
  p.tol_ = 1e-9 * p.diameter_;
  p.centroid_ = average(vertices);

  for (auto& f : faces) {
    if (f.size() < 3) fail(ErrorCode::InvalidPolyhedron, "face with fewer than 3 vertices");
    std::vector<Vec3> pts;
    for (int i : f) {
      if (i < 0 || i >= nv) fail(ErrorCode::InvalidPolyhedron, "face index out of range");
      pts.push_back(vertices[i]);
    }
    Vec3 n = newell_normal(pts);
    if (norm(n) <= p.tol_ * p.diameter_) fail(ErrorCode::InvalidPolyhedron, "degenerate face");
    if (dot(n, average(pts) - p.centroid_) < 0) {
      std::reverse(f.begin(), f.end());
      n = -n;
    }
    n = normalized(n);
    const Vec3 c = average(pts);
    for (const auto& q : pts)
      if (std::fabs(dot(q - c, n)) > p.tol_) fail(ErrorCode::InvalidPolyhedron, "non-planar face");
    for (int i = 0; i < nv; ++i)
      if (dot(vertices[i] - c, n) > p.tol_) fail(ErrorCode::InvalidPolyhedron, "polyhedron is not convex");
    for (std::size_t i = 0; i < f.size(); ++i) {
      const Vec3& a = vertices[f[i]];
      const Vec3& b = vertices[f[(i + 1) % f.size()]];
      const Vec3& d = vertices[f[(i + 2) % f.size()]];
      if (dot(cross(b - a, d - b), n) <= 0)
        fail(ErrorCode::InvalidPolyhedron, "face cycle is not strictly convex");
    }
    p.normals_.push_back(n);
  }

  std::map<std::pair<int, int>, int> lookup;
  for (int c = 0; c < static_cast<int>(faces.size()); ++c) {
    const auto& f = faces[c];
    for (std::size_t i = 0; i < f.size(); ++i) {
      const int u = f[i];
      const int w = f[(i + 1) % f.size()];
      const auto key = std::minmax(u, w);
      auto [it, inserted] = lookup.try_emplace({key.first, key.second}, static_cast<int>(p.edges_.size()));
      if (inserted) p.edges_.push_back({key.first, key.second, -1, -1});
      PolyEdge& e = p.edges_[it->second];
      int& slot = (u == e.v0) ? e.left_face : e.right_face;
      if (slot != -1) fail(ErrorCode::InvalidPolyhedron, "edge used twice in the same direction");
      slot = c;
    }
  }
  for (const auto& e : p.edges_)
    if (e.left_face < 0 || e.right_face < 0) fail(ErrorCode::InvalidPolyhedron, "surface is not closed");

  if (nv - static_cast<int>(p.edges_.size()) + static_cast<int>(faces.size()) != 2)
    fail(ErrorCode::InvalidPolyhedron, "Euler characteristic is not 2");

  p.vertex_edges_.assign(nv, {});
  for (int b = 0; b < static_cast<int>(p.edges_.size()); ++b) {
    p.vertex_edges_[p.edges_[b].v0].push_back(b);
    p.vertex_edges_[p.edges_[b].v1].push_back(b);
  }
  for (int a = 0; a < nv; ++a)
    if (p.vertex_edges_[a].size() < 3) fail(ErrorCode::InvalidPolyhedron, "vertex of degree < 3");

  p.vertices_ = std::move(vertices);
  p.faces_ = std::move(faces);
  return p;
}

int ConvexPolyhedron::edge_index(int u, int w) const {
  for (int b : vertex_edges_[u]) {
    const auto& e = edges_[b];
    if ((e.v0 == u && e.v1 == w) || (e.v0 == w && e.v1 == u)) return b;
  }
  return -1;
}

int ConvexPolyhedron::position_in_face(int c, int a) const {
  const auto& f = faces_[c];
  const auto it = std::find(f.begin(), f.end(), a);
  return it == f.end() ? -1 : static_cast<int>(it - f.begin());
}

int ConvexPolyhedron::degree(int a) const { return static_cast<int>(vertex_edges_[a].size()); }

ConvexPolyhedron ConvexPolyhedron::transformed(const std::array<Vec3, 3>& rows, const Vec3& shift) const {
  std::vector<Vec3> moved;
  moved.reserve(vertices_.size());
  for (const auto& v : vertices_) moved.push_back(Vec3{dot(rows[0], v), dot(rows[1], v), dot(rows[2], v)} + shift);
  return create(std::move(moved), faces_);
}

ConvexPolyhedron builtin_polyhedron(const std::string& name) {
  if (name == "cube") {
    return ConvexPolyhedron::create({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}},
                                    {{0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4}, {1, 2, 6, 5}, {2, 3, 7, 6}, {3, 0, 4, 7}});
  }
  if (name == "tetrahedron") {
    return ConvexPolyhedron::create({{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}},
                                    {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}});
  }
  if (name == "octahedron") {
    return ConvexPolyhedron::create({{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}},
                                    {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4}, {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}});
  }
  fail(ErrorCode::InvalidPolyhedron, "unknown builtin polyhedron '" + name + "'");
}

std::vector<std::string> builtin_names() { return {"cube", "tetrahedron", "octahedron"}; }

std::vector<CutPlane> resolve_cut_planes(const ConvexPolyhedron& poly, const TruncationSpec& spec) {
  if (!spec.lambda) {
    if (static_cast<int>(spec.planes.size()) != poly.num_vertices())
      fail(ErrorCode::SeparationViolation, "need one cut plane per vertex");
    std::vector<CutPlane> planes = spec.planes;
    for (auto& pl : planes) pl.normal = normalized(pl.normal);
    return planes;
  }
  const double lambda = *spec.lambda;
  if (!(lambda > 0.0 && lambda < 0.5)) fail(ErrorCode::SeparationViolation, "lambda must lie in (0, 1/2)");
  std::vector<CutPlane> planes;
  const auto& vs = poly.vertices();
  for (int a = 0; a < poly.num_vertices(); ++a) {
    double nearest = std::numeric_limits<double>::infinity();
    for (int b = 0; b < poly.num_vertices(); ++b)
      if (b != a) nearest = std::min(nearest, distance(vs[a], vs[b]));
    const Vec3 outward = normalized(vs[a] - poly.centroid());
    planes.push_back({outward, vs[a] - outward * (lambda * nearest)});
  }
  return planes;
}

std::string to_string(const FaceRef& f) {
  return std::string(f.kind == FaceKind::Cleaved ? "cleaved" : "truncated") + "[" + std::to_string(f.index) + "]";
}

TruncatedPolyhedron truncate(const ConvexPolyhedron& poly, const TruncationSpec& spec) {
  TruncatedPolyhedron t;
  t.parent_ = poly;
  t.cuts_ = resolve_cut_planes(poly, spec);
  const double tol = poly.tol();
  const auto& vs = poly.vertices();
  const int nv = poly.num_vertices();
  const int nf = poly.num_faces();

  for (int a = 0; a < nv; ++a) {
    const CutPlane& pl = t.cuts_[a];
    for (int b = 0; b < nv; ++b) {
      const double d = dot(vs[b] - pl.point, pl.normal);
      if (std::fabs(d) <= tol) fail(ErrorCode::DegenerateCut, "cut plane " + std::to_string(a) + " passes through vertex " + std::to_string(b));
      if ((b == a) != (d > 0))
        fail(ErrorCode::SeparationViolation, "cut plane " + std::to_string(a) + " does not isolate vertex " + std::to_string(a));
    }
  }

  // Cut points: id 2b near v0, 2b + 1 near v1.
  const auto cut_point = [&](int from, int to) {
    const CutPlane& pl = t.cuts_[from];
    const Vec3 d = vs[to] - vs[from];
    const double s = dot(pl.point - vs[from], pl.normal) / dot(d, pl.normal);
    return vs[from] + d * s;
  };
  const auto vid = [&](int from, int to) {
    const int b = poly.edge_index(from, to);
    return 2 * b + (poly.edges()[b].v0 == from ? 0 : 1);
  };
  for (int b = 0; b < poly.num_edges(); ++b) {
    const auto& e = poly.edges()[b];
    t.vertices_.push_back(cut_point(e.v0, e.v1));
    t.vertices_.push_back(cut_point(e.v1, e.v0));
    t.truncated_edges_.push_back({b, 2 * b, 2 * b + 1, normalized(vs[e.v1] - vs[e.v0])});
  }
  for (int id = 0; id < static_cast<int>(t.vertices_.size()); ++id) {
    const auto& e = poly.edges()[id / 2];
    const int owner = (id % 2 == 0) ? e.v0 : e.v1;
    for (int a = 0; a < nv; ++a) {
      if (a == owner) continue;
      const double d = dot(t.vertices_[id] - t.cuts_[a].point, t.cuts_[a].normal);
      if (d >= -tol)
        fail(ErrorCode::DegenerateCut, "cut planes " + std::to_string(owner) + " and " + std::to_string(a) +
                                           " meet inside the polyhedron (truncated edge " + std::to_string(id / 2) +
                                           " collapses)");
    }
  }

  // Cleaved edges, one per (vertex, incident face), oriented along the face cycle.
  t.cleaved_lookup_.assign(static_cast<std::size_t>(nv) * nf, -1);
  std::vector<std::vector<int>> face_cleaved(nf);
  for (int c = 0; c < nf; ++c) {
    const auto& f = poly.faces()[c];
    const int m = static_cast<int>(f.size());
    for (int i = 0; i < m; ++i) {
      const int a = f[i];
      const int prev = f[(i + m - 1) % m];
      const int next = f[(i + 1) % m];
      CleavedEdge ce{a, c, vid(a, prev), vid(a, next), poly.edge_index(a, prev), poly.edge_index(a, next)};
      t.cleaved_lookup_[static_cast<std::size_t>(a) * nf + c] = static_cast<int>(t.cleaved_edges_.size());
      face_cleaved[c].push_back(static_cast<int>(t.cleaved_edges_.size()));
      t.cleaved_edges_.push_back(ce);
    }
  }

  // Truncated faces: cleaved and truncated edges in alternation.
  for (int c = 0; c < nf; ++c) {
    const auto& f = poly.faces()[c];
    const int m = static_cast<int>(f.size());
    PolygonFace pf{{FaceKind::Truncated, c}, poly.face_normals()[c], {}, {}};
    for (int i = 0; i < m; ++i) {
      const CleavedEdge& ce = t.cleaved_edges_[face_cleaved[c][i]];
      pf.corners.push_back(ce.start);
      pf.segments.push_back({face_cleaved[c][i], -1, false});
      pf.corners.push_back(ce.end);
      const int b = ce.end_edge;
      pf.segments.push_back({-1, b, ce.end != t.truncated_edges_[b].start});
    }
    rotate_to_min(pf.corners, &pf.segments);
    t.truncated_.push_back(std::move(pf));
  }

  // Cleaved faces: walk around vertex a, traversing each cleaved edge backwards.
  for (int a = 0; a < nv; ++a) {
    PolygonFace pf{{FaceKind::Cleaved, a}, t.cuts_[a].normal, {}, {}};
    int c = -1;
    for (int cc = 0; cc < nf && c < 0; ++cc)
      if (poly.position_in_face(cc, a) >= 0) c = cc;
    const int start_face = c;
    do {
      const int id = t.cleaved_lookup_[static_cast<std::size_t>(a) * nf + c];
      const CleavedEdge& ce = t.cleaved_edges_[id];
      pf.corners.push_back(ce.end);
      pf.segments.push_back({id, -1, true});
      // The next face contains the cleaved edge that ends where this one starts.
      const PolyEdge& e = poly.edges()[ce.start_edge];
      c = (e.left_face == c) ? e.right_face : e.left_face;
      if (static_cast<int>(pf.corners.size()) > poly.degree(a))
        fail(ErrorCode::InvalidPolyhedron, "inconsistent face cycles around vertex " + std::to_string(a));
    } while (c != start_face);
    rotate_to_min(pf.corners, &pf.segments);
    t.cleaved_.push_back(std::move(pf));
  }
  return t;
}

const PolygonFace& TruncatedPolyhedron::face(const FaceRef& f) const {
  return f.kind == FaceKind::Cleaved ? cleaved_.at(f.index) : truncated_.at(f.index);
}

std::vector<FaceRef> TruncatedPolyhedron::all_faces() const {
  std::vector<FaceRef> out;
  for (int a = 0; a < static_cast<int>(cleaved_.size()); ++a) out.push_back({FaceKind::Cleaved, a});
  for (int c = 0; c < static_cast<int>(truncated_.size()); ++c) out.push_back({FaceKind::Truncated, c});
  return out;
}

std::vector<Vec3> TruncatedPolyhedron::polygon(const FaceRef& f) const {
  std::vector<Vec3> pts;
  for (int id : face(f).corners) pts.push_back(vertices_[id]);
  return pts;
}

int TruncatedPolyhedron::cleaved_edge_index(int vertex, int face) const {
  if (vertex < 0 || face < 0 || vertex >= parent_.num_vertices() || face >= parent_.num_faces()) return -1;
  return cleaved_lookup_[static_cast<std::size_t>(vertex) * parent_.num_faces() + face];
}

std::vector<int> TruncatedPolyhedron::corner_edges(int vertex) const {
  std::vector<int> out;
  for (int id : cleaved_.at(vertex).corners) out.push_back(id / 2);
  return out;
}

std::vector<std::string> check_adjacency(const TruncatedPolyhedron& phat) {
  std::vector<std::string> problems;
  const auto report = [&](const std::string& s) { problems.push_back(s); };
  const auto& poly = phat.parent();

  // Each edge appears once per orientation across all face boundaries.
  std::map<std::pair<int, int>, int> directed;
  const auto segment_ends = [&](const BoundarySegment& s) {
    int a, b;
    if (s.cleaved_edge >= 0) {
      a = phat.cleaved_edges()[s.cleaved_edge].start;
      b = phat.cleaved_edges()[s.cleaved_edge].end;
    } else {
      a = phat.truncated_edges()[s.truncated_edge].start;
      b = phat.truncated_edges()[s.truncated_edge].end;
    }
    return s.reversed ? std::pair{b, a} : std::pair{a, b};
  };

  for (const auto& f : phat.truncated_faces()) {
    const std::size_t n = f.segments.size();
    for (std::size_t k = 0; k < n; ++k) {
      const bool cl = f.segments[k].cleaved_edge >= 0;
      const bool next_cl = f.segments[(k + 1) % n].cleaved_edge >= 0;
      if (cl == next_cl) report(to_string(f.ref) + ": boundary does not alternate");
    }
  }
  for (const auto& f : phat.cleaved_faces()) {
    for (const auto& s : f.segments)
      if (s.cleaved_edge < 0) report(to_string(f.ref) + ": truncated edge on a cleaved face");
    if (static_cast<int>(f.segments.size()) != poly.degree(f.ref.index))
      report(to_string(f.ref) + ": corner count differs from vertex degree");
    for (int b : phat.corner_edges(f.ref.index)) {
      const auto& e = poly.edges()[b];
      if (e.v0 != f.ref.index && e.v1 != f.ref.index) report(to_string(f.ref) + ": corner off an incident edge");
    }
  }

  std::vector<int> cleaved_on_cleaved(phat.cleaved_edges().size(), 0);
  std::vector<int> cleaved_on_truncated(phat.cleaved_edges().size(), 0);
  for (const FaceRef& ref : phat.all_faces()) {
    const auto& f = phat.face(ref);
    const std::size_t n = f.segments.size();
    if (f.corners.size() != n) report(to_string(ref) + ": corner/segment count mismatch");
    for (std::size_t k = 0; k < n; ++k) {
      const auto [a, b] = segment_ends(f.segments[k]);
      if (a != f.corners[k] || b != f.corners[(k + 1) % n]) report(to_string(ref) + ": segment does not join its corners");
      ++directed[{a, b}];
      if (f.segments[k].cleaved_edge >= 0) {
        const bool cleaved_side = ref.kind == FaceKind::Cleaved;
        if (cleaved_side != f.segments[k].reversed) report(to_string(ref) + ": cleaved edge with wrong orientation");
        ++(cleaved_side ? cleaved_on_cleaved : cleaved_on_truncated)[f.segments[k].cleaved_edge];
      }
    }
    // Positive geometric orientation about the outward normal.
    const auto pts = phat.polygon(ref);
    Vec3 area;
    for (std::size_t k = 0; k < pts.size(); ++k) area += cross(pts[k], pts[(k + 1) % pts.size()]);
    if (dot(area, f.normal) <= 0) report(to_string(ref) + ": boundary not positively oriented");
  }
  for (const auto& [key, count] : directed) {
    const auto opp = directed.find({key.second, key.first});
    if (count != 1 || opp == directed.end() || opp->second != 1)
      report("edge " + std::to_string(key.first) + "->" + std::to_string(key.second) + " not cancelled by its opposite");
  }
  for (std::size_t i = 0; i < cleaved_on_cleaved.size(); ++i)
    if (cleaved_on_cleaved[i] != 1 || cleaved_on_truncated[i] != 1)
      report("cleaved edge " + std::to_string(i) + " not shared by exactly one cleaved and one truncated face");
  if (phat.euler_characteristic() != 2) report("Euler characteristic differs from 2");
  return problems;
}

PolarChart::PolarChart(std::vector<Vec3> boundary, Vec3 normal, std::optional<Vec3> base)
    : boundary_(std::move(boundary)), normal_(normalized(normal)) {
  base_ = base ? *base : average(boundary_);
  e1_ = normalized(boundary_[0] - base_);
  e1_ = normalized(e1_ - normal_ * dot(normal_, e1_));
  e2_ = cross(normal_, e1_);
  double scale = 0.0;
  for (const auto& p : boundary_) scale = std::max(scale, distance(p, base_));
  const std::size_t n = boundary_.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Vec3 edge = boundary_[(k + 1) % n] - boundary_[k];
    const double side = dot(cross(edge, base_ - boundary_[k]), normal_);
    if (side <= 1e-12 * scale * norm(edge)) fail(ErrorCode::BasePointOutside, "chart base point is not strictly inside the face");
  }
}

double PolarChart::phi_of(int sector, double u) const { return kTwoPi * (sector + u) / segments(); }

Vec3 PolarChart::boundary_point(double phi) const {
  const int m = segments();
  double s = phi / kTwoPi * m;
  s -= std::floor(s / m) * m;
  int k = static_cast<int>(std::floor(s));
  if (k >= m) k = m - 1;
  const double u = s - k;
  return boundary_[k] + (boundary_[(k + 1) % m] - boundary_[k]) * u;
}

Vec3 PolarChart::point(double rho, double phi) const { return boundary_point(phi) * rho + base_ * (1.0 - rho); }

PolarChart::Location PolarChart::locate(const Vec3& x) const {
  const int m = segments();
  const double px = dot(x - base_, e1_), py = dot(x - base_, e2_);
  Location best;
  double best_score = -std::numeric_limits<double>::infinity();
  double best_l1 = 0, best_l2 = 0;
  for (int k = 0; k < m; ++k) {
    const Vec3 a = boundary_[k] - base_;
    const Vec3 b = boundary_[(k + 1) % m] - base_;
    const double ax = dot(a, e1_), ay = dot(a, e2_), bx = dot(b, e1_), by = dot(b, e2_);
    const double det = ax * by - ay * bx;
    const double l1 = (px * by - py * bx) / det;
    const double l2 = (ax * py - ay * px) / det;
    const double score = std::min({l1, l2, 1.0 - l1 - l2});
    if (score > best_score) {
      best_score = score;
      best.sector = k;
      best_l1 = l1;
      best_l2 = l2;
    }
  }
  best_l1 = std::max(best_l1, 0.0);
  best_l2 = std::max(best_l2, 0.0);
  double rho = best_l1 + best_l2;
  if (rho > 1.0) {
    best_l1 /= rho;
    best_l2 /= rho;
    rho = 1.0;
  }
  best.u = rho > 0.0 ? best_l2 / rho : 0.0;
  best.chart = {rho, phi_of(best.sector, best.u)};
  return best;
}

FaceMesh PolarChart::mesh(int depth) const {
  const int m = segments();
  const int n = 1 << depth;
  FaceMesh out;
  out.nodes.push_back(base_);
  out.chart.push_back({0.0, 0.0});
  // ring r (1..n) holds m*r nodes; node j sits on sector j / r at offset j % r.
  std::vector<int> ring_start(n + 1, 0);
  for (int r = 1; r <= n; ++r) {
    ring_start[r] = static_cast<int>(out.nodes.size());
    const double rho = static_cast<double>(r) / n;
    for (int j = 0; j < m * r; ++j) {
      const int k = j / r;
      const double u = static_cast<double>(j % r) / r;
      const double phi = phi_of(k, u);
      const Vec3 z = boundary_[k] + (boundary_[(k + 1) % m] - boundary_[k]) * u;
      out.nodes.push_back(r == n ? z : z * rho + base_ * (1.0 - rho));
      out.chart.push_back({rho, phi});
    }
  }
  const auto node = [&](int r, int k, int i) {
    if (r == 0) return 0;
    const int j = (k * r + i) % (m * r);
    return ring_start[r] + j;
  };
  for (int r = 1; r <= n; ++r) {
    for (int k = 0; k < m; ++k) {
      for (int i = 0; i < r; ++i) out.triangles.push_back({node(r - 1, k, i), node(r, k, i), node(r, k, i + 1)});
      for (int i = 0; i + 1 < r; ++i) out.triangles.push_back({node(r - 1, k, i), node(r, k, i + 1), node(r - 1, k, i + 1)});
    }
  }
  for (int j = 0; j < m * n; ++j) out.boundary.push_back(ring_start[n] + j);
  return out;
}

PolarChart polar_chart(const TruncatedPolyhedron& phat, const FaceRef& face, std::optional<Vec3> base) {
  return PolarChart(phat.polygon(face), phat.face(face).normal, base);
}

}  // namespace ttopo
