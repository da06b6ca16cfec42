#include "tangent_topo/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "tangent_topo/errors.hpp"
#include "tangent_topo/kernels.hpp"

namespace ttopo {

namespace {

int face_slot(const TruncatedPolyhedron& host, const FaceRef& f) {
  return f.kind == FaceKind::Cleaved ? f.index : static_cast<int>(host.cleaved_faces().size()) + f.index;
}

std::vector<int> boundary_loop(const std::vector<std::array<int, 3>>& triangles) {
  std::map<std::pair<int, int>, int> directed;
  for (const auto& t : triangles)
    for (int k = 0; k < 3; ++k) ++directed[{t[k], t[(k + 1) % 3]}];
  std::map<int, int> next;
  for (const auto& [e, count] : directed)
    if (!directed.contains({e.second, e.first})) {
      if (next.contains(e.first)) fail(ErrorCode::InvalidField, "face mesh boundary is not a simple loop");
      next[e.first] = e.second;
    }
  if (next.empty()) fail(ErrorCode::InvalidField, "face mesh has no boundary");
  std::vector<int> loop{next.begin()->first};
  while (true) {
    const auto it = next.find(loop.back());
    if (it == next.end()) fail(ErrorCode::InvalidField, "face mesh boundary is open");
    if (it->second == loop.front()) break;
    loop.push_back(it->second);
    if (loop.size() > next.size()) fail(ErrorCode::InvalidField, "face mesh boundary is not a single loop");
  }
  if (loop.size() != next.size()) fail(ErrorCode::InvalidField, "face mesh boundary has several loops");
  return loop;
}

double segment_distance(const Vec3& x, const Vec3& a, const Vec3& b) {
  const Vec3 d = b - a;
  const double t = std::clamp(dot(x - a, d) / dot(d, d), 0.0, 1.0);
  return distance(x, a + d * t);
}

}  // namespace

UnitVector spherical_barycentric(const Vec3& n0, const Vec3& n1, const Vec3& n2, double b1, double b2) {
  const double b0 = 1.0 - b1 - b2;
  const UnitVector u0 = UnitVector::from_normalized(n0);
  const UnitVector u1 = UnitVector::from_normalized(n1);
  const UnitVector u2 = UnitVector::from_normalized(n2);
  const UnitVector p = (b0 + b1) > 0.0 ? geodesic_point(u0, u1, b1 / (b0 + b1)) : u1;
  return geodesic_point(p, u2, b2);
}

TangentField TangentField::analytic(std::shared_ptr<const TruncatedPolyhedron> host, Evaluator eval) {
  TangentField f;
  f.host_ = std::move(host);
  f.eval_ = std::move(eval);
  return f;
}

TangentField TangentField::sampled(std::shared_ptr<const TruncatedPolyhedron> host, std::vector<FaceSample> faces) {
  TangentField f;
  const auto refs = host->all_faces();
  if (faces.size() != refs.size()) fail(ErrorCode::InvalidField, "sampled field needs exactly one mesh per face");
  f.samples_.resize(refs.size());
  std::vector<bool> seen(refs.size(), false);
  for (auto& s : faces) {
    if (s.face.index < 0 ||
        s.face.index >= (s.face.kind == FaceKind::Cleaved ? static_cast<int>(host->cleaved_faces().size())
                                                          : static_cast<int>(host->truncated_faces().size())))
      fail(ErrorCode::InvalidField, "face index out of range");
    const int slot = face_slot(*host, s.face);
    if (seen[slot]) fail(ErrorCode::InvalidField, "duplicate face " + to_string(s.face));
    seen[slot] = true;
    if (s.values.size() != s.mesh.nodes.size()) fail(ErrorCode::InvalidField, "value count differs from node count");
    for (const auto& t : s.mesh.triangles)
      for (int i : t)
        if (i < 0 || i >= static_cast<int>(s.mesh.nodes.size())) fail(ErrorCode::InvalidField, "triangle index out of range");
    for (auto& v : s.values) v = UnitVector(v).vec();
    if (s.mesh.boundary.empty()) s.mesh.boundary = boundary_loop(s.mesh.triangles);
    f.samples_[slot] = std::move(s);
  }
  f.host_ = std::move(host);
  return f;
}

UnitVector TangentField::evaluate(const FaceRef& face, const Vec3& x) const {
  if (eval_) return eval_(face, x);
  const FaceSample& s = samples_[face_slot(*host_, face)];
  const Vec3 normal = host_->face(face).normal;
  const Vec3 e1 = any_orthogonal(normal);
  const Vec3 e2 = cross(normal, e1);
  int best = -1;
  double best_score = -std::numeric_limits<double>::infinity(), bb1 = 0, bb2 = 0;
  for (std::size_t i = 0; i < s.mesh.triangles.size(); ++i) {
    const auto& t = s.mesh.triangles[i];
    const Vec3 a = s.mesh.nodes[t[1]] - s.mesh.nodes[t[0]];
    const Vec3 b = s.mesh.nodes[t[2]] - s.mesh.nodes[t[0]];
    const Vec3 p = x - s.mesh.nodes[t[0]];
    const double ax = dot(a, e1), ay = dot(a, e2), bx = dot(b, e1), by = dot(b, e2);
    const double px = dot(p, e1), py = dot(p, e2);
    const double det = ax * by - ay * bx;
    if (det == 0.0) continue;
    const double b1 = (px * by - py * bx) / det;
    const double b2 = (ax * py - ay * px) / det;
    const double score = std::min({1.0 - b1 - b2, b1, b2});
    if (score > best_score) {
      best_score = score;
      best = static_cast<int>(i);
      bb1 = b1;
      bb2 = b2;
    }
  }
  if (best < 0) fail(ErrorCode::InvalidField, "empty face mesh on " + to_string(face));
  bb1 = std::clamp(bb1, 0.0, 1.0);
  bb2 = std::clamp(bb2, 0.0, 1.0 - bb1);
  return evaluate_in(s, best, bb1, bb2);
}

FaceSample TangentField::sample(const FaceRef& face, int depth) const {
  if (!eval_) return samples_[face_slot(*host_, face)];
  FaceSample s;
  s.face = face;
  s.depth = depth;
  s.mesh = polar_chart(*host_, face).mesh(depth);
  const auto& nodes = s.mesh.nodes;
  s.values = kernels::parallel_generate<Vec3>(nodes.size(), [&](std::size_t i) { return eval_(face, nodes[i]).vec(); });
  return s;
}

UnitVector TangentField::evaluate_in(const FaceSample& s, int tri, double b1, double b2) const {
  const auto& t = s.mesh.triangles[tri];
  if (eval_) {
    const Vec3 x = s.mesh.nodes[t[0]] * (1.0 - b1 - b2) + s.mesh.nodes[t[1]] * b1 + s.mesh.nodes[t[2]] * b2;
    return eval_(s.face, x);
  }
  return spherical_barycentric(s.values[t[0]], s.values[t[1]], s.values[t[2]], b1, b2);
}

TangentField TangentField::mapped(std::function<Vec3(const FaceRef&, const Vec3&, const Vec3&)> g) const {
  if (eval_) {
    Evaluator inner = eval_;
    return analytic(host_, [inner, g](const FaceRef& f, const Vec3& x) { return UnitVector(g(f, x, inner(f, x).vec())); });
  }
  std::vector<FaceSample> faces = samples_;
  for (auto& s : faces)
    for (std::size_t i = 0; i < s.values.size(); ++i) s.values[i] = g(s.face, s.mesh.nodes[i], s.values[i]);
  return sampled(host_, std::move(faces));
}

TangencyDiagnostics validate_tangency(const TangentField& field, const QuadratureConfig& cfg) {
  const TruncatedPolyhedron& host = field.host();
  TangencyDiagnostics d;
  for (const auto& tf : host.truncated_faces()) {
    const FaceSample s = field.sample(tf.ref, cfg.depth);
    double worst = 0.0;
    for (const auto& v : s.values) worst = std::max(worst, std::fabs(dot(v, tf.normal)));
    d.face_violation.push_back(worst);
    d.max_face_violation = std::max(d.max_face_violation, worst);
  }
  constexpr int kEdgeSamples = 9;
  for (const auto& te : host.truncated_edges()) {
    const auto& pe = host.parent().edges()[te.edge];
    const Vec3 a = host.vertices()[te.start], b = host.vertices()[te.end];
    for (int i = 0; i < kEdgeSamples; ++i) {
      const Vec3 x = a + (b - a) * (static_cast<double>(i) / (kEdgeSamples - 1));
      const UnitVector n1 = field.evaluate({FaceKind::Truncated, pe.left_face}, x);
      const UnitVector n2 = field.evaluate({FaceKind::Truncated, pe.right_face}, x);
      d.max_edge_misalignment = std::max({d.max_edge_misalignment, norm(cross(n1, te.direction)),
                                          norm(cross(n2, te.direction))});
      d.max_continuity_gap = std::max(d.max_continuity_gap, distance(n1, n2));
    }
  }
  for (const auto& ce : host.cleaved_edges()) {
    const Vec3 a = host.vertices()[ce.start], b = host.vertices()[ce.end];
    for (int i = 0; i < kEdgeSamples; ++i) {
      const Vec3 x = a + (b - a) * (static_cast<double>(i) / (kEdgeSamples - 1));
      const UnitVector n1 = field.evaluate({FaceKind::Truncated, ce.face}, x);
      const UnitVector n2 = field.evaluate({FaceKind::Cleaved, ce.vertex}, x);
      d.max_continuity_gap = std::max(d.max_continuity_gap, distance(n1, n2));
    }
  }
  d.tangent = d.max_face_violation <= cfg.tol_tangency && d.max_edge_misalignment <= cfg.tol_tangency;
  d.continuous = d.max_continuity_gap <= cfg.tol_continuity;
  return d;
}

TangentField antipodal(const TangentField& field) {
  return field.mapped([](const FaceRef&, const Vec3&, const Vec3& n) { return -n; });
}

SphericalPath boundary_trace(const TangentField& field, const FaceRef& face, const Vec3& from, const Vec3& to,
                             int samples, const QuadratureConfig& cfg) {
  if (samples < 2) samples = 2;
  const auto f = [&](double t) { return field.evaluate(face, from + (to - from) * t); };
  if (field.is_analytic()) return sample_path(f, samples, cfg.max_trace_samples);
  // Dense enough to pass every stored boundary node several times over.
  samples = std::max(samples, 257);
  SphericalPath path;
  for (int i = 0; i < samples; ++i) {
    const double t = static_cast<double>(i) / (samples - 1);
    path.t.push_back(t);
    path.points.push_back(f(t));
  }
  if (path.max_step() >= kNyquistStep) fail(ErrorCode::CoarseSampling, "sampled field is too coarse along " + to_string(face));
  return path;
}

SphericalPath trace_cleaved_edge(const TangentField& field, int cleaved_edge, int samples, const QuadratureConfig& cfg) {
  const auto& host = field.host();
  const CleavedEdge& ce = host.cleaved_edges().at(cleaved_edge);
  return boundary_trace(field, {FaceKind::Truncated, ce.face}, host.vertices()[ce.start], host.vertices()[ce.end],
                        samples, cfg);
}

SphericalPath trace_face_boundary(const TangentField& field, const FaceRef& face, int samples_per_segment,
                                  const QuadratureConfig& cfg) {
  const auto pts = field.host().polygon(face);
  const int m = static_cast<int>(pts.size());
  SphericalPath out;
  for (int k = 0; k < m; ++k) {
    const SphericalPath seg = boundary_trace(field, face, pts[k], pts[(k + 1) % m], samples_per_segment, cfg);
    for (std::size_t i = (k == 0 ? 0 : 1); i < seg.size(); ++i) {
      out.t.push_back((k + seg.t[i]) / m);
      out.points.push_back(seg.points[i]);
    }
  }
  return out;
}

double face_energy(const FaceSample& s) {
  return kernels::parallel::dirichlet_energy(s.mesh.triangles, s.mesh.nodes, s.values);
}

double frank_energy_surface(const TangentField& field, const QuadratureConfig& cfg) {
  double total = 0.0;
  for (const FaceRef& f : field.host().all_faces()) total += face_energy(field.sample(f, cfg.depth));
  return total;
}

TangentPerturbation random_perturbation(std::mt19937_64& rng, double max_amplitude) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> sym(-4.0, 4.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  TangentPerturbation p;
  p.amplitude = max_amplitude * (0.2 + 0.8 * unit(rng));
  p.wave = {sym(rng), sym(rng), sym(rng)};
  p.phase = kTwoPi * unit(rng);
  p.falloff = 0.05 + 0.15 * unit(rng);
  p.interior_axis = normalized(Vec3{gauss(rng), gauss(rng), gauss(rng)});
  p.interior_amplitude = max_amplitude * unit(rng);
  p.interior_wave = {sym(rng), sym(rng), sym(rng)};
  return p;
}

TangentField perturbed(const TangentField& field, const TangentPerturbation& p, double t) {
  const auto host = field.host_ptr();
  auto charts = std::make_shared<std::vector<PolarChart>>();
  for (const auto& cf : host->cleaved_faces()) charts->push_back(polar_chart(*host, cf.ref));
  const double taper = p.falloff * host->parent().diameter();

  // Rotation angle on truncated face c; zero on its truncated edges.
  const auto face_angle = [host, p, taper, t](int c, const Vec3& x) {
    double dmin = std::numeric_limits<double>::infinity();
    for (const auto& seg : host->truncated_faces()[c].segments) {
      if (seg.truncated_edge < 0) continue;
      const auto& te = host->truncated_edges()[seg.truncated_edge];
      dmin = std::min(dmin, segment_distance(x, host->vertices()[te.start], host->vertices()[te.end]));
    }
    const double weight = std::min(1.0, dmin / taper);
    return t * p.amplitude * weight * std::sin(dot(p.wave, x) + p.phase);
  };

  return field.mapped([host, charts, p, t, face_angle](const FaceRef& f, const Vec3& x, const Vec3& n) {
    if (f.kind == FaceKind::Truncated) return rotate(host->truncated_faces()[f.index].normal, face_angle(f.index, x), n);
    const PolarChart& chart = (*charts)[f.index];
    const auto loc = chart.locate(x);
    const auto& seg = host->cleaved_faces()[f.index].segments[loc.sector];
    const int c = host->cleaved_edges()[seg.cleaved_edge].face;
    const Vec3 z = chart.boundary_point(loc.chart.phi);
    const double rho = loc.chart.rho;
    const Vec3 rim = rotate(host->truncated_faces()[c].normal, rho * face_angle(c, z), n);
    const double inner = t * p.interior_amplitude * (1.0 - rho) * std::sin(dot(p.interior_wave, x));
    return rotate(p.interior_axis, inner, rim);
  });
}

}  // namespace ttopo
