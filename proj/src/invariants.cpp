#include "tangent_topo/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "tangent_topo/errors.hpp"
#include "tangent_topo/kernels.hpp"

namespace ttopo {

namespace {

// Sign of the kink correction in the closed-form trapped area.
constexpr double kKinkTermSign = 1.0;

// Preimage search parameters.
constexpr double kExclusionMargin = 0.5;   // rad beyond the image triangle's edge length
constexpr double kResolvedEdge = kPi / 4;  // image edges shorter than this
constexpr double kResolvedMidpoint = 0.02; // midpoint interpolation error
constexpr int kMaxExtraLevels = 10;
constexpr double kCandidateSlack = 0.05;
constexpr int kPolishIterations = 20;
constexpr double kMergeDistance = 1e-7;

// Perturbation used when s is a critical value.
constexpr double kPerturbAngle = 1e-2;
constexpr int kPerturbAttempts = 4;

bool inside_polygon(const std::vector<Vec3>& poly, const Vec3& normal, const Vec3& x, double tol) {
  const std::size_t m = poly.size();
  for (std::size_t k = 0; k < m; ++k)
    if (dot(cross(poly[(k + 1) % m] - poly[k], x - poly[k]), normal) < -tol) return false;
  return true;
}

double polygon_diameter(const std::vector<Vec3>& poly) {
  double d = 0.0;
  for (const auto& p : poly)
    for (const auto& q : poly) d = std::max(d, distance(p, q));
  return d;
}

// Tangent frame at s with t1 x t2 = s.
std::pair<Vec3, Vec3> tangent_frame(const Vec3& s) {
  const Vec3 t1 = any_orthogonal(s);
  return {t1, cross(s, t1)};
}

struct Gnomonic {
  Vec3 s, t1, t2;
  explicit Gnomonic(const Vec3& s_) : s(s_) { std::tie(t1, t2) = tangent_frame(s); }
  // False when n is in the far hemisphere.
  bool operator()(const Vec3& n, double& u, double& v) const {
    const double c = dot(n, s);
    if (c <= 1e-3) return false;
    u = dot(n, t1) / c;
    v = dot(n, t2) / c;
    return true;
  }
};

UnitVector perturbed_s(const Vec3& s, int attempt) {
  const auto [t1, t2] = tangent_frame(s);
  const double th = 1.0 + 2.399963229728653 * attempt;
  return UnitVector(s + (t1 * std::cos(th) + t2 * std::sin(th)) * kPerturbAngle);
}

int sign_of(double x) { return (x > 0) - (x < 0); }

// Analytic fields must vary by less than pi/2 across a mesh edge. A sampled
// field is its own geodesic interpolant, so only antipodal edges are fatal.
bool resolved(const TangentField& field, const WrappingResult& r) {
  const double limit = field.is_analytic() ? kNyquistStep : kPi - 1e-6;
  return r.residual < kDegreeResidualLimit && r.max_edge_angle < limit;
}

}  // namespace

bool same_invariants(const InvariantSet& a, const InvariantSet& b, double tol) {
  if (a.kink_numbers != b.kink_numbers || a.wrapping_numbers != b.wrapping_numbers) return false;
  if (a.edge_orientations.size() != b.edge_orientations.size()) return false;
  for (std::size_t i = 0; i < a.edge_orientations.size(); ++i)
    if (distance(a.edge_orientations[i], b.edge_orientations[i]) > tol) return false;
  return true;
}

bool is_admissible_s(const TruncatedPolyhedron& phat, const Vec3& s, double margin) {
  for (const auto& f : phat.truncated_faces())
    if (std::fabs(dot(s, f.normal)) < margin) return false;
  return true;
}

UnitVector choose_reference_s(const TruncatedPolyhedron& phat, std::uint64_t seed) {
  // R2 sequence (plastic-number increments) mapped to the sphere by area.
  constexpr double g = 1.32471795724474602596;
  constexpr double a1 = 1.0 / g, a2 = 1.0 / (g * g);
  const double offset = static_cast<double>(seed % 1000003) * 7919.0;
  for (int i = 0; i < 4096; ++i) {
    const double n = offset + i;
    const double u = std::fmod(0.2113248654051871 + a1 * n, 1.0);
    const double v = std::fmod(0.6180339887498949 + a2 * n, 1.0);
    const double z = 2.0 * u - 1.0;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const Vec3 s{r * std::cos(kTwoPi * v), r * std::sin(kTwoPi * v), z};
    if (is_admissible_s(phat, s)) return UnitVector(s);
  }
  fail(ErrorCode::NoAdmissibleS, "no direction keeps the margin from every face plane");
}

std::vector<Vec3> extract_edge_orientations(const TangentField& field, const QuadratureConfig& cfg) {
  const auto& host = field.host();
  std::vector<Vec3> out;
  constexpr int kSamples = 5;
  for (const auto& te : host.truncated_edges()) {
    const auto& pe = host.parent().edges()[te.edge];
    const Vec3 a = host.vertices()[te.start], b = host.vertices()[te.end];
    const Vec3 mid = (a + b) * 0.5;
    const UnitVector ref = field.evaluate({FaceKind::Truncated, pe.left_face}, mid);
    for (int i = 0; i < kSamples; ++i) {
      const Vec3 x = a + (b - a) * (static_cast<double>(i) / (kSamples - 1));
      for (const int f : {pe.left_face, pe.right_face}) {
        const UnitVector n = field.evaluate({FaceKind::Truncated, f}, x);
        if (distance(n, ref) > cfg.tol_continuity)
          fail(ErrorCode::NonConstantEdge, "field varies along truncated edge " + std::to_string(te.edge));
      }
    }
    if (norm(cross(ref, te.direction)) > cfg.tol_continuity)
      fail(ErrorCode::NonConstantEdge, "field is not parallel to truncated edge " + std::to_string(te.edge));
    out.push_back(dot(ref.vec(), te.direction) > 0 ? te.direction : -te.direction);
  }
  return out;
}

KinkResult kink_from_path(const SphericalPath& path, const Vec3& axis) {
  KinkResult r;
  r.samples = static_cast<int>(path.size());
  r.xi = unwrap_rotation_angle(path, axis);
  r.eta = signed_angle_about(axis, path.points.front(), path.points.back());
  if (std::fabs(std::sin(r.eta)) < 1e-9)
    fail(ErrorCode::ParallelEndpoints, "endpoint values are parallel");
  const double k = (r.xi - r.eta) / kTwoPi;
  r.kink = static_cast<int>(std::lround(k));
  r.residual = std::fabs(k - r.kink);
  if (r.residual >= kKinkResidualTol)
    fail(ErrorCode::ResidualTooLarge, "kink residual " + std::to_string(r.residual));
  return r;
}

KinkResult extract_kink(const TangentField& field, int cleaved_edge, const QuadratureConfig& cfg) {
  const auto& host = field.host();
  const CleavedEdge& ce = host.cleaved_edges().at(cleaved_edge);
  const SphericalPath path = trace_cleaved_edge(field, cleaved_edge, 32, cfg);
  const Vec3& axis = host.truncated_faces()[ce.face].normal;
  for (const auto& p : path.points)
    if (std::fabs(dot(p.vec(), axis)) > cfg.tol_tangency)
      fail(ErrorCode::NotInPlane, "field leaves the plane of face " + std::to_string(ce.face));
  KinkResult r = kink_from_path(path, axis);
  r.start_vertex = ce.start;
  return r;
}

WrappingResult wrapping_integral(const FaceSample& sample, const Vec3& s) {
  const Vec3 pole = -s;
  WrappingResult r;
  r.depth = sample.depth;
  const auto& tris = sample.mesh.triangles;
  const auto& vals = sample.values;
  r.area_term = kernels::parallel::signed_area_sum(tris, vals);
  r.max_edge_angle = kernels::parallel::max_edge_angle(tris, vals);
  const auto& loop = sample.mesh.boundary;
  const std::size_t m = loop.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Vec3& p = vals[loop[i]];
    const Vec3& q = vals[loop[(i + 1) % m]];
    if (angle_between(p, s) < kTolAntipodal || angle_between(p, pole) < kTolAntipodal)
      fail(ErrorCode::SOnBoundaryImage, "boundary image passes through s or -s");
    if (triangle_contains(pole, p, q, s, 0.0))
      fail(ErrorCode::SOnBoundaryImage, "s lies under a boundary step of the image");
    r.boundary_term += spherical_triangle_area_unchecked(pole, p, q);
  }
  const double w = (r.area_term - r.boundary_term) / kFourPi;
  r.wrapping = static_cast<int>(std::lround(w));
  r.residual = std::fabs(w - r.wrapping);
  r.warned = r.residual >= kWrapResidualWarn;
  return r;
}

WrappingResult extract_wrapping_integral(const TangentField& field, int vertex, const Vec3& s,
                                         const QuadratureConfig& cfg) {
  const FaceRef face{FaceKind::Cleaved, vertex};
  for (int depth = cfg.depth;; ++depth) {
    const FaceSample sample = field.sample(face, depth);
    const WrappingResult r = wrapping_integral(sample, s);
    if (resolved(field, r)) return r;
    if (!field.is_analytic() || depth >= cfg.max_depth)
      fail(ErrorCode::ResolutionTooCoarse, "wrapping integral on " + to_string(face) + " unresolved at depth " +
                                               std::to_string(depth) + " (residual " + std::to_string(r.residual) + ")");
  }
}

namespace {

struct PreimageSearch {
  const TangentField& field;
  const FaceSample& sample;
  Vec3 s;
  Gnomonic gn;
  std::vector<Vec3> polygon;
  Vec3 normal;
  double scale;

  struct Candidate {
    int tri;
    double b1, b2;
  };
  std::vector<Candidate> candidates;

  PreimageSearch(const TangentField& f, const FaceSample& smp, const Vec3& s_)
      : field(f), sample(smp), s(s_), gn(s_) {
    polygon = f.host().polygon(smp.face);
    normal = f.host().face(smp.face).normal;
    scale = polygon_diameter(polygon);
  }

  Vec3 position(int tri, double b1, double b2) const {
    const auto& t = sample.mesh.triangles[tri];
    const auto& n = sample.mesh.nodes;
    return n[t[0]] * (1.0 - b1 - b2) + n[t[1]] * b1 + n[t[2]] * b2;
  }

  Vec3 value(int tri, double b1, double b2) const { return field.evaluate_in(sample, tri, b1, b2).vec(); }

  struct Corner {
    double b1, b2;
    Vec3 v;
  };

  void scan(int tri, const Corner& c0, const Corner& c1, const Corner& c2, int level) {
    const Vec3* v[3] = {&c0.v, &c1.v, &c2.v};
    double max_edge = 0.0, min_dist = kPi;
    for (int i = 0; i < 3; ++i) {
      max_edge = std::max(max_edge, angle_between(*v[i], *v[(i + 1) % 3]));
      min_dist = std::min(min_dist, angle_between(*v[i], s));
    }
    if (min_dist > max_edge + kExclusionMargin) return;

    bool resolved = true;
    Corner mid[3];
    const Corner* c[3] = {&c0, &c1, &c2};
    if (field.is_analytic() && level < kMaxExtraLevels) {
      resolved = max_edge < kResolvedEdge;
      for (int i = 0; i < 3; ++i) {
        const Corner& a = *c[i];
        const Corner& b = *c[(i + 1) % 3];
        mid[i].b1 = 0.5 * (a.b1 + b.b1);
        mid[i].b2 = 0.5 * (a.b2 + b.b2);
        mid[i].v = value(tri, mid[i].b1, mid[i].b2);
        if (resolved) {
          const Vec3 g = geodesic_point(UnitVector::from_normalized(a.v), UnitVector::from_normalized(b.v), 0.5).vec();
          if (angle_between(g, mid[i].v) > kResolvedMidpoint) resolved = false;
        }
      }
    }
    if (!resolved) {
      scan(tri, c0, mid[0], mid[2], level + 1);
      scan(tri, mid[0], c1, mid[1], level + 1);
      scan(tri, mid[2], mid[1], c2, level + 1);
      scan(tri, mid[0], mid[1], mid[2], level + 1);
      return;
    }
    if (triangle_contains(c0.v, c1.v, c2.v, s, kCandidateSlack))
      candidates.push_back({tri, (c0.b1 + c1.b1 + c2.b1) / 3.0, (c0.b2 + c1.b2 + c2.b2) / 3.0});
  }

  bool admissible(double b1, double b2, int tri) const {
    if (!field.is_analytic()) return b1 >= 0 && b2 >= 0 && b1 + b2 <= 1;
    return b1 >= -1 && b2 >= -1 && b1 + b2 <= 2 &&
           inside_polygon(polygon, normal, position(tri, b1, b2), 1e-12 * scale);
  }

  // Newton iteration on gnomonic coordinates; returns true with the root in (b1, b2).
  bool polish(int tri, double& b1, double& b2) const {
    const auto residual = [&](double x1, double x2, double& u, double& w) {
      return gn(value(tri, x1, x2), u, w);
    };
    double u, w;
    if (!residual(b1, b2, u, w)) return false;
    double err = std::hypot(u, w);
    constexpr double h = 1e-7;
    for (int it = 0; it < kPolishIterations && err > 1e-13; ++it) {
      double up, wp, um, wm, J[2][2];
      for (int k = 0; k < 2; ++k) {
        const double d1 = k == 0 ? h : 0.0, d2 = k == 1 ? h : 0.0;
        if (!residual(b1 + d1, b2 + d2, up, wp) || !residual(b1 - d1, b2 - d2, um, wm)) return false;
        J[0][k] = (up - um) / (2 * h);
        J[1][k] = (wp - wm) / (2 * h);
      }
      const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
      if (std::fabs(det) < 1e-300) return false;
      const double s1 = -(J[1][1] * u - J[0][1] * w) / det;
      const double s2 = -(-J[1][0] * u + J[0][0] * w) / det;
      double lambda = 1.0;
      bool improved = false;
      for (int half = 0; half < 12; ++half, lambda *= 0.5) {
        double n1 = b1 + lambda * s1, n2 = b2 + lambda * s2;
        if (!field.is_analytic()) {
          n1 = std::clamp(n1, 0.0, 1.0);
          n2 = std::clamp(n2, 0.0, 1.0 - n1);
        }
        if (!admissible(n1, n2, tri)) continue;
        double nu, nw;
        if (!residual(n1, n2, nu, nw)) continue;
        const double nerr = std::hypot(nu, nw);
        if (nerr < err) {
          b1 = n1;
          b2 = n2;
          u = nu;
          w = nw;
          err = nerr;
          improved = true;
          break;
        }
      }
      if (!improved) break;
    }
    return err <= 1e-10 && admissible(b1, b2, tri);
  }

  // Gnomonic image of the face point x.
  bool image(const Vec3& x, double& u, double& w) const {
    return gn(field.evaluate(sample.face, x).vec(), u, w);
  }

  Preimage classify(const Vec3& x, double loop_radius) const {
    Preimage p;
    p.point = x;
    const Vec3 e1 = any_orthogonal(normal);
    const Vec3 e2 = cross(normal, e1);
    const double h = 1e-6 * scale;
    double J[2][2];
    for (int k = 0; k < 2; ++k) {
      const Vec3 d = (k == 0 ? e1 : e2) * h;
      double up, wp, um, wm;
      if (!image(x + d, up, wp) || !image(x - d, um, wm))
        fail(ErrorCode::NotRegularValue, "image leaves the chart near a preimage");
      J[0][k] = (up - um) / (2 * h / scale);
      J[1][k] = (wp - wm) / (2 * h / scale);
    }
    p.det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    if (std::fabs(p.det) < kTolRegular)
      fail(ErrorCode::NotRegularValue, "Jacobian determinant " + std::to_string(p.det) + " at a preimage");

    // Winding of the image of a small circle about the origin.
    for (int n = 64; n <= 4096; n *= 2) {
      double total = 0.0, prev = 0.0;
      bool ok = true;
      for (int i = 0; i <= n && ok; ++i) {
        const double t = kTwoPi * i / n;
        double u, w;
        if (!image(x + (e1 * std::cos(t) + e2 * std::sin(t)) * loop_radius, u, w)) {
          ok = false;
          break;
        }
        const double a = std::atan2(w, u);
        if (i > 0) {
          double d = a - prev;
          while (d > kPi) d -= kTwoPi;
          while (d <= -kPi) d += kTwoPi;
          if (std::fabs(d) >= kNyquistStep) ok = false;
          total += d;
        }
        prev = a;
      }
      if (!ok) continue;
      p.local_degree = static_cast<int>(std::lround(total / kTwoPi));
      if (p.local_degree != sign_of(p.det))
        fail(ErrorCode::NotRegularValue, "local degree " + std::to_string(p.local_degree) +
                                             " disagrees with the Jacobian sign at a preimage");
      return p;
    }
    fail(ErrorCode::NotRegularValue, "image of a small loop around a preimage is unresolved");
  }
};

}  // namespace

PreimageResult wrapping_preimage(const TangentField& field, const FaceSample& sample, const Vec3& s) {
  PreimageSearch search(field, sample, s);
  const auto& tris = sample.mesh.triangles;
  for (std::size_t i = 0; i < tris.size(); ++i) {
    const auto& t = tris[i];
    search.scan(static_cast<int>(i), {0, 0, sample.values[t[0]]}, {1, 0, sample.values[t[1]]},
                {0, 1, sample.values[t[2]]}, 0);
  }
  std::vector<Vec3> roots;
  for (const auto& c : search.candidates) {
    double b1 = c.b1, b2 = c.b2;
    if (!search.polish(c.tri, b1, b2)) continue;
    const Vec3 x = search.position(c.tri, b1, b2);
    const bool dup = std::any_of(roots.begin(), roots.end(),
                                 [&](const Vec3& r) { return distance(r, x) < kMergeDistance * search.scale; });
    if (!dup) roots.push_back(x);
  }
  PreimageResult result;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    double nearest = 1e-5 * search.scale;
    for (std::size_t j = 0; j < roots.size(); ++j)
      if (j != i) nearest = std::min(nearest, 0.3 * distance(roots[i], roots[j]));
    const Preimage p = search.classify(roots[i], nearest);
    result.wrapping += p.local_degree;
    result.preimages.push_back(p);
  }
  return result;
}

PreimageResult extract_wrapping_preimage(const TangentField& field, int vertex, const Vec3& s,
                                         const QuadratureConfig& cfg) {
  return wrapping_preimage(field, field.sample({FaceKind::Cleaved, vertex}, cfg.depth), s);
}

double trapped_area_direct(const TangentField& field, int vertex, const QuadratureConfig& cfg) {
  const FaceRef face{FaceKind::Cleaved, vertex};
  for (int depth = cfg.depth;; ++depth) {
    const FaceSample sample = field.sample(face, depth);
    if (kernels::parallel::max_edge_angle(sample.mesh.triangles, sample.values) < (field.is_analytic() ? kNyquistStep : kPi - 1e-6))
      return kernels::parallel::signed_area_sum(sample.mesh.triangles, sample.values);
    if (!field.is_analytic() || depth >= cfg.max_depth)
      fail(ErrorCode::ResolutionTooCoarse, "trapped area on " + to_string(face) + " unresolved");
  }
}

double trapped_area_from_invariants(const InvariantSet& inv, const TruncatedPolyhedron& phat, int vertex) {
  const Vec3 s = inv.s.vec();
  const PolygonFace& face = phat.cleaved_faces().at(vertex);
  double omega = kFourPi * inv.wrapping_numbers.at(vertex);
  for (const auto& seg : face.segments) {
    const int id = seg.cleaved_edge;
    const int c = phat.cleaved_edges()[id].face;
    omega += kKinkTermSign * kTwoPi * sign_of(dot(phat.truncated_faces()[c].normal, s)) * inv.kink_numbers.at(id);
  }
  std::vector<int> edges = phat.corner_edges(vertex);
  std::rotate(edges.begin(), std::min_element(edges.begin(), edges.end()), edges.end());
  const Vec3& e1 = inv.edge_orientations.at(edges[0]);
  const double lim = -1.0 + 1e-12;
  for (std::size_t j = 1; j + 1 < edges.size(); ++j) {
    const Vec3& ej = inv.edge_orientations.at(edges[j]);
    const Vec3& ek = inv.edge_orientations.at(edges[j + 1]);
    if (dot(e1, ej) <= lim || dot(ej, ek) <= lim || dot(ek, e1) <= lim)
      fail(ErrorCode::AntipodalFanPair, "antipodal edge orientations in the fan of cleaved face " + std::to_string(vertex));
    int sigma = 0;
    try {
      sigma = triangle_sigma(e1, ej, ek, s);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::OnBoundary) throw;
      fail(ErrorCode::SOnTriangleBoundary, "s lies on an edge-orientation triangle of cleaved face " + std::to_string(vertex));
    }
    omega += spherical_triangle_area_unchecked(e1, ej, ek) - kFourPi * sigma;
  }
  return omega;
}

int orientation_flips(const TruncatedPolyhedron& phat, int face, const std::vector<Vec3>& edge_orientations) {
  std::vector<int> signs;
  for (const auto& seg : phat.truncated_faces().at(face).segments) {
    if (seg.truncated_edge < 0) continue;
    const auto& te = phat.truncated_edges()[seg.truncated_edge];
    const Vec3 d = seg.reversed ? -te.direction : te.direction;
    const double x = dot(edge_orientations.at(seg.truncated_edge), d);
    if (std::fabs(x) < 0.5) fail(ErrorCode::InvalidField, "edge orientation is not parallel to its edge");
    signs.push_back(x > 0 ? 1 : -1);
  }
  int q = 0;
  for (std::size_t k = 0; k < signs.size(); ++k) q += signs[k] != signs[(k + 1) % signs.size()];
  return q;
}

bool SumRuleVerdicts::kinks_passed() const {
  return std::all_of(faces.begin(), faces.end(), [](const FaceKinkVerdict& f) { return f.passed; });
}

SumRuleVerdicts check_sum_rules(const InvariantSet& inv, const TruncatedPolyhedron& phat) {
  SumRuleVerdicts v;
  for (const auto& tf : phat.truncated_faces()) {
    FaceKinkVerdict f;
    f.face = tf.ref.index;
    f.flips = orientation_flips(phat, f.face, inv.edge_orientations);
    f.required = f.flips / 2 - 1;
    for (const auto& seg : tf.segments)
      if (seg.cleaved_edge >= 0) f.actual += inv.kink_numbers.at(seg.cleaved_edge);
    f.passed = f.actual == f.required;
    v.faces.push_back(f);
  }
  for (int w : inv.wrapping_numbers) v.wrapping_sum += w;
  v.wrapping_passed = v.wrapping_sum == 0;
  return v;
}

InvariantSet antipodal_image(const InvariantSet& inv) {
  InvariantSet out = inv;
  out.s = -inv.s;
  for (auto& e : out.edge_orientations) e = -e;
  for (auto& w : out.wrapping_numbers) w = -w;
  return out;
}

InvariantSet director_class(const InvariantSet& inv) {
  const InvariantSet other = antipodal_image(inv);
  const auto key = [](const InvariantSet& x) {
    std::vector<double> k;
    for (const auto& e : x.edge_orientations) k.insert(k.end(), {e.x, e.y, e.z});
    for (int w : x.wrapping_numbers) k.push_back(w);
    return k;
  };
  return key(other) < key(inv) ? other : inv;
}

std::string to_string(PreimageStatus s) {
  switch (s) {
    case PreimageStatus::Regular: return "regular";
    case PreimageStatus::RegularPerturbed: return "regular-perturbed";
    case PreimageStatus::NotRegular: return "not-regular";
  }
  return "unknown";
}

bool InvariantReport::all_passed() const { return verdicts.passed() && tangency.passed(); }

double InvariantReport::max_trapped_residual() const {
  double m = 0.0;
  for (const auto& w : wrappings) m = std::max(m, std::fabs(w.trapped_direct - w.trapped_closed));
  return m;
}

namespace {

// Wrapping diagnostics for one cleaved face with the integral route fixed.
WrappingDiagnostics wrap_face(const TangentField& field, int vertex, const Vec3& s, const QuadratureConfig& cfg) {
  const FaceRef face{FaceKind::Cleaved, vertex};
  WrappingDiagnostics d;
  d.vertex = vertex;
  FaceSample sample;
  for (int depth = cfg.depth;; ++depth) {
    sample = field.sample(face, depth);
    d.integral = wrapping_integral(sample, s);
    if (resolved(field, d.integral)) break;
    if (!field.is_analytic() || depth >= cfg.max_depth)
      fail(ErrorCode::ResolutionTooCoarse, "wrapping integral on " + to_string(face) + " unresolved at depth " +
                                               std::to_string(depth));
  }
  d.trapped_direct = d.integral.area_term;

  const auto attempt = [&](const Vec3& target, PreimageStatus status) {
    const PreimageResult pre = wrapping_preimage(field, sample, target);
    d.preimage_status = status;
    d.preimage_wrapping = pre.wrapping;
    d.preimage_count = static_cast<int>(pre.preimages.size());
    d.preimage_s = target;
    return pre.wrapping;
  };
  try {
    if (attempt(s, PreimageStatus::Regular) != d.integral.wrapping)
      fail(ErrorCode::DualRouteMismatch, "integral and preimage wrapping numbers differ on " + to_string(face));
    return d;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotRegularValue) throw;
  }
  for (int k = 0; k < kPerturbAttempts; ++k) {
    const UnitVector sp = perturbed_s(s, k);
    int reference = 0;
    try {
      reference = wrapping_integral(sample, sp).wrapping;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SOnBoundaryImage) throw;
      continue;
    }
    if (reference != d.integral.wrapping) continue;
    try {
      if (attempt(sp, PreimageStatus::RegularPerturbed) != reference)
        fail(ErrorCode::DualRouteMismatch, "integral and preimage wrapping numbers differ on " + to_string(face) +
                                               " for a perturbed reference direction");
      return d;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotRegularValue) throw;
    }
  }
  d.preimage_status = PreimageStatus::NotRegular;
  d.preimage_wrapping.reset();
  d.preimage_count = 0;
  return d;
}

}  // namespace

InvariantReport extract_all(const TangentField& field, const ExtractOptions& options) {
  const auto& host = field.host();
  if (options.s && !is_admissible_s(host, *options.s))
    fail(ErrorCode::NoAdmissibleS, "reference direction is within the margin of a face plane");
  InvariantReport report;
  report.seed = options.seed;
  report.depth = options.cfg.depth;

  QuadratureConfig vcfg = options.cfg;
  vcfg.depth = options.validation_depth;
  report.tangency = validate_tangency(field, vcfg);

  InvariantSet& inv = report.invariants;
  inv.edge_orientations = extract_edge_orientations(field, options.cfg);
  for (int id = 0; id < static_cast<int>(host.cleaved_edges().size()); ++id) {
    const auto& ce = host.cleaved_edges()[id];
    KinkDiagnostics k{ce.vertex, ce.face, extract_kink(field, id, options.cfg)};
    inv.kink_numbers.push_back(k.result.kink);
    report.kinks.push_back(k);
  }

  // s is re-chosen when it happens to sit on an edge-orientation triangle.
  for (std::uint64_t attempt = 0;; ++attempt) {
    inv.s = options.s ? *options.s : choose_reference_s(host, options.seed + attempt);
    inv.wrapping_numbers.clear();
    report.wrappings.clear();
    try {
      for (int a = 0; a < static_cast<int>(host.cleaved_faces().size()); ++a) {
        report.wrappings.push_back(wrap_face(field, a, inv.s, options.cfg));
        inv.wrapping_numbers.push_back(report.wrappings.back().integral.wrapping);
      }
      for (auto& w : report.wrappings) w.trapped_closed = trapped_area_from_invariants(inv, host, w.vertex);
      break;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SOnTriangleBoundary || options.s || attempt >= 16) throw;
    }
  }
  report.verdicts = check_sum_rules(inv, host);
  return report;
}

}  // namespace ttopo
