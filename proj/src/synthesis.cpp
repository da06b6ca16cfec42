#include "tangent_topo/synthesis.hpp"

#include <algorithm>
#include <cmath>

#include "tangent_topo/errors.hpp"

namespace ttopo {

namespace {

// Orientation of the covering-patch frame: xi x eta = kFrameSign * s. With
// +1 the patch has degree +omega for outward face and sphere orientations.
constexpr double kFrameSign = 1.0;

struct EdgeRotation {
  Vec3 axis;
  Vec3 start;    // edge orientation at t = 0
  double total;  // eta + 2 pi kappa
};

}  // namespace

AdmissibleInvariants make_admissible(InvariantSet inv, const TruncatedPolyhedron& phat) {
  if (inv.edge_orientations.size() != phat.truncated_edges().size() ||
      inv.kink_numbers.size() != phat.cleaved_edges().size() ||
      inv.wrapping_numbers.size() != phat.cleaved_faces().size())
    fail(ErrorCode::InvalidField, "invariant set does not match the polyhedron");
  for (std::size_t b = 0; b < inv.edge_orientations.size(); ++b) {
    const Vec3& d = phat.truncated_edges()[b].direction;
    const double c = dot(inv.edge_orientations[b], d);
    if (std::fabs(std::fabs(c) - 1.0) > 1e-9)
      fail(ErrorCode::InvalidField, "edge orientation " + std::to_string(b) + " is not parallel to its edge");
    inv.edge_orientations[b] = c > 0 ? d : -d;
  }
  for (const auto& f : phat.truncated_faces()) {
    const double c = std::fabs(dot(inv.s.vec(), f.normal));
    if (c < kTolAntipodal)
      fail(ErrorCode::GeodesicAntipodal, "s lies in the plane of face " + std::to_string(f.ref.index));
    if (c < kMarginS) fail(ErrorCode::NoAdmissibleS, "s is too close to the plane of face " + std::to_string(f.ref.index));
  }
  const SumRuleVerdicts v = check_sum_rules(inv, phat);
  if (!v.wrapping_passed)
    fail(ErrorCode::SumRuleViolation, "wrapping numbers sum to " + std::to_string(v.wrapping_sum));
  for (const auto& f : v.faces)
    if (!f.passed)
      fail(ErrorCode::SumRuleViolation, "kinks on face " + std::to_string(f.face) + " sum to " +
                                            std::to_string(f.actual) + ", expected " + std::to_string(f.required));
  AdmissibleInvariants a;
  a.xi = any_orthogonal(inv.s.vec());
  a.eta = cross(inv.s.vec(), a.xi) * kFrameSign;
  a.inv = std::move(inv);
  return a;
}

UnitVector covering_patch(double rho, double phi, int omega, const Vec3& xi, const Vec3& eta, const Vec3& s) {
  const double sr = std::sin(kTwoPi * rho), cr = std::cos(kTwoPi * rho);
  const double a = omega * phi;
  return UnitVector(xi * (sr * std::cos(a)) + eta * (sr * std::sin(a)) + s * cr);
}

LoopContraction::LoopContraction(Vec3 axis, Vec3 ref, std::vector<double> t, std::vector<double> theta)
    : axis_(axis), ref_(ref), t_(std::move(t)), theta_(std::move(theta)) {}

double LoopContraction::theta(double phi) const {
  const double t = std::clamp(phi / kTwoPi, 0.0, 1.0);
  const auto it = std::upper_bound(t_.begin(), t_.end(), t);
  if (it == t_.begin()) return theta_.front();
  if (it == t_.end()) return theta_.back();
  const std::size_t i = static_cast<std::size_t>(it - t_.begin());
  const double w = (t - t_[i - 1]) / (t_[i] - t_[i - 1]);
  return theta_[i - 1] + (theta_[i] - theta_[i - 1]) * w;
}

UnitVector LoopContraction::at(double rho, double phi) const {
  return UnitVector::from_normalized(rotate(axis_, rho * theta(phi), ref_));
}

LoopContraction face_loop_contraction(const SphericalPath& loop, const Vec3& axis) {
  if (loop.size() < 2) fail(ErrorCode::InvalidField, "loop needs at least two samples");
  if (distance(loop.points.front(), loop.points.back()) > 1e-9) fail(ErrorCode::InvalidField, "loop is not closed");
  const double total = unwrap_rotation_angle(loop, axis);
  if (std::fabs(total) > 1e-6)
    fail(ErrorCode::NonzeroWinding, "loop winds " + std::to_string(total / kTwoPi) + " times around the axis");
  std::vector<double> theta{0.0};
  for (std::size_t i = 0; i + 1 < loop.size(); ++i)
    theta.push_back(theta.back() + signed_angle_about(axis, loop.points[i], loop.points[i + 1]));
  theta.back() = 0.0;
  return LoopContraction(axis, loop.points.front().vec(), loop.t, std::move(theta));
}

TangentField representative_boundary(const AdmissibleInvariants& adm, std::shared_ptr<const TruncatedPolyhedron> phat) {
  const InvariantSet& inv = adm.inv;
  const Vec3 s = inv.s.vec();

  std::vector<EdgeRotation> edges;
  for (std::size_t id = 0; id < phat->cleaved_edges().size(); ++id) {
    const CleavedEdge& ce = phat->cleaved_edges()[id];
    const Vec3& axis = phat->truncated_faces()[ce.face].normal;
    const Vec3& e0 = inv.edge_orientations[ce.start_edge];
    const Vec3& e1 = inv.edge_orientations[ce.end_edge];
    const double eta = signed_angle_about(axis, e0, e1);
    edges.push_back({axis, e0, eta + kTwoPi * inv.kink_numbers[id]});
  }
  const auto edge_value = [edges](int id, double t) {
    const EdgeRotation& r = edges[id];
    return UnitVector::from_normalized(rotate(r.axis, r.total * t, r.start));
  };

  std::vector<PolarChart> truncated_charts, cleaved_charts;
  std::vector<LoopContraction> contractions;
  for (const auto& tf : phat->truncated_faces()) {
    truncated_charts.push_back(polar_chart(*phat, tf.ref));
    const int m = static_cast<int>(tf.segments.size());
    SphericalPath loop;
    for (int k = 0; k < m; ++k) {
      const auto& seg = tf.segments[k];
      if (seg.truncated_edge >= 0) {
        loop.t.push_back(static_cast<double>(k) / m);
        loop.points.push_back(UnitVector::from_normalized(inv.edge_orientations[seg.truncated_edge]));
        continue;
      }
      const int n = std::max(1, static_cast<int>(std::ceil(std::fabs(edges[seg.cleaved_edge].total) / (kPi / 4))));
      for (int j = 0; j < n; ++j) {
        loop.t.push_back((k + static_cast<double>(j) / n) / m);
        loop.points.push_back(edge_value(seg.cleaved_edge, static_cast<double>(j) / n));
      }
    }
    loop.t.push_back(1.0);
    loop.points.push_back(loop.points.front());
    contractions.push_back(face_loop_contraction(loop, tf.normal));
  }
  for (const auto& cf : phat->cleaved_faces()) cleaved_charts.push_back(polar_chart(*phat, cf.ref));

  auto eval = [phat, adm, s, edge_value, truncated_charts, cleaved_charts, contractions](const FaceRef& f,
                                                                                         const Vec3& x) -> UnitVector {
    if (f.kind == FaceKind::Truncated) {
      const auto loc = truncated_charts[f.index].locate(x);
      return contractions[f.index].at(loc.chart.rho, loc.chart.phi);
    }
    const auto loc = cleaved_charts[f.index].locate(x);
    const double rho = loc.chart.rho;
    if (rho < 0.5)
      return covering_patch(rho, loc.chart.phi, adm.inv.wrapping_numbers[f.index], adm.xi, adm.eta, s);
    const auto& seg = phat->cleaved_faces()[f.index].segments[loc.sector];
    const UnitVector rim = edge_value(seg.cleaved_edge, 1.0 - loc.u);
    if (angle_between(rim, s) < kTolAntipodal) fail(ErrorCode::GeodesicAntipodal, "boundary value equals s");
    return geodesic_point(-adm.inv.s, rim, 2.0 * rho - 1.0);
  };
  return TangentField::analytic(std::move(phat), std::move(eval));
}

InvariantSet random_admissible(const TruncatedPolyhedron& phat, std::mt19937_64& rng, const UnitVector& s,
                               int max_kink, int max_wrap) {
  InvariantSet inv;
  inv.s = s;
  std::bernoulli_distribution coin(0.5);
  for (const auto& te : phat.truncated_edges()) inv.edge_orientations.push_back(coin(rng) ? te.direction : -te.direction);

  inv.kink_numbers.assign(phat.cleaved_edges().size(), 0);
  std::uniform_int_distribution<int> kink(-max_kink, max_kink);
  for (const auto& tf : phat.truncated_faces()) {
    const int required = orientation_flips(phat, tf.ref.index, inv.edge_orientations) / 2 - 1;
    std::vector<int> ids;
    for (const auto& seg : tf.segments)
      if (seg.cleaved_edge >= 0) ids.push_back(seg.cleaved_edge);
    for (int attempt = 0;; ++attempt) {
      int sum = 0;
      for (std::size_t i = 0; i + 1 < ids.size(); ++i) sum += (inv.kink_numbers[ids[i]] = kink(rng));
      const int last = required - sum;
      inv.kink_numbers[ids.back()] = last;
      if (std::abs(last) <= max_kink || attempt > 1000) break;
    }
  }

  std::uniform_int_distribution<int> wrap(-max_wrap, max_wrap);
  const std::size_t v = phat.cleaved_faces().size();
  inv.wrapping_numbers.assign(v, 0);
  for (int attempt = 0;; ++attempt) {
    int sum = 0;
    for (std::size_t a = 0; a + 1 < v; ++a) sum += (inv.wrapping_numbers[a] = wrap(rng));
    inv.wrapping_numbers[v - 1] = -sum;
    if (std::abs(sum) <= max_wrap || attempt > 1000) break;
  }
  return inv;
}

}  // namespace ttopo
