#include "tangent_topo/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "tangent_topo/errors.hpp"

namespace ttopo {

using nlohmann::json;

namespace {

json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec_from(const json& j) {
  if (!j.is_array() || j.size() != 3) fail(ErrorCode::ParseError, "expected a 3-vector");
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, e.what());
  }
}

void expect_schema(const json& j, const std::string& schema) {
  if (!j.is_object() || !j.contains("schema") || j["schema"] != schema)
    fail(ErrorCode::ParseError, "expected a document with schema " + schema);
}

// Wraps nlohmann access errors as ParseError.
template <class F>
auto guarded(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, e.what());
  }
}

json polyhedron_json(const ConvexPolyhedron& poly) {
  json j;
  j["schema"] = "tangent-topo/polyhedron/1";
  j["vertices"] = json::array();
  for (const auto& v : poly.vertices()) j["vertices"].push_back(vec_json(v));
  j["faces"] = poly.faces();
  return j;
}

ConvexPolyhedron polyhedron_from(const json& j) {
  return guarded([&] {
    std::vector<Vec3> vertices;
    for (const auto& v : j.at("vertices")) vertices.push_back(vec_from(v));
    return ConvexPolyhedron::create(std::move(vertices), j.at("faces").get<std::vector<std::vector<int>>>());
  });
}

json cuts_json(const TruncatedPolyhedron& phat) {
  json cuts = json::array();
  for (const auto& c : phat.cuts()) cuts.push_back({{"normal", vec_json(c.normal)}, {"point", vec_json(c.point)}});
  return cuts;
}

std::shared_ptr<const TruncatedPolyhedron> host_from(const json& j) {
  return guarded([&] {
    const ConvexPolyhedron poly = polyhedron_from(j.at("polyhedron"));
    std::vector<CutPlane> planes;
    for (const auto& c : j.at("cuts")) planes.push_back({vec_from(c.at("normal")), vec_from(c.at("point"))});
    return std::make_shared<const TruncatedPolyhedron>(truncate(poly, TruncationSpec::from_planes(std::move(planes))));
  });
}

std::string face_kind(FaceKind k) { return k == FaceKind::Cleaved ? "cleaved" : "truncated"; }

json invariant_body(const InvariantSet& inv, const TruncatedPolyhedron& phat) {
  json j;
  j["s"] = vec_json(inv.s.vec());
  j["edge_orientations"] = json::array();
  for (std::size_t b = 0; b < inv.edge_orientations.size(); ++b) {
    const double d = dot(inv.edge_orientations[b], phat.truncated_edges()[b].direction);
    j["edge_orientations"].push_back({{"edge", b}, {"sign", d > 0 ? 1 : -1}, {"vector", vec_json(inv.edge_orientations[b])}});
  }
  j["kink_numbers"] = json::array();
  for (std::size_t id = 0; id < inv.kink_numbers.size(); ++id) {
    const auto& ce = phat.cleaved_edges()[id];
    j["kink_numbers"].push_back({{"vertex", ce.vertex}, {"face", ce.face}, {"value", inv.kink_numbers[id]}});
  }
  j["wrapping_numbers"] = json::array();
  for (std::size_t a = 0; a < inv.wrapping_numbers.size(); ++a)
    j["wrapping_numbers"].push_back({{"vertex", a}, {"value", inv.wrapping_numbers[a]}});
  return j;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path);
  out << text;
  if (!out) fail(ErrorCode::IoError, "write failed for " + path);
}

ConvexPolyhedron load_polyhedron(const std::string& name_or_path) {
  for (const auto& n : builtin_names())
    if (n == name_or_path) return builtin_polyhedron(n);
  return parse_polyhedron(read_text_file(name_or_path));
}

ConvexPolyhedron parse_polyhedron(const std::string& text) {
  const json j = parse_json(text);
  expect_schema(j, "tangent-topo/polyhedron/1");
  return polyhedron_from(j);
}

std::string polyhedron_to_json(const ConvexPolyhedron& poly) { return polyhedron_json(poly).dump(2) + "\n"; }

std::string truncated_to_json(const TruncatedPolyhedron& phat) {
  json j;
  j["schema"] = "tangent-topo/truncated/1";
  j["tool_version"] = kToolVersion;
  j["counts"] = {{"vertices", phat.num_vertices()},
                 {"edges", phat.num_edges()},
                 {"faces", phat.num_faces()},
                 {"cleaved_faces", phat.cleaved_faces().size()},
                 {"truncated_faces", phat.truncated_faces().size()},
                 {"euler_characteristic", phat.euler_characteristic()}};
  j["polyhedron"] = polyhedron_json(phat.parent());
  j["cuts"] = cuts_json(phat);
  j["vertices"] = json::array();
  for (const auto& v : phat.vertices()) j["vertices"].push_back(vec_json(v));
  j["faces"] = json::array();
  for (const FaceRef& ref : phat.all_faces()) {
    const auto& f = phat.face(ref);
    j["faces"].push_back({{"kind", face_kind(ref.kind)}, {"index", ref.index}, {"normal", vec_json(f.normal)},
                          {"corners", f.corners}});
  }
  j["truncated_edges"] = json::array();
  for (const auto& te : phat.truncated_edges())
    j["truncated_edges"].push_back({{"edge", te.edge}, {"start", te.start}, {"end", te.end}});
  j["cleaved_edges"] = json::array();
  for (const auto& ce : phat.cleaved_edges())
    j["cleaved_edges"].push_back({{"vertex", ce.vertex}, {"face", ce.face}, {"start", ce.start}, {"end", ce.end}});
  j["adjacency_problems"] = check_adjacency(phat);
  return j.dump(2) + "\n";
}

std::string field_to_json(const TangentField& field, int depth) {
  const auto& phat = field.host();
  json j;
  j["schema"] = "tangent-topo/field/1";
  j["tool_version"] = kToolVersion;
  j["depth"] = depth;
  j["polyhedron"] = polyhedron_json(phat.parent());
  j["cuts"] = cuts_json(phat);
  j["faces"] = json::array();
  for (const FaceRef& ref : phat.all_faces()) {
    const FaceSample s = field.sample(ref, depth);
    json f;
    f["kind"] = face_kind(ref.kind);
    f["index"] = ref.index;
    f["nodes"] = json::array();
    for (const auto& x : s.mesh.nodes) f["nodes"].push_back(vec_json(x));
    f["vectors"] = json::array();
    for (const auto& v : s.values) f["vectors"].push_back(vec_json(v));
    f["triangles"] = s.mesh.triangles;
    j["faces"].push_back(std::move(f));
  }
  return j.dump() + "\n";
}

TangentField parse_field(const std::string& text, const QuadratureConfig& cfg) {
  const json j = parse_json(text);
  expect_schema(j, "tangent-topo/field/1");
  auto host = host_from(j);
  std::vector<FaceSample> faces = guarded([&] {
    std::vector<FaceSample> out;
    for (const auto& f : j.at("faces")) {
      FaceSample s;
      const std::string kind = f.at("kind").get<std::string>();
      if (kind != "cleaved" && kind != "truncated") fail(ErrorCode::ParseError, "unknown face kind " + kind);
      s.face = {kind == "cleaved" ? FaceKind::Cleaved : FaceKind::Truncated, f.at("index").get<int>()};
      for (const auto& x : f.at("nodes")) s.mesh.nodes.push_back(vec_from(x));
      for (const auto& v : f.at("vectors")) s.values.push_back(vec_from(v));
      s.mesh.triangles = f.at("triangles").get<std::vector<std::array<int, 3>>>();
      out.push_back(std::move(s));
    }
    return out;
  });
  TangentField field = TangentField::sampled(host, std::move(faces));
  const TangencyDiagnostics d = validate_tangency(field, cfg);
  if (!d.tangent)
    fail(ErrorCode::InvalidField, "field is not tangent (face " + fmt(d.max_face_violation) + ", edge " +
                                      fmt(d.max_edge_misalignment) + ")");
  if (!d.continuous) fail(ErrorCode::InvalidField, "field is discontinuous (gap " + fmt(d.max_continuity_gap) + ")");
  return field;
}

std::string invariants_to_json(const InvariantSet& inv, const TruncatedPolyhedron& phat, bool with_host) {
  json j;
  j["schema"] = "tangent-topo/invariants/1";
  j.update(invariant_body(inv, phat));
  if (with_host) {
    j["polyhedron"] = polyhedron_json(phat.parent());
    j["cuts"] = cuts_json(phat);
  }
  return j.dump(2) + "\n";
}

InvariantDocument parse_invariants(const std::string& text, std::shared_ptr<const TruncatedPolyhedron> host) {
  json j = parse_json(text);
  if (j.is_object() && j.value("schema", "") == "tangent-topo/report/1") j = guarded([&] { return j.at("invariants"); });
  expect_schema(j, "tangent-topo/invariants/1");
  InvariantDocument doc;
  doc.host = j.contains("polyhedron") ? host_from(j) : host;
  if (!doc.host) fail(ErrorCode::ParseError, "invariant set has no polyhedron and none was supplied");
  const auto& phat = *doc.host;
  guarded([&] {
    InvariantSet& inv = doc.invariants;
    inv.s = UnitVector(vec_from(j.at("s")));
    inv.edge_orientations.assign(phat.truncated_edges().size(), Vec3{});
    std::vector<bool> seen_edge(inv.edge_orientations.size(), false);
    for (const auto& e : j.at("edge_orientations")) {
      const int b = e.at("edge").get<int>();
      if (b < 0 || b >= static_cast<int>(seen_edge.size()) || seen_edge[b])
        fail(ErrorCode::ParseError, "bad or repeated edge index " + std::to_string(b));
      seen_edge[b] = true;
      inv.edge_orientations[b] = e.contains("vector") ? vec_from(e.at("vector"))
                                                      : phat.truncated_edges()[b].direction * e.at("sign").get<double>();
    }
    inv.kink_numbers.assign(phat.cleaved_edges().size(), 0);
    std::vector<bool> seen_kink(inv.kink_numbers.size(), false);
    for (const auto& k : j.at("kink_numbers")) {
      const int id = phat.cleaved_edge_index(k.at("vertex").get<int>(), k.at("face").get<int>());
      if (id < 0 || seen_kink[id]) fail(ErrorCode::ParseError, "bad or repeated cleaved edge in kink_numbers");
      seen_kink[id] = true;
      inv.kink_numbers[id] = k.at("value").get<int>();
    }
    inv.wrapping_numbers.assign(phat.cleaved_faces().size(), 0);
    std::vector<bool> seen_wrap(inv.wrapping_numbers.size(), false);
    for (const auto& w : j.at("wrapping_numbers")) {
      const int a = w.at("vertex").get<int>();
      if (a < 0 || a >= static_cast<int>(seen_wrap.size()) || seen_wrap[a])
        fail(ErrorCode::ParseError, "bad or repeated vertex in wrapping_numbers");
      seen_wrap[a] = true;
      inv.wrapping_numbers[a] = w.at("value").get<int>();
    }
    const auto all = [](const std::vector<bool>& v) { return std::all_of(v.begin(), v.end(), [](bool b) { return b; }); };
    if (!all(seen_edge) || !all(seen_kink) || !all(seen_wrap)) fail(ErrorCode::ParseError, "invariant set is incomplete");
    return 0;
  });
  return doc;
}

std::string report_to_json(const InvariantReport& report, const TruncatedPolyhedron& phat, const ReportMeta& meta) {
  json j;
  j["schema"] = "tangent-topo/report/1";
  j["tool_version"] = kToolVersion;
  j["seed"] = meta.seed;
  j["source"] = meta.source;
  j["depth"] = report.depth;
  json inv;
  inv["schema"] = "tangent-topo/invariants/1";
  inv.update(invariant_body(report.invariants, phat));
  inv["polyhedron"] = polyhedron_json(phat.parent());
  inv["cuts"] = cuts_json(phat);
  j["invariants"] = std::move(inv);

  json faces = json::array();
  for (const auto& f : report.verdicts.faces)
    faces.push_back({{"face", f.face}, {"flips", f.flips}, {"required", f.required}, {"actual", f.actual}, {"passed", f.passed}});
  j["verdicts"] = {{"kink_faces", faces},
                   {"kinks_passed", report.verdicts.kinks_passed()},
                   {"wrapping_sum", report.verdicts.wrapping_sum},
                   {"wrapping_passed", report.verdicts.wrapping_passed},
                   {"passed", report.verdicts.passed()}};
  j["tangency"] = {{"max_face_violation", report.tangency.max_face_violation},
                   {"max_edge_misalignment", report.tangency.max_edge_misalignment},
                   {"max_continuity_gap", report.tangency.max_continuity_gap},
                   {"tangent", report.tangency.tangent},
                   {"continuous", report.tangency.continuous}};
  j["kinks"] = json::array();
  for (const auto& k : report.kinks)
    j["kinks"].push_back({{"vertex", k.vertex},
                          {"face", k.face},
                          {"value", k.result.kink},
                          {"xi", k.result.xi},
                          {"eta", k.result.eta},
                          {"residual", k.result.residual},
                          {"start_vertex", k.result.start_vertex},
                          {"samples", k.result.samples}});
  j["wrappings"] = json::array();
  for (const auto& w : report.wrappings) {
    json pre = {{"status", to_string(w.preimage_status)}, {"count", w.preimage_count}};
    pre["value"] = w.preimage_wrapping ? json(*w.preimage_wrapping) : json(nullptr);
    pre["s"] = w.preimage_wrapping ? vec_json(w.preimage_s) : json(nullptr);
    j["wrappings"].push_back({{"vertex", w.vertex},
                              {"integral",
                               {{"value", w.integral.wrapping},
                                {"residual", w.integral.residual},
                                {"depth", w.integral.depth},
                                {"area_term", w.integral.area_term},
                                {"boundary_term", w.integral.boundary_term},
                                {"max_edge_angle", w.integral.max_edge_angle},
                                {"warned", w.integral.warned}}},
                              {"preimage", pre},
                              {"trapped_area",
                               {{"direct", w.trapped_direct},
                                {"closed_form", w.trapped_closed},
                                {"residual", std::fabs(w.trapped_direct - w.trapped_closed)}}}});
  }
  j["all_passed"] = report.all_passed();
  return j.dump(2) + "\n";
}

std::optional<MeshFormat> parse_mesh_format(const std::string& name) {
  if (name == "vtk") return MeshFormat::Vtk;
  if (name == "ply") return MeshFormat::Ply;
  return std::nullopt;
}

std::string mesh_export(const TangentField& field, int depth, MeshFormat format) {
  std::vector<Vec3> nodes, values;
  std::vector<std::array<int, 3>> tris;
  std::vector<int> tri_face;
  int slot = 0;
  for (const FaceRef& ref : field.host().all_faces()) {
    const FaceSample s = field.sample(ref, depth);
    const int offset = static_cast<int>(nodes.size());
    nodes.insert(nodes.end(), s.mesh.nodes.begin(), s.mesh.nodes.end());
    values.insert(values.end(), s.values.begin(), s.values.end());
    for (const auto& t : s.mesh.triangles) {
      tris.push_back({t[0] + offset, t[1] + offset, t[2] + offset});
      tri_face.push_back(slot);
    }
    ++slot;
  }
  std::ostringstream out;
  const auto v3 = [&](const Vec3& v) { out << fmt(v.x) << ' ' << fmt(v.y) << ' ' << fmt(v.z); };
  if (format == MeshFormat::Vtk) {
    out << "# vtk DataFile Version 3.0\ntangent-topo field\nASCII\nDATASET POLYDATA\n";
    out << "POINTS " << nodes.size() << " double\n";
    for (const auto& x : nodes) v3(x), out << '\n';
    out << "POLYGONS " << tris.size() << ' ' << 4 * tris.size() << '\n';
    for (const auto& t : tris) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    out << "CELL_DATA " << tris.size() << "\nSCALARS face int 1\nLOOKUP_TABLE default\n";
    for (int f : tri_face) out << f << '\n';
    out << "POINT_DATA " << nodes.size() << "\nVECTORS director double\n";
    for (const auto& v : values) v3(v), out << '\n';
  } else {
    out << "ply\nformat ascii 1.0\ncomment tangent-topo field\n";
    out << "element vertex " << nodes.size() << '\n';
    out << "property double x\nproperty double y\nproperty double z\n";
    out << "property double nx\nproperty double ny\nproperty double nz\n";
    out << "element face " << tris.size() << '\n';
    out << "property list uchar int vertex_indices\nproperty int face_id\nend_header\n";
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      v3(nodes[i]);
      out << ' ';
      v3(values[i]);
      out << '\n';
    }
    for (std::size_t i = 0; i < tris.size(); ++i)
      out << "3 " << tris[i][0] << ' ' << tris[i][1] << ' ' << tris[i][2] << ' ' << tri_face[i] << '\n';
  }
  return out.str();
}

}  // namespace ttopo
