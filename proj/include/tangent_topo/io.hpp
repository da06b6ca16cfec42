#pragma once

// File formats. Everything except meshes is JSON with a "schema" tag:
//   tangent-topo/polyhedron/1   {vertices, faces}
//   tangent-topo/truncated/1    truncate report (combinatorics and geometry)
//   tangent-topo/field/1        polyhedron, cut planes and per-face samples
//   tangent-topo/invariants/1   an invariant set, optionally with its polyhedron
//   tangent-topo/report/1       an invariant report; its "invariants" member
//                               is itself a valid invariant-set document

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "tangent_topo/fields.hpp"
#include "tangent_topo/invariants.hpp"

namespace ttopo {

inline constexpr const char* kToolVersion = "0.1.0";

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// Builtin name or path to a polyhedron document.
ConvexPolyhedron load_polyhedron(const std::string& name_or_path);
ConvexPolyhedron parse_polyhedron(const std::string& text);
std::string polyhedron_to_json(const ConvexPolyhedron& poly);

std::string truncated_to_json(const TruncatedPolyhedron& phat);

/// Samples every face at `depth`.
std::string field_to_json(const TangentField& field, int depth);
/// Rebuilds the host polyhedron from the stored cut planes and validates the
/// samples (tangency and continuity) before returning.
TangentField parse_field(const std::string& text, const QuadratureConfig& cfg = {});

struct InvariantDocument {
  InvariantSet invariants;
  std::shared_ptr<const TruncatedPolyhedron> host;  // when the document carries one
};

std::string invariants_to_json(const InvariantSet& inv, const TruncatedPolyhedron& phat, bool with_host = true);
/// Accepts invariant-set documents and reports. `host` resolves the
/// per-edge indices when the document has no polyhedron of its own.
InvariantDocument parse_invariants(const std::string& text, std::shared_ptr<const TruncatedPolyhedron> host = nullptr);

struct ReportMeta {
  std::uint64_t seed = 0;
  std::string source;
};

std::string report_to_json(const InvariantReport& report, const TruncatedPolyhedron& phat, const ReportMeta& meta);

enum class MeshFormat { Vtk, Ply };
std::optional<MeshFormat> parse_mesh_format(const std::string& name);
/// Triangle mesh of the whole boundary with per-vertex unit vectors.
std::string mesh_export(const TangentField& field, int depth, MeshFormat format);

}  // namespace ttopo
