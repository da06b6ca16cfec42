#include "tangent_topo/cli.hpp"

#include <cstdlib>
#include <iostream>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "tangent_topo/io.hpp"
#include "tangent_topo/kernels.hpp"
#include "tangent_topo/synthesis.hpp"

namespace ttopo::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string poly = "cube";
  double lambda = 0.25;
  std::string field;
  std::string inv;
  std::optional<std::uint64_t> seed;
  std::optional<int> depth;
  int jobs = 0;
  std::string out;
  std::string report;
  std::string format = "vtk";
  bool random = false;
};

std::uint64_t resolve_seed(const RunConfig& cfg) {
  if (cfg.seed) return *cfg.seed;
  if (const char* env = std::getenv("TANGENT_TOPO_SEED")) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw UsageError("TANGENT_TOPO_SEED is not a non-negative integer");
  }
  return 0;
}

std::shared_ptr<const TruncatedPolyhedron> load_host(const RunConfig& cfg) {
  if (!(cfg.lambda > 0.0 && cfg.lambda < 0.5)) throw UsageError("--lambda must lie in (0, 1/2)");
  return std::make_shared<const TruncatedPolyhedron>(
      truncate(load_polyhedron(cfg.poly), TruncationSpec::from_lambda(cfg.lambda)));
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-")
    out << text;
  else
    write_text_file(path, text);
}

void check_wrapping_bound(const InvariantSet& inv) {
  for (int w : inv.wrapping_numbers)
    if (std::abs(w) > kMaxWrapping)
      fail(ErrorCode::InvalidField, "wrapping number " + std::to_string(w) + " exceeds the supported bound " +
                                        std::to_string(kMaxWrapping));
}

// Representative of an invariant-set file.
struct Representative {
  InvariantSet requested;
  TangentField field;
};

Representative representative_from(const RunConfig& cfg) {
  auto fallback = load_host(cfg);
  InvariantDocument doc = parse_invariants(read_text_file(cfg.inv), fallback);
  check_wrapping_bound(doc.invariants);
  AdmissibleInvariants adm = make_admissible(doc.invariants, *doc.host);
  return {adm.inv, representative_boundary(adm, doc.host)};
}

// Field from --field or --inv (exactly one).
struct Source {
  TangentField field;
  std::optional<InvariantSet> requested;
  std::string label;
};

Source load_source(const RunConfig& cfg) {
  if (cfg.field.empty() == cfg.inv.empty()) throw UsageError("give exactly one of --field and --inv");
  if (!cfg.field.empty()) return {parse_field(read_text_file(cfg.field)), std::nullopt, "field:" + cfg.field};
  Representative r = representative_from(cfg);
  return {std::move(r.field), std::move(r.requested), "representative:" + cfg.inv};
}

int cmd_truncate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!cfg.field.empty() || !cfg.inv.empty()) throw UsageError("truncate takes no field or invariant input");
  const auto phat = load_host(cfg);
  emit(cfg.out, truncated_to_json(*phat), out);
  const auto problems = check_adjacency(*phat);
  for (const auto& p : problems) err << "adjacency: " << p << '\n';
  return problems.empty() ? kOk : kValidation;
}

int cmd_invariants(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Source src = load_source(cfg);
  ExtractOptions opt;
  opt.seed = resolve_seed(cfg);
  if (cfg.depth) opt.cfg.depth = *cfg.depth;
  if (src.requested) opt.s = src.requested->s;
  const InvariantReport report = extract_all(src.field, opt);
  emit(cfg.out.empty() ? cfg.report : cfg.out, report_to_json(report, src.field.host(), {opt.seed, src.label}), out);
  if (!report.tangency.passed()) {
    err << "field fails tangency or continuity checks\n";
    return kValidation;
  }
  if (!report.verdicts.passed()) {
    err << "sum rules fail\n";
    return kSumRule;
  }
  if (src.requested && !same_invariants(report.invariants, *src.requested)) {
    err << "extracted invariants differ from the requested set\n";
    return kValidation;
  }
  return kOk;
}

int cmd_synthesize(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!cfg.field.empty()) throw UsageError("synthesize takes --inv or --random, not --field");
  if (cfg.random == !cfg.inv.empty()) throw UsageError("give exactly one of --inv and --random");
  const std::uint64_t seed = resolve_seed(cfg);
  std::shared_ptr<const TruncatedPolyhedron> host;
  InvariantSet inv;
  if (cfg.random) {
    host = load_host(cfg);
    std::mt19937_64 rng(seed);
    inv = random_admissible(*host, rng, choose_reference_s(*host, seed));
  } else {
    InvariantDocument doc = parse_invariants(read_text_file(cfg.inv), load_host(cfg));
    host = doc.host;
    inv = doc.invariants;
  }
  check_wrapping_bound(inv);
  const AdmissibleInvariants adm = make_admissible(inv, *host);
  const TangentField field = representative_boundary(adm, host);
  emit(cfg.out, field_to_json(field, cfg.depth.value_or(5)), out);
  if (cfg.report.empty()) return kOk;
  ExtractOptions opt;
  opt.seed = seed;
  opt.s = adm.inv.s;
  const InvariantReport report = extract_all(field, opt);
  write_text_file(cfg.report, report_to_json(report, *host, {seed, cfg.random ? "random" : "representative:" + cfg.inv}));
  if (!same_invariants(report.invariants, adm.inv)) {
    err << "extracted invariants differ from the requested set\n";
    return kValidation;
  }
  return report.all_passed() ? kOk : kValidation;
}

int cmd_check(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  using nlohmann::json;
  json j;
  j["schema"] = "tangent-topo/check/1";
  j["tool_version"] = kToolVersion;
  int code = kOk;
  std::shared_ptr<const TruncatedPolyhedron> host;
  std::optional<TangentField> field;
  std::optional<InvariantSet> inv;
  if (!cfg.field.empty() && !cfg.inv.empty()) throw UsageError("give at most one of --field and --inv");
  if (!cfg.field.empty()) {
    field = parse_field(read_text_file(cfg.field));
    host = field->host_ptr();
  } else if (!cfg.inv.empty()) {
    InvariantDocument doc = parse_invariants(read_text_file(cfg.inv), load_host(cfg));
    host = doc.host;
    inv = doc.invariants;
  } else {
    host = load_host(cfg);
  }
  const auto problems = check_adjacency(*host);
  j["adjacency_problems"] = problems;
  if (!problems.empty()) code = kValidation;
  if (field) {
    const TangencyDiagnostics d = validate_tangency(*field);
    j["tangency"] = {{"max_face_violation", d.max_face_violation},
                     {"max_edge_misalignment", d.max_edge_misalignment},
                     {"max_continuity_gap", d.max_continuity_gap},
                     {"passed", d.passed()}};
    if (!d.passed()) code = kValidation;
    InvariantSet partial;
    partial.edge_orientations = extract_edge_orientations(*field);
    for (int id = 0; id < static_cast<int>(host->cleaved_edges().size()); ++id)
      partial.kink_numbers.push_back(extract_kink(*field, id).kink);
    partial.wrapping_numbers.assign(host->cleaved_faces().size(), 0);
    inv = partial;
  }
  if (inv) {
    const SumRuleVerdicts v = check_sum_rules(*inv, *host);
    json faces = json::array();
    for (const auto& f : v.faces)
      faces.push_back({{"face", f.face}, {"flips", f.flips}, {"required", f.required}, {"actual", f.actual}, {"passed", f.passed}});
    j["kink_rule"] = {{"faces", faces}, {"passed", v.kinks_passed()}};
    // A field's wrapping rule needs the full extraction; `invariants` reports it.
    if (!field) j["wrapping_rule"] = {{"sum", v.wrapping_sum}, {"passed", v.wrapping_passed}};
    const bool ok = field ? v.kinks_passed() : v.passed();
    if (!ok && code == kOk) code = kSumRule;
  }
  j["passed"] = code == kOk;
  emit(cfg.out, j.dump(2) + "\n", out);
  return code;
}

int cmd_export_mesh(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const auto format = parse_mesh_format(cfg.format);
  if (!format) throw UsageError("unknown mesh format '" + cfg.format + "' (expected vtk or ply)");
  const int depth = cfg.depth.value_or(3);
  if (depth < 0) throw UsageError("--depth must be non-negative");
  const Source src = load_source(cfg);
  emit(cfg.out, mesh_export(src.field, depth, *format), out);
  return kOk;
}

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::IoError: return kIo;
    case ErrorCode::SumRuleViolation: return kSumRule;
    case ErrorCode::ResolutionTooCoarse:
    case ErrorCode::MaxRefinement:
    case ErrorCode::CoarseSampling: return kResolution;
    default: return kValidation;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Homotopy invariants of tangent unit-vector fields on truncated polyhedra", "tangent_topo"};
  app.require_subcommand(1);
  RunConfig cfg;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--poly", cfg.poly, "builtin name (cube, tetrahedron, octahedron) or polyhedron file");
    sub->add_option("--lambda", cfg.lambda, "truncation fraction in (0, 1/2)");
    sub->add_option("--seed", cfg.seed, "seed (falls back to TANGENT_TOPO_SEED, then 0)");
    sub->add_option("--jobs", cfg.jobs, "worker threads (0 keeps the default)");
    sub->add_option("--out", cfg.out, "output file (stdout when absent)");
  };
  CLI::App* truncate_cmd = app.add_subcommand("truncate", "truncate a polyhedron and print its combinatorics");
  common(truncate_cmd);
  truncate_cmd->add_option("--field", cfg.field)->group("");
  truncate_cmd->add_option("--inv", cfg.inv)->group("");

  CLI::App* inv_cmd = app.add_subcommand("invariants", "extract the invariant report of a field");
  common(inv_cmd);
  inv_cmd->add_option("--field", cfg.field, "sampled field file");
  inv_cmd->add_option("--inv", cfg.inv, "invariant set whose representative is analysed");
  inv_cmd->add_option("--depth", cfg.depth, "quadrature depth (default 6)");
  inv_cmd->add_option("--report", cfg.report, "report file (same as --out)");

  CLI::App* syn_cmd = app.add_subcommand("synthesize", "build the representative field of an invariant set");
  common(syn_cmd);
  syn_cmd->add_option("--field", cfg.field)->group("");
  syn_cmd->add_option("--inv", cfg.inv, "invariant set or report file");
  syn_cmd->add_flag("--random", cfg.random, "draw a random admissible invariant set from the seed");
  syn_cmd->add_option("--depth", cfg.depth, "export mesh depth (default 5)");
  syn_cmd->add_option("--report", cfg.report, "also write the extracted report of the representative");

  CLI::App* check_cmd = app.add_subcommand("check", "validate geometry, tangency and sum rules");
  common(check_cmd);
  check_cmd->add_option("--field", cfg.field, "sampled field file");
  check_cmd->add_option("--inv", cfg.inv, "invariant set file");

  CLI::App* mesh_cmd = app.add_subcommand("export-mesh", "write a triangle mesh with per-vertex directors");
  common(mesh_cmd);
  mesh_cmd->add_option("--field", cfg.field, "sampled field file");
  mesh_cmd->add_option("--inv", cfg.inv, "invariant set whose representative is exported");
  mesh_cmd->add_option("--depth", cfg.depth, "mesh depth (default 3)");
  mesh_cmd->add_option("--format", cfg.format, "vtk or ply");

  std::vector<std::string> storage{"tangent_topo"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : storage) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    kernels::set_max_threads(cfg.jobs);
    if (truncate_cmd->parsed()) return cmd_truncate(cfg, out, err);
    if (inv_cmd->parsed()) return cmd_invariants(cfg, out, err);
    if (syn_cmd->parsed()) return cmd_synthesize(cfg, out, err);
    if (check_cmd->parsed()) return cmd_check(cfg, out, err);
    if (mesh_cmd->parsed()) return cmd_export_mesh(cfg, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kUsage;
}

}  // namespace ttopo::cli
