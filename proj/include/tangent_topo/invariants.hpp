#pragma once

// Homotopy invariants of tangent fields: edge orientations, kink numbers,
// wrapping numbers (two independent routes), trapped areas (two routes),
// sum rules and the director-field canonicalization.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tangent_topo/fields.hpp"

namespace ttopo {

inline constexpr double kMarginS = 0.05;
inline constexpr double kKinkResidualTol = 1e-6;
inline constexpr double kWrapResidualWarn = 1e-3;
inline constexpr double kTolRegular = 1e-6;

struct InvariantSet {
  UnitVector s;
  std::vector<Vec3> edge_orientations;  // per truncated edge
  std::vector<int> kink_numbers;        // per cleaved edge id
  std::vector<int> wrapping_numbers;    // per cleaved face (original vertex)
};

/// Integers equal and edge orientations within `tol`.
bool same_invariants(const InvariantSet& a, const InvariantSet& b, double tol = 1e-9);

/// |s . F| >= margin for every face normal.
bool is_admissible_s(const TruncatedPolyhedron& phat, const Vec3& s, double margin = kMarginS);

/// Deterministic seeded scan of a low-discrepancy sequence on the sphere.
UnitVector choose_reference_s(const TruncatedPolyhedron& phat, std::uint64_t seed);

std::vector<Vec3> extract_edge_orientations(const TangentField& field, const QuadratureConfig& cfg = {});

struct KinkResult {
  int kink = 0;
  double xi = 0.0;   // accumulated rotation along the edge
  double eta = 0.0;  // minimal rotation between the endpoint values
  double residual = 0.0;
  int start_vertex = 0;  // truncated-polyhedron vertex at t = 0
  int samples = 0;
};

KinkResult extract_kink(const TangentField& field, int cleaved_edge, const QuadratureConfig& cfg = {});

/// Kink number from an already traced path about `axis`.
KinkResult kink_from_path(const SphericalPath& path, const Vec3& axis);

struct WrappingResult {
  int wrapping = 0;
  double area_term = 0.0;      // integral of the pulled-back area form (the trapped area)
  double boundary_term = 0.0;  // integral of gamma along the boundary image
  double residual = 0.0;
  double max_edge_angle = 0.0;
  int depth = 0;
  bool warned = false;  // residual above the warning rung
};

/// Integral route on a given face sample.
WrappingResult wrapping_integral(const FaceSample& sample, const Vec3& s);
/// Integral route with depth refinement for analytic fields.
WrappingResult extract_wrapping_integral(const TangentField& field, int vertex, const Vec3& s,
                                         const QuadratureConfig& cfg = {});

struct Preimage {
  Vec3 point;
  double det = 0.0;
  int local_degree = 0;
};

struct PreimageResult {
  int wrapping = 0;
  std::vector<Preimage> preimages;
};

/// Signed count of preimages of s on the sample's face. Throws NotRegularValue.
PreimageResult wrapping_preimage(const TangentField& field, const FaceSample& sample, const Vec3& s);
PreimageResult extract_wrapping_preimage(const TangentField& field, int vertex, const Vec3& s,
                                         const QuadratureConfig& cfg = {});

double trapped_area_direct(const TangentField& field, int vertex, const QuadratureConfig& cfg = {});
double trapped_area_from_invariants(const InvariantSet& inv, const TruncatedPolyhedron& phat, int vertex);

struct FaceKinkVerdict {
  int face = 0;
  int flips = 0;     // q: orientation changes between consecutive truncated edges
  int required = 0;  // q / 2 - 1
  int actual = 0;
  bool passed = false;
};

struct SumRuleVerdicts {
  std::vector<FaceKinkVerdict> faces;
  int wrapping_sum = 0;
  bool wrapping_passed = false;
  bool kinks_passed() const;
  bool passed() const { return kinks_passed() && wrapping_passed; }
};

/// Number of consecutive truncated-edge pairs of truncated face c whose
/// orientations disagree relative to the positive circulation of the face.
int orientation_flips(const TruncatedPolyhedron& phat, int face, const std::vector<Vec3>& edge_orientations);

SumRuleVerdicts check_sum_rules(const InvariantSet& inv, const TruncatedPolyhedron& phat);

/// Invariants of the antipodal field taken with reference direction -s:
/// orientations and wrappings negate, kinks stay. With s held fixed the
/// wrapping numbers shift by the winding of the boundary image about s.
InvariantSet antipodal_image(const InvariantSet& inv);
/// Lexicographically smaller of inv and its antipodal image.
InvariantSet director_class(const InvariantSet& inv);

struct KinkDiagnostics {
  int vertex = 0;
  int face = 0;
  KinkResult result;
};

enum class PreimageStatus { Regular, RegularPerturbed, NotRegular };
std::string to_string(PreimageStatus s);

struct WrappingDiagnostics {
  int vertex = 0;
  WrappingResult integral;
  PreimageStatus preimage_status = PreimageStatus::NotRegular;
  std::optional<int> preimage_wrapping;
  int preimage_count = 0;
  Vec3 preimage_s;  // direction actually used by the preimage route
  double trapped_direct = 0.0;
  double trapped_closed = 0.0;
};

struct InvariantReport {
  InvariantSet invariants;
  SumRuleVerdicts verdicts;
  TangencyDiagnostics tangency;
  std::vector<KinkDiagnostics> kinks;
  std::vector<WrappingDiagnostics> wrappings;
  std::uint64_t seed = 0;
  int depth = 0;
  bool all_passed() const;
  double max_trapped_residual() const;
};

struct ExtractOptions {
  std::optional<UnitVector> s;  // chosen from `seed` when absent
  std::uint64_t seed = 0;
  QuadratureConfig cfg;
  int validation_depth = 4;
};

/// Complete invariant certificate of a field. Two fields with the same s are
/// homotopic exactly when their invariant sets agree.
InvariantReport extract_all(const TangentField& field, const ExtractOptions& options = {});

}  // namespace ttopo
