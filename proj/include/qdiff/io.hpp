#pragma once

// Serialized documents: graph JSON (lossless round trip), the other
// command outputs, SVG drawings and CSV tables.

#include <cstdint>
#include <string>
#include <vector>

#include "qdiff/graph.hpp"
#include "qdiff/laguerre.hpp"

namespace qd {

inline constexpr const char* kSchemaVersion = "1";

struct ArcRecord {
  std::string kind;
  int from_zero = -1;
  int ray = -1;
  double launch_angle = 0.0;
  std::string termination;
  int endpoint_zero = -1;
  std::string escape;
  int winding = 0;
  double closing_gap = 0.0;
  double level = 0.0;
  double max_level_drift = 0.0;
  double length = 0.0;
  std::vector<Complex> points;

  bool operator==(const ArcRecord&) const = default;
};

struct CornerRecord {
  std::string vertex;  // "a", "b", "origin", "infinity"
  int order = 0;
  double angle = 0.0;

  bool operator==(const CornerRecord&) const = default;
};

struct FaceRecord {
  std::vector<CornerRecord> corners;
  bool contains_origin = false;
  bool origin_on_boundary = false;
  double teichmuller_sum = 0.0;
  double expected = 0.0;

  bool operator==(const FaceRecord&) const = default;
};

struct ValidationRecord {
  bool criterion_agreement = true;
  bool ambiguous = false;
  bool validation_failed = false;
  bool period_available = false;
  Complex period{0.0, 0.0};
  int period_matched = -1;
  double period_mismatch = 0.0;
  double teichmuller_max_deviation = 0.0;
  bool origin_guard_same_zero = true;
  bool origin_guard_both_zeros = true;
  std::string face_error;

  bool operator==(const ValidationRecord&) const = default;
};

struct GraphDocument {
  std::string schema_version = kSchemaVersion;
  std::uint64_t seed = 0;
  Complex a{0.0, 0.0};
  Complex b{0.0, 0.0};
  std::string case_label;
  std::string criterion;  // "n/a" when a*b = 0
  double criterion_distance = 0.0;
  int critical_count = 0;
  int loop_zero = -1;
  std::vector<ArcRecord> arcs;
  std::vector<FaceRecord> faces;
  ValidationRecord validation;

  bool operator==(const GraphDocument&) const = default;
};

/// Document for a classified graph; `extra` arcs (e.g. vertical ones) are
/// listed after the graph's own.
GraphDocument make_graph_document(const CriticalGraph& g, std::uint64_t seed,
                                  const std::vector<Arc>& extra = {});

std::string to_json(const GraphDocument& doc);
/// Throws InvalidArgument on malformed input or an unknown schema version.
GraphDocument parse_graph_document(const std::string& json);

/// Period document: closed-form check along the traced short arc, or the straight
/// segment from a to b when none was traced.
std::string period_json(const QDiff& q, const TraceConfig& cfg, std::uint64_t seed);

std::string locus_json(const GammaLocus& locus, const Region& region, int per_branch,
                       std::uint64_t seed);
std::string locus_csv(const GammaLocus& locus, const Region& region, int per_branch);

std::string survey_json(const SurveyGrid& grid, std::uint64_t seed);
std::string survey_csv(const SurveyGrid& grid);
std::string survey_svg(const SurveyGrid& grid);

std::string convergence_json(const ConvergenceReport& rep, std::uint64_t seed);
std::string convergence_csv(const ConvergenceReport& rep);
/// Roots of the largest n drawn over the support arc.
std::string convergence_svg(const ConvergenceReport& rep);

/// Arcs drawn in the fixed viewport [-r_max, r_max]^2: horizontal solid,
/// vertical dashed, zeros and the pole marked.
std::string graph_svg(const QDiff& q, const std::vector<Arc>& arcs, double r_max);

/// "%.17g", the rendering used for every number written.
std::string format_number(double x);

}  // namespace qd
