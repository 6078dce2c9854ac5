#pragma once

// Critical graphs: topology classification, face angles and the locus of
// parameters where a critical trajectory joins the zeros.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qdiff/core.hpp"
#include "qdiff/periods.hpp"
#include "qdiff/tracer.hpp"

namespace qd {

enum class CaseLabel {
  EqualZeros_Real,
  EqualZeros_Imaginary,
  EqualZeros_Generic,
  ZeroAtOrigin,
  RealPair_SegmentPlusLoop,
  ConjugatePair_LoopThroughBoth,
  OneReality_SpiralPlusCritical,
  NoCritical_SpiralCases,
};

const char* to_string(CaseLabel c);
std::optional<CaseLabel> case_label_from_string(const std::string& s);

enum class GraphVertex : int { A = 0, B = 1, Origin = 2, Infinity = 3 };

struct FaceCorner {
  GraphVertex vertex = GraphVertex::A;
  Complex location{0.0, 0.0};
  int order = 0;       // 1, 2, -1, -2 or -4
  double angle = 0.0;  // interior angle in (0, 2pi], multiples of pi at infinity
};

struct FaceEdge {
  std::size_t arc = 0;
  bool reversed = false;
};

struct PolygonFace {
  std::vector<FaceCorner> corners;
  std::vector<FaceEdge> edges;  // boundary walk with the face on the left
  bool contains_origin = false;
  bool origin_on_boundary = false;
  bool contains_infinity = false;
  int interior_order = 0;  // sum of orders of critical points inside the face
};

/// 1 - theta (n + 2) / (2 pi) summed over the corners.
double teichmuller_sum(const PolygonFace& face);

/// 2 plus the orders of the critical points inside: 0 with the double pole
/// at the origin inside, 2 with nothing inside.
double teichmuller_expected(const PolygonFace& face);

/// Faces of the horizontal critical graph traced in `arcs`. Throws
/// InsufficientResolution when an arc is too short to measure its angle
/// and Domain when the graph cannot be decomposed into polygons.
std::vector<PolygonFace> extract_faces(const QDiff& q, const std::vector<Arc>& arcs,
                                       const TraceConfig& cfg = {});

struct StructureGuards {
  bool same_zero_ok = true;   // no zero sends two arcs to the origin
  bool both_zeros_ok = true;  // not both zeros origin-bound while the criterion holds
};

struct CriticalGraph {
  explicit CriticalGraph(const QDiff& q) : qdiff(q) {}

  QDiff qdiff;
  TraceConfig config;
  std::vector<Arc> arcs;
  std::vector<LaunchRecord> launches;
  CaseLabel case_label = CaseLabel::NoCritical_SpiralCases;
  int critical_count = 0;  // distinct arcs tagged ShortTrajectory or Loop
  int short_count = 0;
  int loop_zero = -1;      // zero carrying a loop, -1 when none
  bool has_criterion = false;  // false when a*b = 0
  CriterionResult criterion;
  bool critical_evidence = false;  // a short trajectory joins the zeros
  bool agreement = true;           // evidence matches the criterion
  bool ambiguous = false;          // inside the criterion band
  StructureGuards guards;
  std::vector<PolygonFace> faces;
  std::string face_error;  // why faces are missing, if they are

  /// Disagreement with the criterion outside the ambiguity band.
  bool validation_failed() const { return !agreement && !ambiguous; }
};

CriticalGraph classify_graph(const QDiff& q, const TraceConfig& cfg = {});

enum class LocusShape { Parabola, PositiveRay, NegativeRay };

const char* to_string(LocusShape s);

struct LocusBranch {
  LocusShape shape = LocusShape::Parabola;
  // b(t) = (t + sqrt a)^2 for the first branch, (i t + sqrt a)^2 for the second
  bool imaginary_shift = false;
};

struct LocusPoint {
  int branch = 0;
  double t = 0.0;
  Complex b{0.0, 0.0};
};

class GammaLocus {
 public:
  explicit GammaLocus(Complex a);

  Complex anchor() const { return a_; }
  const std::vector<LocusBranch>& branches() const { return branches_; }

  Complex point(int branch, double t) const;

  /// x on a parabola branch as a function of y, from the parametrization.
  double parabola_x(int branch, double y) const;
  /// The same curve written out in the closed forms quoted for a not real;
  /// agrees with parabola_x for the first branch and, for the second, only
  /// where Re sqrt(a) = Im sqrt(a).
  double printed_parabola_x(int branch, double y) const;

  /// Points with b inside [x0, x1] x [y0, y1], `per_branch` parameter values each.
  std::vector<LocusPoint> sample(double x0, double x1, double y0, double y1,
                                 int per_branch) const;

  /// Distance from b to the locus, by local minimization over each branch.
  double distance(Complex b) const;

 private:
  Complex a_;
  Complex root_;
  std::vector<LocusBranch> branches_;
};

GammaLocus gamma_locus(Complex a);

struct Region {
  double x0 = -3.0, x1 = 3.0, y0 = -3.0, y1 = 3.0;
};

struct SurveyCell {
  Complex b{0.0, 0.0};
  CriterionClass cls = CriterionClass::Neither;  // locus crossing inside the cell
  bool traced = false;
  bool critical_evidence = false;
  int critical_count = 0;
  bool center_ambiguous = false;
  bool agreement = true;
};

struct SurveyOptions {
  int trace_samples = 0;  // cells to verify by tracing
  std::uint64_t seed = 1;
  TraceConfig trace{};
};

struct SurveyGrid {
  Complex a{0.0, 0.0};
  Region region;
  int nx = 0, ny = 0;
  std::vector<SurveyCell> cells;  // row-major, rows along y
  int traced = 0;
  int traced_unambiguous = 0;
  int agreements = 0;  // among traced, unambiguous cells

  const SurveyCell& at(int i, int j) const { return cells[static_cast<std::size_t>(j) * nx + i]; }
  double cell_width() const { return (region.x1 - region.x0) / nx; }
  double cell_height() const { return (region.y1 - region.y0) / ny; }
};

SurveyGrid survey(Complex a, const Region& region, int resolution,
                  const SurveyOptions& opts = {});

}  // namespace qd
