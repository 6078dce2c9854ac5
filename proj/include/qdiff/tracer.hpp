#pragma once

// Numerical integration of horizontal and vertical trajectories.

#include <cstddef>
#include <optional>
#include <vector>

#include "qdiff/core.hpp"

namespace qd {

struct TraceConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double launch_offset = 0.0;  // 0 selects the default derived from (a, b)
  double r_max = 0.0;
  double r_min = 0.0;
  double eps_hit = 0.0;
  std::size_t step_budget = 200000;
  double level_tol = 1e-7;  // allowed level drift per unit arc length
  bool project_level = true;
  double crit_tol = 1e-9;  // reality tolerance of the existence criterion

  /// Fills every zero-valued geometric threshold from the differential.
  TraceConfig resolved(const QDiff& q) const;
};

enum class Termination {
  ShortTrajectory,
  Loop,
  SpiralToOrigin,
  RadialToOrigin,
  EscapeToInfinity,
  StepBudgetExceeded,
};

enum class EscapeDirection { None, PlusImag, MinusImag, PlusReal, MinusReal };

const char* to_string(Termination t);
const char* to_string(EscapeDirection d);

struct TerminationRecord {
  Termination tag = Termination::StepBudgetExceeded;
  int endpoint_zero = -1;  // ZeroId index for ShortTrajectory / Loop
  int winding = 0;         // signed turns about the origin
  EscapeDirection escape = EscapeDirection::None;
  double closing_gap = 0.0;  // miss distance at a zero, when applicable
};

bool is_critical(const TerminationRecord& t);
bool is_origin_bound(const TerminationRecord& t);

struct ArcOrigin {
  bool from_zero = false;
  int zero = -1;
  int ray = -1;
  Complex point{0.0, 0.0};
};

struct Arc {
  TrajectoryKind kind = TrajectoryKind::Horizontal;
  ArcOrigin origin;
  double launch_angle = 0.0;
  std::vector<Complex> samples;
  std::vector<Complex> branch_values;  // sqrt(D) continued along samples
  TerminationRecord termination;
  double level = 0.0;            // conserved quantity relative to the start point
  double max_level_drift = 0.0;  // max |running level| along the samples
  double length = 0.0;
  std::size_t steps = 0;
};

/// Watches an arc in progress and decides when it has terminated.
class TerminationDetector {
 public:
  TerminationDetector(const QDiff& q, const TraceConfig& cfg, TrajectoryKind kind, Complex start,
                      int launch_zero);

  /// Feed the next accepted point; returns a record once the arc is finished.
  std::optional<TerminationRecord> observe(Complex z);

  int winding() const;

 private:
  std::optional<TerminationRecord> hit_zero(Complex z, int id) const;

  const QDiff& q_;
  TraceConfig cfg_;
  TrajectoryKind kind_;
  int launch_zero_;
  Complex prev_;
  double turning_ = 0.0;  // accumulated arg(z) change
  bool left_launch_ = false;
  bool fired_ = false;
  std::size_t steps_ = 0;
  // |z| each time the accumulated turning crosses another multiple of 2pi
  std::vector<double> checkpoint_radius_;
  int checkpoint_turns_ = 0;
  std::size_t run_start_ = 0;
};

/// Integrate from a regular seed along +/- the field closest to `direction`.
/// A seed within eps_hit of a zero is treated as launched from that zero.
Arc trace(const QDiff& q, Complex seed, Complex direction, TrajectoryKind kind,
          const TraceConfig& cfg);

/// Integrate one launch ray of a zero.
Arc trace_from_zero(const QDiff& q, ZeroId zero, int ray, TrajectoryKind kind,
                    const TraceConfig& cfg);

struct LaunchRecord {
  int zero = 0;
  int ray = 0;
  double angle = 0.0;
  std::size_t arc = 0;   // index into ArcSet::arcs
  bool reversed = false; // the ray traverses the stored arc backwards
};

struct ArcSet {
  std::vector<Arc> arcs;
  std::vector<LaunchRecord> launches;
};

/// One arc per launch ray of every zero, with arcs traced from both ends
/// merged.
ArcSet trace_all_from_zeros(const QDiff& q, const TraceConfig& cfg,
                            TrajectoryKind kind = TrajectoryKind::Horizontal);

/// Running Re (horizontal) or Im (vertical) of the integral of sqrt(D)/z dz
/// along the sampled polyline, recomputed by quadrature; returns the max
/// absolute value reached.
double level_drift(const QDiff& q, const Arc& arc);

/// Symmetric Hausdorff distance between two polylines (vertex-to-polyline).
double hausdorff(const std::vector<Complex>& p, const std::vector<Complex>& r);

/// Distance from a point to a polyline.
double distance_to_polyline(Complex z, const std::vector<Complex>& poly);

}  // namespace qd
