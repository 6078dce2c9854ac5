#pragma once

// Period integrals of sqrt(D)/z dz between the zeros and the
// critical-trajectory reality criterion.

#include <array>
#include <span>
#include <vector>

#include "qdiff/core.hpp"

namespace qd {

enum class CriterionClass { BothReal, PlusReal, MinusReal, Neither };

const char* to_string(CriterionClass c);

struct CriterionResult {
  CriterionClass cls = CriterionClass::Neither;
  // Im((sqrt a +/- sqrt b)^2) computed as Im(a + b) +/- 2 Im(sqrt(ab)), principal sqrt(ab)
  double im_plus = 0.0;
  double im_minus = 0.0;
  // min(|im_plus|, |im_minus|) / (|a| + |b|)
  double relative_distance = 0.0;
  // within the declared band of the locus but not on it
  bool boundary_ambiguous = false;
};

inline constexpr double kTauCrit = 1e-9;
inline constexpr double kAmbiguityBand = 1e-3;

CriterionResult criterion_reality(const QDiff& q, double tau = kTauCrit,
                                  double band = kAmbiguityBand);

/// +/-(i pi / 2)(sqrt a + sqrt b)^2, +/-(i pi / 2)(sqrt a - sqrt b)^2 with principal roots,
/// in that order.
std::array<Complex, 4> period_candidates(const QDiff& q);

struct PeriodResult {
  Complex value{0.0, 0.0};
  std::array<Complex, 4> candidates{};
  int matched = 0;
  double mismatch = 0.0;
};

/// sqrt(D) on the plane cut along a path from a to b, normalized by
/// sqrt(D) ~ z at infinity.
class CutBranch {
 public:
  CutBranch(const QDiff& q, std::vector<Complex> path);

  /// Value at a point off the cut.
  Complex value(Complex z) const;

  /// Boundary values from the left (+) side at each sample of the path;
  /// zero at the two endpoints.
  std::vector<Complex> plus_values() const;

  const std::vector<Complex>& path() const { return path_; }

 private:
  int crossing_parity(Complex z) const;

  QDiff q_;
  std::vector<Complex> path_;
  std::vector<Complex> closed_;  // path followed by b -> 0 -> a
};

/// Integral of (sqrt D)_+ / z along the polyline `path` from a to b.
Complex period_integral(const QDiff& q, std::span<const Complex> path);

PeriodResult period_check(const QDiff& q, std::span<const Complex> path);

/// Value of sqrt(D) at z continued along the segment from the origin,
/// starting from sheet * principal sqrt(ab).
Complex branch_from_origin(const QDiff& q, Sheet sheet, Complex z);

/// Counter-clockwise integral of sqrt(D)/z over a circle, by the periodic
/// trapezoid rule with sqrt(D) continued from `seed` at center + radius.
Complex circle_integral(const QDiff& q, Complex center, double radius, Complex seed);

}  // namespace qd
