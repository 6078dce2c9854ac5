#pragma once

// Rescaled generalized Laguerre polynomials L_n^{nA}(nz), their zero
// distributions and the algebraic Cauchy transform of the limit measure.

#include <string>
#include <utility>
#include <vector>

#include "qdiff/core.hpp"
#include "qdiff/periods.hpp"
#include "qdiff/tracer.hpp"

namespace qd {

struct RescaledLaguerre {
  int n = 0;
  Complex A{0.0, 0.0};
  // p_n(z) = sum_k C(n+nA, n-k) (-n z)^k / k!, ascending powers
  std::vector<Complex> coefficients;
  // the same sum without the rescaling of z: C(n+nA, n-k) (-z)^k / k!
  std::vector<Complex> raw_coefficients;
  int degree = 0;

  /// p_n(z) and p_n'(z) by the three-term recurrence.
  std::pair<Complex, Complex> evaluate(Complex z) const;

  /// sum_k |c_k| |z|^k, the scale residuals are measured against.
  double magnitude(Complex z) const;
};

RescaledLaguerre build_polynomial(int n, Complex A);

struct RootMeasure {
  std::vector<Complex> roots;  // sorted by (Re, Im)
  double weight = 0.0;         // 1/n
  bool converged = false;
  int iterations = 0;
  double max_residual = 0.0;   // max |p(root)| / magnitude(root)
  std::string failure;         // empty when converged
};

inline constexpr double kRootResidualTol = 1e-8;

RootMeasure roots(const RescaledLaguerre& p);

/// (1/n) sum 1/(z - root).
Complex empirical_cauchy(const RootMeasure& m, Complex z);

/// Zeros A+2 +/- 2 sqrt(A+1) of (z-A)^2 - 4z, principal root.
std::pair<Complex, Complex> laguerre_zeros(Complex A);

/// Branch of h solving z h^2 + (A - z) h + 1 = 0 with h ~ 1/z at infinity,
/// cut along the critical arc that carries unit mass.
class AlgebraicBranch {
 public:
  explicit AlgebraicBranch(Complex A, const TraceConfig& cfg = {});

  Complex A() const { return A_; }
  const QDiff& differential() const { return q_; }
  /// Support arc from a to b.
  const std::vector<Complex>& support() const { return cut_.path(); }
  /// Period of the support divided by 2 pi i.
  Complex mass() const { return mass_; }
  const CutBranch& cut() const { return cut_; }

 private:
  Complex A_;
  QDiff q_;
  Complex mass_;  // set while the support is selected, so declared before cut_
  CutBranch cut_;
};

struct HValue {
  bool on_cut = false;
  Complex h{0.0, 0.0};        // off the cut
  Complex h_plus{0.0, 0.0};   // left of the support, on the cut
  Complex h_minus{0.0, 0.0};  // right of the support, on the cut
};

HValue algebraic_h(const AlgebraicBranch& branch, Complex z);

/// lim z h(z), estimated far out.
Complex asymptotic_alpha(const AlgebraicBranch& branch);

struct DensitySample {
  double density = 0.0;       // per unit arc length
  double imag_residue = 0.0;  // part of the jump that should vanish
};

DensitySample motherbody_density(const AlgebraicBranch& branch, Complex z);

/// 8 points on a circle of radius 2 max(|a|, |b|, 1) about the support centroid.
std::vector<Complex> standard_probes(const AlgebraicBranch& branch);

struct ConvergenceReport {
  Complex A{0.0, 0.0};
  std::vector<int> ns;
  std::vector<Complex> probes;
  std::vector<double> probe_support_distance;
  std::vector<std::vector<double>> errors;  // errors[i][j]: ns[i], probes[j]
  std::vector<RootMeasure> measures;
  std::vector<double> root_support_distance;  // max over roots, per n
  std::vector<bool> probe_monotone;  // strictly decreasing in n, per probe
  bool monotone = false;
  Complex alpha{0.0, 0.0};
  Complex mass{0.0, 0.0};
  std::vector<Complex> support;
};

/// Throws Domain when A has no unit-mass critical arc. Empty probes select
/// standard_probes.
ConvergenceReport convergence_report(Complex A, const std::vector<int>& ns,
                                     std::vector<Complex> probes = {},
                                     const TraceConfig& cfg = {});

}  // namespace qd
