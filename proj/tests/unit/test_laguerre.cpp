#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "qdiff/laguerre.hpp"
#include "support.hpp"

using namespace qd;
using qd::testing::Gen;

namespace {

bool same_pair(Complex x0, Complex x1, Complex y0, Complex y1, double tol) {
  return (std::abs(x0 - y0) < tol && std::abs(x1 - y1) < tol) || (std::abs(x0 - y1) < tol && std::abs(x1 - y0) < tol);
}

}  // namespace

TEST_SUITE("laguerre") {

TEST_CASE("coefficients for n = 2, A = 2") {
  const RescaledLaguerre p = build_polynomial(2, 2.0);
  REQUIRE(p.coefficients.size() == 3);
  CHECK(p.degree == 2);
  CHECK(std::abs(p.raw_coefficients[0] - 15.0) < 1e-12);
  CHECK(std::abs(p.raw_coefficients[1] + 6.0) < 1e-12);
  CHECK(std::abs(p.raw_coefficients[2] - 0.5) < 1e-12);
  CHECK(std::abs(p.coefficients[0] - 15.0) < 1e-12);
  CHECK(std::abs(p.coefficients[1] + 12.0) < 1e-12);
  CHECK(std::abs(p.coefficients[2] - 2.0) < 1e-12);
  // the recurrence agrees with the monomial form
  const Complex z(0.7, -0.3);
  const auto [v, d] = p.evaluate(z);
  CHECK(std::abs(v - (15.0 - 12.0 * z + 2.0 * z * z)) < 1e-12);
  CHECK(std::abs(d - (-12.0 + 4.0 * z)) < 1e-12);
}

TEST_CASE("degree one has its single root at 1 + A") {
  const RootMeasure m = roots(build_polynomial(1, 2.0));
  REQUIRE(m.roots.size() == 1);
  CHECK(std::abs(m.roots[0] - 3.0) < 1e-12);
  CHECK(m.converged);
}

TEST_CASE("invalid degrees are rejected") { CHECK_THROWS_AS(build_polynomial(0, 1.0), Error); }

TEST_CASE("empirical Cauchy transform") {
  RootMeasure m;
  m.roots = {3.0};
  m.weight = 1.0;
  CHECK(std::abs(empirical_cauchy(m, 5.0) - 0.5) < 1e-15);
  CHECK_THROWS_AS(empirical_cauchy(m, 3.0), Error);
}

TEST_CASE("roots of conjugate parameters are conjugate") {
  const Complex A(1.0, 2.0);
  const RootMeasure r = roots(build_polynomial(20, A));
  const RootMeasure c = roots(build_polynomial(20, std::conj(A)));
  REQUIRE(r.roots.size() == 20);
  for (Complex z : r.roots) {
    double best = 1e300;
    for (Complex w : c.roots) best = std::min(best, std::abs(std::conj(z) - w));
    CHECK(best < 1e-8);
  }
  // real parameter: the root set is closed under conjugation
  const RootMeasure real = roots(build_polynomial(30, -3.0));
  for (Complex z : real.roots) {
    double best = 1e300;
    for (Complex w : real.roots) best = std::min(best, std::abs(std::conj(z) - w));
    CHECK(best < 1e-8);
  }
}

TEST_CASE("property: zeros of the limit differential and the closed-form candidates") {
  Gen g(51);
  for (int k = 0; k < 50; ++k) {
    const Complex A = g.box(-4.0, 4.0);
    const auto [a, b] = laguerre_zeros(A);
    CHECK(std::abs((a - A) * (a - A) - 4.0 * a) < 1e-10 * std::max(1.0, std::norm(a)));
    const Complex sa = std::sqrt(a), sb = std::sqrt(b);
    CHECK(same_pair((sa + sb) * (sa + sb), (sa - sb) * (sa - sb), 4.0 * A + 4.0, 4.0, 1e-10));
  }
}

TEST_CASE("A = -3: the algebraic branch") {
  const AlgebraicBranch br(-3.0);
  CHECK(std::abs(br.mass() - 1.0) < 1e-10);
  CHECK(std::abs(asymptotic_alpha(br) - 1.0) < 1e-9);
  const Complex A = br.A();
  Gen g(52);
  for (int k = 0; k < 30; ++k) {
    const Complex z = g.box(-4.0, 4.0);
    const HValue h = algebraic_h(br, z);
    if (h.on_cut) continue;
    CHECK(std::abs(z * h.h * h.h + (A - z) * h.h + 1.0) < 1e-10 * std::max(1.0, std::abs(z)));
  }
}

TEST_CASE("A = -3: boundary values and density on the support") {
  const AlgebraicBranch br(-3.0);
  const auto& s = br.support();
  const Complex A = br.A();
  double mass = 0.0;
  for (std::size_t i = 1; i + 1 < s.size(); i += 3) {
    const HValue h = algebraic_h(br, s[i]);
    REQUIRE(h.on_cut);
    // Vieta on the cut
    CHECK(std::abs(h.h_plus + h.h_minus - (s[i] - A) / s[i]) < 1e-6);
    CHECK(std::abs(h.h_plus * h.h_minus - 1.0 / s[i]) < 1e-6);
    const DensitySample d = motherbody_density(br, s[i]);
    CHECK(d.density >= 0.0);
    CHECK(std::abs(d.imag_residue) < 1e-6);
  }
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const Complex mid = 0.5 * (s[i] + s[i + 1]);
    mass += motherbody_density(br, mid).density * std::abs(s[i + 1] - s[i]);
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-2));
  CHECK_THROWS_AS(motherbody_density(br, 10.0), Error);
}

TEST_CASE("parameters without a unit-mass arc are out of scope") {
  CHECK_THROWS_AS(AlgebraicBranch(-0.5), Error);
}

TEST_CASE("root measures converge towards the support") {
  const ConvergenceReport rep = convergence_report(-3.0, {10, 20, 40});
  REQUIRE(rep.measures.size() == 3);
  REQUIRE(rep.probes.size() == 8);
  for (const RootMeasure& m : rep.measures) {
    CHECK(m.converged);
    CHECK(m.max_residual < kRootResidualTol);
  }
  CHECK(rep.root_support_distance[2] < rep.root_support_distance[0]);
  CHECK(rep.monotone);
  for (std::size_t j = 0; j < rep.probes.size(); ++j) CHECK(rep.errors[2][j] < rep.errors[0][j]);
}

TEST_CASE("convergence reports are deterministic") {
  const ConvergenceReport r1 = convergence_report(Complex(1.0, 2.0), {8, 16});
  const ConvergenceReport r2 = convergence_report(Complex(1.0, 2.0), {8, 16});
  CHECK(r1.errors == r2.errors);
  CHECK(r1.measures[1].roots == r2.measures[1].roots);
}

}  // TEST_SUITE
