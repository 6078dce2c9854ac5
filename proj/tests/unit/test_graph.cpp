#include <cmath>
#include <set>

#include "doctest.h"
#include "qdiff/graph.hpp"
#include "support.hpp"

using namespace qd;
using qd::testing::Gen;

namespace {

const double kR = 2.0 * std::sqrt(2.0);

}  // namespace

TEST_SUITE("graph") {

TEST_CASE("catalogue labels") {
  struct Case {
    Complex a, b;
    CaseLabel label;
  };
  const Case cases[] = {
      {1.0, 4.0, CaseLabel::RealPair_SegmentPlusLoop},
      {1.0, 1.0, CaseLabel::EqualZeros_Real},
      {Complex(0.0, 1.0), Complex(0.0, 1.0), CaseLabel::EqualZeros_Imaginary},
      {Complex(1.0, 1.0), Complex(1.0, 1.0), CaseLabel::EqualZeros_Generic},
      {0.0, 4.0, CaseLabel::ZeroAtOrigin},
      {Complex(-1.0, kR), Complex(-1.0, -kR), CaseLabel::ConjugatePair_LoopThroughBoth},
      {1.0, Complex(0.0, 2.0), CaseLabel::OneReality_SpiralPlusCritical},
      {1.0, Complex(3.0, 4.0), CaseLabel::NoCritical_SpiralCases},
  };
  for (const Case& c : cases) {
    CAPTURE(c.a);
    CAPTURE(c.b);
    const CriticalGraph g = classify_graph(QDiff(c.a, c.b));
    CHECK(g.case_label == c.label);
    CHECK_FALSE(g.validation_failed());
    CHECK(g.guards.same_zero_ok);
    CHECK(g.guards.both_zeros_ok);
  }
}

TEST_CASE("the loop sits on the zero nearer the origin") {
  CHECK(classify_graph(QDiff(1.0, 4.0)).loop_zero == 0);
  CHECK(classify_graph(QDiff(4.0, 1.0)).loop_zero == 1);
  const CriticalGraph g = classify_graph(QDiff(1.0, 4.0));
  CHECK(g.critical_count == 2);
  CHECK(g.short_count == 1);
  CHECK(g.has_criterion);
  CHECK(g.critical_evidence);
  CHECK_FALSE(classify_graph(QDiff(0.0, 4.0)).has_criterion);
}

TEST_CASE("case labels round-trip through their names") {
  for (CaseLabel c : {CaseLabel::EqualZeros_Real, CaseLabel::EqualZeros_Imaginary, CaseLabel::EqualZeros_Generic,
                      CaseLabel::ZeroAtOrigin, CaseLabel::RealPair_SegmentPlusLoop,
                      CaseLabel::ConjugatePair_LoopThroughBoth, CaseLabel::OneReality_SpiralPlusCritical,
                      CaseLabel::NoCritical_SpiralCases})
    CHECK(case_label_from_string(to_string(c)) == c);
  CHECK_FALSE(case_label_from_string("nonsense").has_value());
}

TEST_CASE("angle sums of hand-built faces") {
  PolygonFace f;
  // a disk bounded by a loop through a simple zero with a pi corner, pole inside
  f.corners = {{GraphVertex::A, 1.0, 1, kPi}};
  f.interior_order = -2;
  CHECK(teichmuller_sum(f) == doctest::Approx(1.0 - kPi * 3 / kTwoPi));
  CHECK(teichmuller_expected(f) == doctest::Approx(0.0));
  PolygonFace empty;
  CHECK(teichmuller_expected(empty) == doctest::Approx(2.0));
}

TEST_CASE("faces of catalogue graphs satisfy the angle identity") {
  const std::pair<Complex, Complex> cases[] = {
      {1.0, 1.0}, {1.0, 4.0}, {0.0, 4.0}, {Complex(-1.0, kR), Complex(-1.0, -kR)},
      {1.0, Complex(0.0, 2.0)}, {1.0, Complex(3.0, 4.0)},
  };
  for (const auto& [a, b] : cases) {
    const CriticalGraph g = classify_graph(QDiff(a, b));
    CHECK(g.face_error.empty());
    CHECK_FALSE(g.faces.empty());
    for (const PolygonFace& f : g.faces) {
      CHECK(std::abs(teichmuller_sum(f) - teichmuller_expected(f)) < 1e-3);
    }
  }
}

TEST_CASE("locus of a = 1: positive reals and a parabola") {
  const GammaLocus L = gamma_locus(1.0);
  REQUIRE(L.branches().size() == 2);
  CHECK(L.distance(4.0) < 1e-9);
  CHECK(L.distance(Complex(0.0, 2.0)) < 1e-9);  // x = 1 - y^2/4
  CHECK(L.parabola_x(1, 2.0) == doctest::Approx(0.0));
  CHECK(L.distance(Complex(-2.0, 0.0)) > 0.5);
  CHECK_THROWS_AS(gamma_locus(0.0), Error);
}

TEST_CASE("printed closed form of the second parabola") {
  const GammaLocus at_i = gamma_locus(Complex(0.0, 1.0));
  const GammaLocus off = gamma_locus(Complex(1.0, 1.0));
  double agree = 0.0, disagree = 0.0;
  for (double y = -3.0; y <= 3.0; y += 0.25) {
    agree = std::max(agree, std::abs(at_i.printed_parabola_x(1, y) - at_i.parabola_x(1, y)));
    disagree = std::max(disagree, std::abs(off.printed_parabola_x(1, y) - off.parabola_x(1, y)));
    CHECK(std::abs(off.printed_parabola_x(0, y) - off.parabola_x(0, y)) < 1e-9);
  }
  CHECK(agree < 1e-9);
  CHECK(disagree > 1.0);
}

TEST_CASE("property: locus samples pass the criterion") {
  Gen g(41);
  for (int k = 0; k < 10; ++k) {
    const Complex a = g.annulus(0.3, 2.5);
    const GammaLocus L = gamma_locus(a);
    for (const LocusPoint& p : L.sample(-3, 3, -3, 3, 40)) {
      if (std::abs(p.b) < 1e-9) continue;
      CHECK(criterion_reality(QDiff(a, p.b)).cls != CriterionClass::Neither);
      CHECK(std::abs(L.point(p.branch, p.t) - p.b) < 1e-14);
      CHECK(L.distance(p.b) < 1e-6);
    }
  }
}

TEST_CASE("survey marks cells only near the locus") {
  SurveyOptions opts;
  opts.trace_samples = 20;
  opts.seed = 5;
  const SurveyGrid grid = survey(1.0, {}, 41, opts);
  CHECK(grid.nx == 41);
  CHECK(grid.cells.size() == 41u * 41u);
  CHECK(grid.traced == 20);
  CHECK(grid.agreements == grid.traced_unambiguous);
  const GammaLocus L = gamma_locus(1.0);
  const double cell = std::hypot(grid.cell_width(), grid.cell_height());
  int marked = 0;
  for (const SurveyCell& c : grid.cells) {
    if (c.cls == CriterionClass::Neither) continue;
    ++marked;
    CHECK(L.distance(c.b) < 2.0 * cell);
  }
  CHECK(marked > 41);
  // same seed, same cells traced
  const SurveyGrid again = survey(1.0, {}, 41, opts);
  for (std::size_t k = 0; k < grid.cells.size(); ++k) CHECK(grid.cells[k].traced == again.cells[k].traced);
  CHECK_THROWS_AS(survey(1.0, {}, 1), Error);
}

TEST_CASE("property: tracing agrees with the criterion") {
  Gen g(42);
  int checked = 0;
  for (int k = 0; k < 60; ++k) {
    const Complex a = g.box(-3, 3);
    // half the samples on the locus, half generic
    const Complex b = k % 2 ? g.box(-3, 3) : std::pow(Complex(g.uniform(-1.5, 1.5)) + std::sqrt(a), 2.0);
    if (std::abs(a * b) < 1e-3 || std::abs(a - b) < 1e-2) continue;
    const CriticalGraph cg = classify_graph(QDiff(a, b));
    if (cg.ambiguous) continue;
    CAPTURE(a);
    CAPTURE(b);
    CHECK(cg.agreement);
    CHECK(cg.guards.same_zero_ok);
    CHECK(cg.guards.both_zeros_ok);
    ++checked;
  }
  CHECK(checked > 40);
}

}  // TEST_SUITE
