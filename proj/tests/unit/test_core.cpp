#include <algorithm>
#include <cmath>
#include <limits>

#include "doctest.h"
#include "qdiff/core.hpp"
#include "support.hpp"

using namespace qd;
using qd::testing::Gen;

TEST_SUITE("core") {

TEST_CASE("construction keeps distinct zeros and reports the scale") {
  const QDiff q(1.0, 4.0);
  CHECK(q.a() == Complex(1.0));
  CHECK(q.b() == Complex(4.0));
  CHECK_FALSE(q.is_degenerate_equal());
  CHECK_FALSE(q.is_degenerate_zero());
  CHECK(q.scale() == doctest::Approx(4.0));
  CHECK(q.D(2.0) == Complex(-2.0));
  CHECK(q.Q(2.0) == Complex(0.5));
}

TEST_CASE("non-finite or doubly vanishing zeros are rejected") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  auto code = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode{};
  };
  CHECK(code([&] { QDiff(Complex(nan, 0.0), 1.0); }) == ErrorCode::InvalidArgument);
  CHECK(code([&] { QDiff(1.0, Complex(0.0, inf)); }) == ErrorCode::InvalidArgument);
  CHECK(code([] { QDiff(0.0, 0.0); }) == ErrorCode::InvalidDifferential);
  CHECK(code([] { QDiff(1e-14, 1e-14); }) == ErrorCode::InvalidDifferential);
}

TEST_CASE("near coincidences snap so the flags match the stored numbers") {
  const QDiff eq(1.0, Complex(1.0, 1e-13));
  CHECK(eq.is_degenerate_equal());
  CHECK(eq.a() == eq.b());

  const QDiff z(Complex(1e-14, 0.0), 4.0);
  CHECK(z.is_degenerate_zero());
  CHECK(z.a() == Complex{});
  CHECK_FALSE(z.is_zero_of_differential(ZeroId::A));
  CHECK(z.is_zero_of_differential(ZeroId::B));

  const QDiff apart(1.0, Complex(1.0, 1e-6));
  CHECK_FALSE(apart.is_degenerate_equal());
}

TEST_CASE("critical points carry the expected orders") {
  auto orders = [](const QDiff& q) {
    std::vector<int> o;
    for (const auto& c : q.critical_points()) o.push_back(c.order);
    return o;
  };
  CHECK(orders(QDiff(1.0, 4.0)) == std::vector<int>{1, 1, -2, -4});
  CHECK(orders(QDiff(1.0, 1.0)) == std::vector<int>{2, -2, -4});
  CHECK(orders(QDiff(0.0, 4.0)) == std::vector<int>{1, -1, -4});
  // Gauss-Bonnet on the sphere: orders sum to -4
  Gen g(11);
  for (int k = 0; k < 20; ++k) {
    const auto o = orders(QDiff(g.box(-3, 3), g.box(-3, 3)));
    int sum = 0;
    for (int v : o) sum += v;
    CHECK(sum == -4);
  }
}

TEST_CASE("canonicalize shifts then scales") {
  const QDiff q = QDiff::canonicalize(3.0, 6.0, 2.0, 4.0);
  CHECK(std::abs(q.a() - Complex(2.0)) < 1e-15);
  CHECK(std::abs(q.b() - Complex(8.0)) < 1e-15);
  CHECK(std::abs(q.map().backward(q.b()) - Complex(6.0)) < 1e-15);
  CHECK_THROWS_AS(QDiff::canonicalize(1.0, 2.0, 0.0, 0.0), Error);
}

TEST_CASE("residues at the origin and at infinity") {
  const QDiff q(1.0, 4.0);
  CHECK(std::abs(residue_origin(q, Sheet::Plus) - Complex(2.0)) < 1e-15);
  CHECK(std::abs(residue_origin(q, Sheet::Minus) - Complex(-2.0)) < 1e-15);
  CHECK(std::abs(residue_infinity(q) - Complex(2.5)) < 1e-15);
  CHECK_THROWS_AS(residue_origin(QDiff(0.0, 4.0), Sheet::Plus), Error);
}

TEST_CASE("launch directions for a real pair") {
  // c = 3 at a = 1, so rays sit at multiples of 2pi/3
  const auto h = launch_directions(QDiff(1.0, 4.0), ZeroId::A, TrajectoryKind::Horizontal);
  REQUIRE(h.size() == 3);
  CHECK(h[0] == doctest::Approx(0.0));
  CHECK(h[1] == doctest::Approx(kTwoPi / 3));
  CHECK(h[2] == doctest::Approx(2 * kTwoPi / 3));
  CHECK(launch_directions(QDiff(1.0, 1.0), ZeroId::A, TrajectoryKind::Horizontal).size() == 4);
  CHECK_THROWS_AS(launch_directions(QDiff(0.0, 4.0), ZeroId::A, TrajectoryKind::Horizontal), Error);
}

TEST_CASE("property: Q dz^2 along each launch ray has the right sign") {
  Gen g(12);
  for (int k = 0; k < 40; ++k) {
    const auto [a, b] = g.separated_pair(0.3, 3.0, 0.2);
    const QDiff q(a, b);
    for (ZeroId id : {ZeroId::A, ZeroId::B}) {
      for (TrajectoryKind kind : {TrajectoryKind::Horizontal, TrajectoryKind::Vertical}) {
        for (double th : launch_directions(q, id, kind)) {
          const Complex dir = std::polar(1.0, th);
          const Complex w = q.Q(q.zero(id) + 1e-7 * dir) * dir * dir;
          const double sign = kind == TrajectoryKind::Horizontal ? 1.0 : -1.0;
          CHECK(sign * w.real() > 0.0);
          CHECK(std::abs(w.imag()) < 1e-5 * std::abs(w));
        }
      }
    }
  }
}

TEST_CASE("continuation of sqrt(D) follows the sheet") {
  const QDiff q(1.0, 4.0);
  auto circle = [](Complex c, double r, int n) {
    std::vector<Complex> p;
    for (int k = 0; k <= n; ++k) p.push_back(c + std::polar(r, kTwoPi * k / n));
    return p;
  };
  // around a single zero the sheet flips, around both it returns
  const auto one = circle(1.0, 0.5, 400);
  const auto r1 = continue_sqrt_D(q, one, std::sqrt(q.D(one[0])));
  CHECK(std::abs(r1.branch_values.back() + r1.branch_values.front()) < 1e-12);
  const auto both = circle(2.5, 3.0, 400);
  const auto r2 = continue_sqrt_D(q, both, std::sqrt(q.D(both[0])));
  CHECK(std::abs(r2.branch_values.back() - r2.branch_values.front()) < 1e-12);
  for (std::size_t k = 0; k < both.size(); ++k)
    CHECK(std::abs(r2.branch_values[k] * r2.branch_values[k] - q.D(both[k])) < 1e-12 * q.scale() * q.scale());

  CHECK_THROWS_AS(continue_sqrt_D(q, one, Complex(7.0)), Error);
  CHECK(continue_sqrt_D(q, std::vector<Complex>{}, 1.0).samples.empty());
}

TEST_CASE("nearest_sqrt picks the root closest to the reference") {
  CHECK(nearest_sqrt(4.0, -1.0) == Complex(-2.0));
  CHECK(nearest_sqrt(4.0, 1.0) == Complex(2.0));
  CHECK(std::abs(nearest_sqrt(-1.0, Complex(0.0, -1.0)) - Complex(0.0, -1.0)) < 1e-15);
}

}  // TEST_SUITE
