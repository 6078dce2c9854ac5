#include "qdiff/core.hpp"

#include <algorithm>
#include <cmath>

namespace qd {

namespace {

constexpr double kEqualBand = 1e-12;
constexpr double kZeroBand = 1e-12;
constexpr double kSeedTolerance = 1e-9;
// Largest rotation of sqrt(D) accepted between consecutive samples before
// the segment is refined.
constexpr double kMaxSheetRotation = kPi / 4.0;

double wrap_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t -= kTwoPi;
  return t;
}

}  // namespace

void require_finite(Complex z, const char* what) {
  if (!is_finite(z)) throw Error(ErrorCode::InvalidArgument, std::string(what) + " is not finite");
}

const char* to_string(TrajectoryKind kind) {
  return kind == TrajectoryKind::Horizontal ? "horizontal" : "vertical";
}

QDiff::QDiff(Complex a, Complex b) : QDiff(a, b, NormalizationMap{}) {}

QDiff::QDiff(Complex a, Complex b, NormalizationMap map) : a_(a), b_(b), map_(map) {
  require_finite(a, "a");
  require_finite(b, "b");
  if (a == Complex{} && b == Complex{})
    throw Error(ErrorCode::InvalidDifferential, "a and b cannot both vanish");

  const double s = std::max({1.0, std::abs(a), std::abs(b)});
  if (std::abs(a - b) < kEqualBand * s) {
    b_ = a_;
    equal_ = true;
  }
  if (std::abs(a_ * b_) < kZeroBand) {
    if (equal_)
      throw Error(ErrorCode::InvalidDifferential, "a = b = 0 is excluded");
    if (std::abs(a_) <= std::abs(b_))
      a_ = Complex{};
    else
      b_ = Complex{};
    zero_at_origin_ = true;
  }
}

QDiff QDiff::canonicalize(Complex a_raw, Complex b_raw, Complex c, Complex A) {
  require_finite(a_raw, "a");
  require_finite(b_raw, "b");
  require_finite(c, "c");
  require_finite(A, "A");
  if (A == Complex{}) throw Error(ErrorCode::InvalidDifferential, "leading coefficient A must be nonzero");
  NormalizationMap m{c, std::sqrt(A)};
  return QDiff(m.forward(a_raw), m.forward(b_raw), m);
}

bool QDiff::is_zero_of_differential(ZeroId id) const {
  return !(zero_at_origin_ && zero(id) == Complex{});
}

double QDiff::scale() const { return std::max({1.0, std::abs(a_), std::abs(b_)}); }

std::vector<CriticalPoint> QDiff::critical_points() const {
  std::vector<CriticalPoint> out;
  if (equal_) {
    out.push_back({a_, false, 2, 4});
    out.push_back({Complex{}, false, -2, 0});
  } else if (zero_at_origin_) {
    const Complex z = a_ == Complex{} ? b_ : a_;
    out.push_back({z, false, 1, 3});
    out.push_back({Complex{}, false, -1, 1});
  } else {
    out.push_back({a_, false, 1, 3});
    out.push_back({b_, false, 1, 3});
    out.push_back({Complex{}, false, -2, 0});
  }
  // two asymptotic directions (+i inf, -i inf) at the order-4 pole
  out.push_back({Complex{}, true, -4, 2});
  return out;
}

Complex nearest_sqrt(Complex d, Complex reference) {
  const Complex r = std::sqrt(d);
  return std::real(r * std::conj(reference)) >= 0.0 ? r : -r;
}

BranchPath continue_sqrt_D(const QDiff& q, std::span<const Complex> path, Complex seed) {
  BranchPath out;
  if (path.empty()) return out;
  require_finite(seed, "seed");
  for (Complex z : path) require_finite(z, "path sample");

  const Complex d0 = q.D(path[0]);
  if (std::abs(seed * seed - d0) > kSeedTolerance * std::max(std::abs(d0), 1e-300))
    throw Error(ErrorCode::InvalidArgument, "seed is not a square root of D at the first sample");

  out.samples.assign(path.begin(), path.end());
  out.branch_values.reserve(path.size());
  out.branch_values.push_back(seed);

  auto rotation = [](Complex from, Complex to) {
    if (from == Complex{} || to == Complex{}) return 0.0;
    return std::abs(std::arg(to / from));
  };

  Complex prev = seed;
  for (std::size_t k = 1; k < path.size(); ++k) {
    Complex v = nearest_sqrt(q.D(path[k]), prev);
    if (rotation(prev, v) >= kMaxSheetRotation) {
      const Complex mid = 0.5 * (path[k - 1] + path[k]);
      const Complex vm = nearest_sqrt(q.D(mid), prev);
      v = nearest_sqrt(q.D(path[k]), vm);
      if (rotation(prev, vm) >= kMaxSheetRotation || rotation(vm, v) >= kMaxSheetRotation)
        throw Error(ErrorCode::Continuation,
                    "sheet ambiguity while continuing sqrt(D); refine the path near sample " +
                        std::to_string(k));
    }
    out.branch_values.push_back(v);
    // a value sitting on a branch point carries no sheet; keep the last nonzero one
    if (v != Complex{}) prev = v;
  }
  return out;
}

Complex residue_origin(const QDiff& q, Sheet sheet) {
  if (q.is_degenerate_zero())
    throw Error(ErrorCode::Degenerate, "ab = 0: the origin is a simple pole");
  return static_cast<double>(static_cast<int>(sheet)) * std::sqrt(q.a() * q.b());
}

Complex residue_infinity(const QDiff& q) { return 0.5 * (q.a() + q.b()); }

std::vector<double> launch_directions(const QDiff& q, ZeroId at, TrajectoryKind kind) {
  if (!q.is_zero_of_differential(at))
    throw Error(ErrorCode::Domain, "the requested point is not a zero of the differential");
  const Complex z0 = q.zero(at);

  // Local model Q(z) ~ c (z - z0)^r; rays satisfy arg c + (r + 2) theta = 0 (mod 2pi)
  // for horizontal trajectories and = pi for vertical ones.
  int r = 1;
  Complex c;
  if (q.is_degenerate_equal()) {
    r = 2;
    c = -1.0 / (z0 * z0);
  } else {
    const Complex other = at == ZeroId::A ? q.b() : q.a();
    c = -(z0 - other) / (z0 * z0);
  }
  const double offset = kind == TrajectoryKind::Horizontal ? 0.0 : kPi;
  const int count = r + 2;
  std::vector<double> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k)
    out.push_back(wrap_angle((kTwoPi * k + offset - std::arg(c)) / count));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace qd
