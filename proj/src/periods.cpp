#include "qdiff/periods.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "qdiff/quadrature.hpp"

namespace qd {

namespace {

const Complex kI{0.0, 1.0};

double segment_distance(Complex p, Complex s0, Complex s1) {
  const Complex d = s1 - s0;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(p - s0);
  const double t = std::clamp(std::real((p - s0) * std::conj(d)) / len2, 0.0, 1.0);
  return std::abs(p - (s0 + t * d));
}

using ComplexFn = std::function<Complex(double)>;

Complex adaptive_gl(const ComplexFn& f, double lo, double hi, Complex whole, double tol, int depth) {
  const auto& gl = GaussLegendre16::instance();
  const double mid = 0.5 * (lo + hi);
  const Complex left = gl.integrate(f, lo, mid);
  const Complex right = gl.integrate(f, mid, hi);
  const Complex sum = left + right;
  if (std::abs(sum - whole) <= tol || depth >= 40) return sum;
  return adaptive_gl(f, lo, mid, left, 0.5 * tol, depth + 1) +
         adaptive_gl(f, mid, hi, right, 0.5 * tol, depth + 1);
}

Complex integrate_adaptive(const ComplexFn& f, double lo, double hi, double tol) {
  return adaptive_gl(f, lo, hi, GaussLegendre16::instance().integrate(f, lo, hi), tol, 0);
}

void validate_path(const QDiff& q, std::span<const Complex> path) {
  if (path.size() < 2) throw Error(ErrorCode::InvalidArgument, "path needs at least two points");
  for (Complex z : path) require_finite(z, "path sample");
  const double tol = 1e-12 * q.scale();
  if (std::abs(path.front() - q.a()) > tol || std::abs(path.back() - q.b()) > tol)
    throw Error(ErrorCode::InvalidArgument, "path must run from a to b");
  for (std::size_t k = 0; k + 1 < path.size(); ++k)
    if (segment_distance(Complex{}, path[k], path[k + 1]) <= tol)
      throw Error(ErrorCode::Domain, "path passes through the origin");
  for (std::size_t k = 1; k + 1 < path.size(); ++k)
    if (std::abs(path[k] - q.a()) <= tol || std::abs(path[k] - q.b()) <= tol)
      throw Error(ErrorCode::Domain, "path meets a branch point in its interior");
}

// Subdivide [u, v] so every piece is short compared with its distance from
// the branch points and the pole.
void refine_segment(const QDiff& q, Complex u, Complex v, std::vector<Complex>& out) {
  Complex w = u;
  const Complex dir = (v - u) / std::abs(v - u);
  while (true) {
    const double rest = std::abs(v - w);
    const double d = std::min({std::abs(w - q.a()), std::abs(w - q.b()), std::abs(w)});
    const double step = 0.1 * d;
    if (step >= rest) break;
    w += step * dir;
    out.push_back(w);
  }
  out.push_back(v);
}

}  // namespace

const char* to_string(CriterionClass c) {
  switch (c) {
    case CriterionClass::BothReal: return "both_real";
    case CriterionClass::PlusReal: return "plus_real";
    case CriterionClass::MinusReal: return "minus_real";
    case CriterionClass::Neither: return "neither";
  }
  return "?";
}

CriterionResult criterion_reality(const QDiff& q, double tau, double band) {
  if (q.is_degenerate_zero()) throw Error(ErrorCode::Degenerate, "criterion requires ab != 0");
  const Complex r = std::sqrt(q.a() * q.b());
  const double sum_im = (q.a() + q.b()).imag();
  CriterionResult out;
  out.im_plus = sum_im + 2.0 * r.imag();
  out.im_minus = sum_im - 2.0 * r.imag();
  const double norm = std::abs(q.a()) + std::abs(q.b());
  const bool plus = std::abs(out.im_plus) < tau * norm;
  const bool minus = std::abs(out.im_minus) < tau * norm;
  if (plus && minus)
    out.cls = CriterionClass::BothReal;
  else if (plus)
    out.cls = CriterionClass::PlusReal;
  else if (minus)
    out.cls = CriterionClass::MinusReal;
  out.relative_distance = std::min(std::abs(out.im_plus), std::abs(out.im_minus)) / norm;
  out.boundary_ambiguous = out.cls == CriterionClass::Neither && out.relative_distance < band;
  return out;
}

std::array<Complex, 4> period_candidates(const QDiff& q) {
  const Complex sa = std::sqrt(q.a());
  const Complex sb = std::sqrt(q.b());
  const Complex f = 0.5 * kPi * kI;
  const Complex plus = f * (sa + sb) * (sa + sb);
  const Complex minus = f * (sa - sb) * (sa - sb);
  return {plus, -plus, minus, -minus};
}

CutBranch::CutBranch(const QDiff& q, std::vector<Complex> path) : q_(q), path_(std::move(path)) {
  if (path_.size() < 2) throw Error(ErrorCode::InvalidArgument, "cut needs at least two points");
  closed_ = path_;
  closed_.push_back(Complex{});
  closed_.push_back(path_.front());
}

int CutBranch::crossing_parity(Complex z) const {
  double turn = 0.0;
  for (std::size_t k = 0; k + 1 < closed_.size(); ++k) turn += std::arg((closed_[k + 1] - z) / (closed_[k] - z));
  return static_cast<int>(std::lround(turn / kTwoPi)) & 1;
}

Complex CutBranch::value(Complex z) const {
  require_finite(z, "z");
  if (z == Complex{}) z = Complex{1e-300, 0.0};
  // Reference branch, analytic off the segments [0, a] and [0, b] and ~ z at infinity.
  const Complex f = z * std::sqrt(1.0 - q_.a() / z) * std::sqrt(1.0 - q_.b() / z);
  return crossing_parity(z) ? -f : f;
}

std::vector<Complex> CutBranch::plus_values() const {
  const std::size_t n = path_.size();
  std::vector<Complex> out(n, Complex{});
  if (n < 3) return out;

  const Complex a = q_.a();
  const Complex b = q_.b();
  std::size_t best = 1;
  double best_score = -1.0;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const Complex z = path_[k];
    const double score = std::min({segment_distance(z, Complex{}, a), segment_distance(z, Complex{}, b),
                                   std::abs(z - a), std::abs(z - b)});
    if (score > best_score) {
      best_score = score;
      best = k;
    }
  }
  const Complex m = path_[best];
  const Complex tangent = path_[best + 1] - path_[best - 1];
  const double local = std::min(std::abs(path_[best + 1] - m), std::abs(m - path_[best - 1]));
  const double ends = std::min(std::abs(m - a), std::abs(m - b));
  const double eps = std::min({1e-6 * q_.scale(), 0.1 * local, 0.1 * ends});
  const Complex left = m + eps * kI * tangent / std::abs(tangent);
  out[best] = nearest_sqrt(q_.D(m), value(left));

  std::vector<Complex> fwd(path_.begin() + best, path_.end() - 1);
  const BranchPath f = continue_sqrt_D(q_, fwd, out[best]);
  for (std::size_t k = 0; k < f.branch_values.size(); ++k) out[best + k] = f.branch_values[k];

  std::vector<Complex> bwd;
  for (std::size_t k = best; k >= 1; --k) bwd.push_back(path_[k]);
  const BranchPath r = continue_sqrt_D(q_, bwd, out[best]);
  for (std::size_t k = 0; k < r.branch_values.size(); ++k) out[best - k] = r.branch_values[k];

  out.front() = Complex{};
  out.back() = Complex{};
  return out;
}

Complex period_integral(const QDiff& q, std::span<const Complex> path) {
  if (q.is_degenerate_equal()) {
    // sqrt(D) = z - a is single valued; a path that never leaves a has zero period.
    Complex sum{};
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
      const Complex u = path[k], v = path[k + 1];
      if (u == v) continue;
      auto f = [&](double t) {
        const Complex z = u + t * (v - u);
        return (z - q.a()) / z * (v - u);
      };
      sum += integrate_adaptive(f, 0.0, 1.0, 1e-12);
    }
    return sum;
  }
  if (q.is_degenerate_zero())
    throw Error(ErrorCode::Degenerate, "period integral requires ab != 0");
  validate_path(q, path);

  const Complex a = q.a();
  const Complex b = q.b();
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) total += std::abs(path[k + 1] - path[k]);

  const double sep = std::abs(a - b);
  auto terminal_length = [&](Complex end, Complex next) {
    return std::min({0.1 * total, std::abs(next - end), 0.25 * sep, 0.25 * std::abs(a),
                     0.25 * std::abs(b)});
  };
  const Complex a_next = path[1];
  const Complex b_prev = path[path.size() - 2];
  const Complex pa = a + terminal_length(a, a_next) * (a_next - a) / std::abs(a_next - a);
  const Complex pb = b + terminal_length(b, b_prev) * (b_prev - b) / std::abs(b_prev - b);

  // Middle polyline from pa to pb, refined for sheet tracking.
  std::vector<Complex> corners{pa};
  for (std::size_t k = 1; k + 1 < path.size(); ++k)
    if (path[k] != corners.back()) corners.push_back(path[k]);
  if (corners.size() > 1 && std::abs(corners[1] - pa) <= 1e-14 * q.scale()) corners.erase(corners.begin() + 1);
  if (std::abs(corners.back() - pb) > 1e-14 * q.scale()) corners.push_back(pb);
  if (corners.size() < 2) corners.push_back(pb);

  std::vector<Complex> track{corners.front()};
  for (std::size_t k = 0; k + 1 < corners.size(); ++k) refine_segment(q, corners[k], corners[k + 1], track);

  std::vector<Complex> full{a};
  full.insert(full.end(), track.begin(), track.end());
  full.push_back(b);
  const CutBranch cut(q, full);
  const std::vector<Complex> plus = cut.plus_values();

  const double tol = 1e-12 * q.scale();
  Complex sum{};
  for (std::size_t k = 1; k + 2 < full.size(); ++k) {
    const Complex u = full[k], v = full[k + 1], ref = plus[k];
    auto f = [&](double t) {
      const Complex z = u + t * (v - u);
      return nearest_sqrt(q.D(z), ref) / z * (v - u);
    };
    sum += integrate_adaptive(f, 0.0, 1.0, tol);
  }
  // Terminal pieces: z = end + (p - end) t^2 removes the square-root endpoint behaviour.
  auto terminal = [&](Complex end, Complex p, Complex ref) {
    auto f = [&](double t) {
      const Complex z = end + (p - end) * t * t;
      if (t == 0.0) return Complex{};
      return nearest_sqrt(q.D(z), ref) / z * (2.0 * t) * (p - end);
    };
    return integrate_adaptive(f, 0.0, 1.0, tol);
  };
  sum += terminal(a, full[1], plus[1]);
  sum -= terminal(b, full[full.size() - 2], plus[plus.size() - 2]);
  return sum;
}

PeriodResult period_check(const QDiff& q, std::span<const Complex> path) {
  PeriodResult out;
  out.value = period_integral(q, path);
  out.candidates = period_candidates(q);
  out.mismatch = INFINITY;
  for (int k = 0; k < 4; ++k) {
    const double d = std::abs(out.value - out.candidates[k]);
    if (d < out.mismatch) {
      out.mismatch = d;
      out.matched = k;
    }
  }
  return out;
}

Complex branch_from_origin(const QDiff& q, Sheet sheet, Complex z) {
  if (q.is_degenerate_zero()) throw Error(ErrorCode::Degenerate, "ab = 0: no branch value at the origin");
  const int n = 256;
  std::vector<Complex> path;
  path.reserve(n + 1);
  for (int k = 0; k <= n; ++k) path.push_back(z * (static_cast<double>(k) / n));
  const Complex seed = static_cast<double>(static_cast<int>(sheet)) * std::sqrt(q.a() * q.b());
  return continue_sqrt_D(q, path, seed).branch_values.back();
}

Complex circle_integral(const QDiff& q, Complex center, double radius, Complex seed) {
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be positive");
  auto rule = [&](int n) {
    std::vector<Complex> pts;
    pts.reserve(n + 1);
    for (int k = 0; k <= n; ++k) pts.push_back(center + std::polar(radius, kTwoPi * k / n));
    const BranchPath bp = continue_sqrt_D(q, pts, seed);
    if (std::abs(bp.branch_values.back() - seed) > 1e-8 * std::max(1.0, std::abs(seed)))
      throw Error(ErrorCode::Domain, "sqrt(D) is not single valued on the circle");
    Complex sum{};
    for (int k = 0; k < n; ++k) {
      const Complex z = pts[k];
      sum += bp.branch_values[k] / z * kI * (z - center);
    }
    return sum * (kTwoPi / n);
  };
  int n = 64;
  Complex prev = rule(n);
  while (n < (1 << 16)) {
    n *= 2;
    const Complex next = rule(n);
    if (std::abs(next - prev) <= 1e-14 * std::max(1.0, std::abs(next))) return next;
    prev = next;
  }
  return prev;
}

}  // namespace qd
