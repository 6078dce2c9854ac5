#include "qdiff/laguerre.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include <Eigen/Eigenvalues>

#include "qdiff/quadrature.hpp"

namespace qd {

namespace {

using LComplex = std::complex<long double>;

const Complex kI{0.0, 1.0};

struct RecurrenceValue {
  LComplex L;
  LComplex dL;  // d/dx
  int scale_exponent = 0;  // true values are L * 1e100^scale_exponent
};

// L_n^alpha(x) and its x-derivative, rescaled to stay in range.
RecurrenceValue laguerre_recurrence(int n, LComplex alpha, LComplex x) {
  constexpr long double kBig = 1e100L;
  LComplex l0 = 1.0L, d0 = 0.0L;
  if (n == 0) return {l0, d0, 0};
  LComplex l1 = 1.0L + alpha - x, d1 = -1.0L;
  int exponent = 0;
  for (int k = 1; k < n; ++k) {
    const long double kk = k;
    const LComplex c = 2.0L * kk + 1.0L + alpha - x;
    const LComplex l2 = (c * l1 - (kk + alpha) * l0) / (kk + 1.0L);
    const LComplex d2 = (c * d1 - l1 - (kk + alpha) * d0) / (kk + 1.0L);
    l0 = l1;
    l1 = l2;
    d0 = d1;
    d1 = d2;
    if (std::abs(l1) > kBig || std::abs(d1) > kBig) {
      l0 /= kBig;
      l1 /= kBig;
      d0 /= kBig;
      d1 /= kBig;
      ++exponent;
    }
  }
  return {l1, d1, exponent};
}

LComplex to_l(Complex z) { return {z.real(), z.imag()}; }
Complex to_d(LComplex z) {
  return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

std::vector<Complex> initial_guesses(const RescaledLaguerre& p) {
  const int n = p.degree;
  std::vector<Complex> z(n);
  if (n <= 60) {
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 1; i < n; ++i) c(i, i - 1) = 1.0;
    const Complex lead = p.coefficients[n];
    for (int i = 0; i < n; ++i) c(i, n - 1) = -p.coefficients[i] / lead;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(c, false);
    if (es.info() == Eigen::Success) {
      bool ok = true;
      for (int i = 0; i < n; ++i) {
        z[i] = es.eigenvalues()[i];
        ok = ok && is_finite(z[i]);
      }
      if (ok) return z;
    }
  }
  const auto [a, b] = laguerre_zeros(p.A);
  const Complex center = 0.5 * (a + b);
  const double radius = 1.2 * std::max(0.5 * std::abs(a - b), 1.0);
  for (int k = 0; k < n; ++k) z[k] = center + radius * std::exp(kI * (kTwoPi * (k + 0.25) / n));
  return z;
}

double segment_distance(Complex p, Complex s0, Complex s1) {
  const Complex d = s1 - s0;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(p - s0);
  const double t = std::clamp(std::real((p - s0) * std::conj(d)) / len2, 0.0, 1.0);
  return std::abs(p - (s0 + t * d));
}

std::size_t nearest_segment(const std::vector<Complex>& poly, Complex z) {
  std::size_t best = 0;
  double best_d = INFINITY;
  for (std::size_t k = 0; k + 1 < poly.size(); ++k) {
    const double d = segment_distance(z, poly[k], poly[k + 1]);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

// sqrt(D) at a point of the support, taken from the left side.
Complex plus_root(const AlgebraicBranch& br, Complex z) {
  const auto& path = br.support();
  const std::size_t k = nearest_segment(path, z);
  const Complex t = (path[k + 1] - path[k]) / std::abs(path[k + 1] - path[k]);
  const QDiff& q = br.differential();
  const double room = std::min({std::abs(path[k + 1] - path[k]), std::abs(z - q.a()),
                                std::abs(z - q.b()), std::abs(z)});
  const Complex off = z + 1e-3 * room * kI * t;
  return nearest_sqrt(q.D(z), br.cut().value(off));
}

// Root of z h^2 + (A - z) h + 1 = 0 picked by s = sqrt(D), written to avoid cancellation.
Complex h_from_root(Complex A, Complex z, Complex s) {
  const Complex w = z - A;
  if (std::abs(w + s) >= std::abs(w - s)) return 2.0 / (w + s);
  return (w - s) / (2.0 * z);
}

QDiff laguerre_differential(Complex A) {
  require_finite(A, "A");
  const auto [a, b] = laguerre_zeros(A);
  QDiff q(a, b);
  if (q.is_degenerate_equal() || q.is_degenerate_zero())
    throw Error(ErrorCode::Degenerate, "A = 0 or A = -1 gives a degenerate discriminant");
  return q;
}

std::vector<Complex> select_support(const QDiff& q, const TraceConfig& cfg, Complex& mass) {
  if (criterion_reality(q).cls == CriterionClass::Neither)
    throw Error(ErrorCode::Domain, "no critical trajectory joins the zeros");
  const ArcSet set = trace_all_from_zeros(q, cfg, TrajectoryKind::Horizontal);
  std::vector<Complex> best;
  double best_gap = INFINITY;
  for (const Arc& arc : set.arcs) {
    if (arc.termination.tag != Termination::ShortTrajectory) continue;
    std::vector<Complex> path = arc.samples;
    if (arc.origin.zero == static_cast<int>(ZeroId::B)) std::reverse(path.begin(), path.end());
    const Complex m = period_integral(q, path) / (kTwoPi * kI);
    if (std::abs(m - 1.0) < best_gap) {
      best_gap = std::abs(m - 1.0);
      best = std::move(path);
      mass = m;
    }
  }
  if (best.empty() || best_gap > 1e-6)
    throw Error(ErrorCode::Domain, "no traced critical arc carries unit mass");
  return best;
}

}  // namespace

std::pair<Complex, Complex> RescaledLaguerre::evaluate(Complex z) const {
  const RecurrenceValue r = laguerre_recurrence(n, to_l(static_cast<double>(n) * A),
                                                to_l(static_cast<double>(n) * z));
  const long double s = std::pow(1e100L, r.scale_exponent);
  return {to_d(r.L * s), to_d(r.dL * s * static_cast<long double>(n))};
}

double RescaledLaguerre::magnitude(Complex z) const {
  long double sum = 0.0L, zk = 1.0L;
  const long double r = std::abs(z);
  for (const Complex& c : coefficients) {
    sum += std::abs(c) * zk;
    zk *= r;
  }
  return static_cast<double>(sum);
}

RescaledLaguerre build_polynomial(int n, Complex A) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be positive");
  require_finite(A, "A");
  RescaledLaguerre p;
  p.n = n;
  p.A = A;
  p.degree = n;
  const Complex x = static_cast<double>(n) + static_cast<double>(n) * A;

  // binom[m] = C(x, m) as a falling-factorial product.
  std::vector<Complex> binom(n + 1);
  binom[0] = 1.0;
  for (int m = 0; m < n; ++m) binom[m + 1] = binom[m] * (x - static_cast<double>(m)) / (m + 1.0);

  p.coefficients.resize(n + 1);
  p.raw_coefficients.resize(n + 1);
  double raw = 1.0, scaled = 1.0;  // (-1)^k / k!, (-n)^k / k!
  for (int k = 0; k <= n; ++k) {
    if (k > 0) {
      raw *= -1.0 / k;
      scaled *= -static_cast<double>(n) / k;
    }
    p.raw_coefficients[k] = binom[n - k] * raw;
    p.coefficients[k] = binom[n - k] * scaled;
    if (!is_finite(p.coefficients[k]) || !is_finite(p.raw_coefficients[k]))
      throw Error(ErrorCode::Domain, "coefficient overflow at n = " + std::to_string(n));
  }
  return p;
}

RootMeasure roots(const RescaledLaguerre& p) {
  const int n = p.degree;
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "degree must be at least one");
  RootMeasure out;
  out.weight = 1.0 / n;

  std::vector<LComplex> z;
  if (n == 1) {
    z.push_back(to_l(-p.coefficients[0] / p.coefficients[1]));
  } else {
    for (Complex g : initial_guesses(p)) z.push_back(to_l(g));
    const LComplex alpha = to_l(static_cast<double>(n) * p.A);
    const long double nn = n;
    constexpr int kBudget = 500;
    double best = INFINITY;
    int stalled = 0;
    for (out.iterations = 1; out.iterations <= kBudget; ++out.iterations) {
      double step = 0.0;
      for (int k = 0; k < n; ++k) {
        const RecurrenceValue r = laguerre_recurrence(n, alpha, nn * z[k]);
        if (r.L == 0.0L) continue;
        const LComplex ratio = r.L / (r.dL * nn);
        LComplex s = 0.0L;
        for (int j = 0; j < n; ++j)
          if (j != k) s += 1.0L / (z[k] - z[j]);
        const LComplex w = ratio / (1.0L - ratio * s);
        z[k] -= w;
        step = std::max(step, static_cast<double>(std::abs(w) / std::max(1.0L, std::abs(z[k]))));
      }
      if (step < 1e-17) break;
      // cancellation in p bounds the attainable accuracy; stop once steps stop shrinking
      if (step < 0.5 * best) {
        best = step;
        stalled = 0;
      } else if (best < 1e-6 && ++stalled > 20) {
        break;
      }
    }
    out.iterations = std::min(out.iterations, kBudget);
  }

  for (const LComplex& r : z) out.roots.push_back(to_d(r));
  std::sort(out.roots.begin(), out.roots.end(), [](Complex u, Complex v) {
    return u.real() != v.real() ? u.real() < v.real() : u.imag() < v.imag();
  });
  for (Complex r : out.roots) {
    const double res = is_finite(r) ? std::abs(p.evaluate(r).first) / p.magnitude(r) : INFINITY;
    out.max_residual = std::max(out.max_residual, std::isnan(res) ? INFINITY : res);
  }
  out.converged = out.max_residual < kRootResidualTol;
  if (!out.converged)
    out.failure = "residual " + std::to_string(out.max_residual) + " after " +
                  std::to_string(out.iterations) + " iterations";
  return out;
}

Complex empirical_cauchy(const RootMeasure& m, Complex z) {
  require_finite(z, "z");
  if (m.roots.empty()) throw Error(ErrorCode::InvalidArgument, "empty measure");
  Complex sum{};
  for (Complex r : m.roots) {
    if (std::abs(z - r) < 1e-9) throw Error(ErrorCode::PoleProximity, "z is within 1e-9 of a root");
    sum += 1.0 / (z - r);
  }
  return sum * m.weight;
}

std::pair<Complex, Complex> laguerre_zeros(Complex A) {
  const Complex r = 2.0 * std::sqrt(A + 1.0);
  return {A + 2.0 + r, A + 2.0 - r};
}

AlgebraicBranch::AlgebraicBranch(Complex A, const TraceConfig& cfg)
    : A_(A), q_(laguerre_differential(A)), mass_(), cut_(q_, select_support(q_, cfg, mass_)) {}

HValue algebraic_h(const AlgebraicBranch& branch, Complex z) {
  require_finite(z, "z");
  if (z == Complex{}) throw Error(ErrorCode::Domain, "h has a pole at the origin");
  const QDiff& q = branch.differential();
  HValue out;
  if (distance_to_polyline(z, branch.support()) <= 1e-9 * q.scale()) {
    out.on_cut = true;
    const Complex s = plus_root(branch, z);
    out.h_plus = h_from_root(branch.A(), z, s);
    out.h_minus = h_from_root(branch.A(), z, -s);
    return out;
  }
  out.h = h_from_root(branch.A(), z, branch.cut().value(z));
  return out;
}

Complex asymptotic_alpha(const AlgebraicBranch& branch) {
  const Complex z = 1e12 * branch.differential().scale() * std::exp(kI * 0.3);
  return z * algebraic_h(branch, z).h;
}

DensitySample motherbody_density(const AlgebraicBranch& branch, Complex z) {
  require_finite(z, "z");
  const QDiff& q = branch.differential();
  const double tol = 1e-12 * q.scale();
  if (std::abs(z - q.a()) <= tol || std::abs(z - q.b()) <= tol) return {};
  const auto& path = branch.support();
  if (distance_to_polyline(z, path) > 1e-6 * q.scale())
    throw Error(ErrorCode::Domain, "point is not on the support arc");
  const std::size_t k = nearest_segment(path, z);
  const Complex u = path[k], v = path[k + 1];
  const Complex s = plus_root(branch, z);

  // Pointwise density along the trajectory direction, oriented like the support.
  Complex t = kI * z / s;
  t /= std::abs(t);
  if (std::real(t * std::conj(v - u)) < 0.0) t = -t;
  DensitySample out;
  out.density = std::imag(s / z * t) / kTwoPi;

  // The jump integrated over the enclosing segment should be real.
  const Complex ref = plus_root(branch, 0.5 * (u + v));
  auto f = [&](double x) {
    const Complex w = u + x * (v - u);
    return nearest_sqrt(q.D(w), ref) / w;
  };
  const Complex jump = GaussLegendre16::instance().integrate(f, 0.0, 1.0) * (v - u) / (kTwoPi * kI);
  out.imag_residue = jump.imag() / std::abs(v - u);
  return out;
}

std::vector<Complex> standard_probes(const AlgebraicBranch& branch) {
  const auto& path = branch.support();
  Complex centroid{};
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    const double len = std::abs(path[k + 1] - path[k]);
    centroid += 0.5 * (path[k] + path[k + 1]) * len;
    total += len;
  }
  centroid /= total;
  const QDiff& q = branch.differential();
  const double radius = 2.0 * std::max({std::abs(q.a()), std::abs(q.b()), 1.0});
  std::vector<Complex> out;
  for (int j = 0; j < 8; ++j) out.push_back(centroid + radius * std::exp(kI * (kTwoPi * j / 8)));
  return out;
}

ConvergenceReport convergence_report(Complex A, const std::vector<int>& ns,
                                     std::vector<Complex> probes, const TraceConfig& cfg) {
  const AlgebraicBranch branch(A, cfg);
  ConvergenceReport rep;
  rep.A = A;
  rep.ns = ns;
  rep.probes = probes.empty() ? standard_probes(branch) : std::move(probes);
  rep.support = branch.support();
  rep.mass = branch.mass();
  rep.alpha = asymptotic_alpha(branch);

  std::vector<Complex> h;
  for (Complex z : rep.probes) {
    rep.probe_support_distance.push_back(distance_to_polyline(z, rep.support));
    h.push_back(algebraic_h(branch, z).h);
  }

  std::vector<std::future<RootMeasure>> jobs;
  for (int n : ns)
    jobs.push_back(std::async(std::launch::async, [n, A] { return roots(build_polynomial(n, A)); }));
  for (auto& j : jobs) rep.measures.push_back(j.get());

  for (const RootMeasure& m : rep.measures) {
    std::vector<double> row;
    for (std::size_t j = 0; j < rep.probes.size(); ++j)
      row.push_back(std::abs(empirical_cauchy(m, rep.probes[j]) - h[j]));
    rep.errors.push_back(std::move(row));
    double far = 0.0;
    for (Complex r : m.roots) far = std::max(far, distance_to_polyline(r, rep.support));
    rep.root_support_distance.push_back(far);
  }

  rep.monotone = true;
  for (std::size_t j = 0; j < rep.probes.size(); ++j) {
    bool dec = true;
    for (std::size_t i = 1; i < rep.errors.size(); ++i) dec = dec && rep.errors[i][j] < rep.errors[i - 1][j];
    rep.probe_monotone.push_back(dec);
    rep.monotone = rep.monotone && dec;
  }
  return rep;
}

}  // namespace qd
