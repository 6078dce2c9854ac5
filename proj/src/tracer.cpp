#include "qdiff/tracer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <future>

#include "qdiff/quadrature.hpp"

namespace qd {

namespace {

const Complex kI{0.0, 1.0};

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

// Unit-speed direction field with sqrt(D) taken on the sheet of `ref`.
struct Field {
  const QDiff& q;
  TrajectoryKind kind;
  double sign;

  Complex operator()(Complex z, Complex ref) const {
    const Complex s = nearest_sqrt(q.D(z), ref);
    const Complex u = kind == TrajectoryKind::Horizontal ? kI * z / s : z / s;
    return sign * u / std::abs(u);
  }
};

double level_component(Complex f, TrajectoryKind kind) {
  return kind == TrajectoryKind::Horizontal ? f.real() : f.imag();
}

// Integral of sqrt(D)/z over the straight chord [z0, z1]; `ref` fixes the sheet.
Complex chord_integral(const QDiff& q, Complex z0, Complex z1, Complex ref) {
  const Complex dz = z1 - z0;
  auto f = [&](double t) {
    const Complex z = z0 + t * dz;
    return nearest_sqrt(q.D(z), ref) / z;
  };
  return GaussLegendre16::instance().integrate(f, 0.0, 1.0) * dz;
}

// Distance from the nearest critical point of the finite plane.
double critical_distance(const QDiff& q, Complex z) {
  double d = std::abs(z);
  if (q.is_zero_of_differential(ZeroId::A)) d = std::min(d, std::abs(z - q.a()));
  if (q.is_zero_of_differential(ZeroId::B)) d = std::min(d, std::abs(z - q.b()));
  return d;
}

double segment_distance(Complex p, Complex s0, Complex s1) {
  const Complex d = s1 - s0;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(p - s0);
  const double t = std::clamp(std::real((p - s0) * std::conj(d)) / len2, 0.0, 1.0);
  return std::abs(p - (s0 + t * d));
}

struct Integrator {
  const QDiff& q;
  TraceConfig cfg;
  TrajectoryKind kind;

  // Runs from (z, s) with field sign `sign`; appends accepted points to arc.
  void run(Arc& arc, Complex z, Complex s, double sign, TerminationDetector& detector) const {
    Field field{q, kind, sign};
    double h = std::max(1e-3 * critical_distance(q, z), 1e-14);
    double level = 0.0;
    double max_drift = 0.0;
    double length = 0.0;
    std::size_t accepted = 0;

    Complex k1 = field(z, s);
    while (true) {
      const double h_cap = 0.2 * critical_distance(q, z);
      h = std::min(h, h_cap);

      const Complex k2 = field(z + h * (a21 * k1), s);
      const Complex k3 = field(z + h * (a31 * k1 + a32 * k2), s);
      const Complex k4 = field(z + h * (a41 * k1 + a42 * k2 + a43 * k3), s);
      const Complex k5 = field(z + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), s);
      const Complex k6 = field(z + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), s);
      Complex z_new = z + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const Complex k7 = field(z_new, s);
      const Complex err_vec = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const double scale = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(z), std::abs(z_new));
      const double err = std::abs(err_vec) / scale;

      if (err > 1.0) {
        h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
        if (h < 1e-15 * std::max(1.0, std::abs(z)))
          throw Error(ErrorCode::Convergence, "step size underflow while tracing");
        continue;
      }

      Complex s_new = nearest_sqrt(q.D(z_new), s);
      if (s != Complex{} && s_new != Complex{} && std::abs(std::arg(s_new / s)) >= kPi / 2)
        throw Error(ErrorCode::Continuation, "sqrt(D) changed sheet during a step");

      Complex delta = chord_integral(q, z, z_new, s);
      if (cfg.project_level) {
        // One Newton correction back onto the level set through the start point.
        const double miss = level + level_component(delta, kind);
        const Complex deriv = s_new / z_new;
        const double d2 = std::norm(deriv);
        if (d2 > 0.0) {
          Complex corr = -miss * std::conj(deriv) / d2;
          if (kind == TrajectoryKind::Vertical) corr *= kI;
          if (std::abs(corr) <= 0.1 * h) {
            z_new += corr;
            s_new = nearest_sqrt(q.D(z_new), s);
            delta = chord_integral(q, z, z_new, s);
          }
        }
      }
      level += level_component(delta, kind);
      max_drift = std::max(max_drift, std::abs(level));
      length += std::abs(z_new - z);
      ++accepted;

      arc.samples.push_back(z_new);
      arc.branch_values.push_back(s_new);
      z = z_new;
      s = s_new;
      k1 = field(z, s);  // no FSAL reuse: the projection moved the point

      if (auto t = detector.observe(z)) {
        arc.termination = *t;
        break;
      }
      h *= std::min(5.0, 0.9 * std::pow(std::max(err, 1e-10), -0.2));
    }
    arc.level = level;
    arc.max_level_drift = max_drift;
    arc.length += length;
    arc.steps = accepted;
  }
};

// Perpendicular miss distance of `target` from the final approach line.
double closing_gap(const Arc& arc, Complex target) {
  const auto& s = arc.samples;
  if (s.size() < 2) return std::abs(s.back() - target);
  const Complex p = s[s.size() - 1];
  const Complex d = p - s[s.size() - 2];
  if (std::abs(d) == 0.0) return std::abs(p - target);
  return std::abs(std::imag((target - p) * std::conj(d))) / std::abs(d);
}

void finish_at_zero(const QDiff& q, Arc& arc) {
  auto& t = arc.termination;
  if (t.tag != Termination::ShortTrajectory && t.tag != Termination::Loop) return;
  const Complex target = q.zero(static_cast<ZeroId>(t.endpoint_zero));
  t.closing_gap = closing_gap(arc, target);
  arc.length += std::abs(target - arc.samples.back());
  arc.samples.push_back(target);
  arc.branch_values.push_back(Complex{});
}

}  // namespace

const char* to_string(Termination t) {
  switch (t) {
    case Termination::ShortTrajectory: return "ShortTrajectory";
    case Termination::Loop: return "Loop";
    case Termination::SpiralToOrigin: return "SpiralToOrigin";
    case Termination::RadialToOrigin: return "RadialToOrigin";
    case Termination::EscapeToInfinity: return "EscapeToInfinity";
    case Termination::StepBudgetExceeded: return "StepBudgetExceeded";
  }
  return "?";
}

const char* to_string(EscapeDirection d) {
  switch (d) {
    case EscapeDirection::None: return "none";
    case EscapeDirection::PlusImag: return "+i";
    case EscapeDirection::MinusImag: return "-i";
    case EscapeDirection::PlusReal: return "+1";
    case EscapeDirection::MinusReal: return "-1";
  }
  return "?";
}

bool is_critical(const TerminationRecord& t) {
  return t.tag == Termination::ShortTrajectory || t.tag == Termination::Loop;
}

bool is_origin_bound(const TerminationRecord& t) {
  return t.tag == Termination::SpiralToOrigin || t.tag == Termination::RadialToOrigin;
}

TraceConfig TraceConfig::resolved(const QDiff& q) const {
  TraceConfig c = *this;
  const double sep = std::abs(q.a() - q.b());
  const double base = std::max(1.0, sep);
  if (c.launch_offset <= 0.0) {
    c.launch_offset = 1e-6 * base;
    if (!q.is_degenerate_equal()) c.launch_offset = std::min(c.launch_offset, 1e-3 * sep);
  }
  if (c.eps_hit <= 0.0) {
    c.eps_hit = 1e-5 * base;
    if (!q.is_degenerate_equal()) c.eps_hit = std::min(c.eps_hit, 1e-2 * sep);
  }
  if (c.r_max <= 0.0) c.r_max = 20.0 * q.scale();
  if (c.r_min <= 0.0) {
    double m = 1.0;
    if (q.a() != Complex{}) m = std::min(m, std::abs(q.a()));
    if (q.b() != Complex{}) m = std::min(m, std::abs(q.b()));
    c.r_min = 1e-8 * m;
  }
  return c;
}

TerminationDetector::TerminationDetector(const QDiff& q, const TraceConfig& cfg, TrajectoryKind kind,
                                         Complex start, int launch_zero)
    : q_(q), cfg_(cfg), kind_(kind), launch_zero_(launch_zero), prev_(start) {
  left_launch_ = launch_zero < 0;
}

int TerminationDetector::winding() const {
  return static_cast<int>(std::lround(turning_ / kTwoPi));
}

std::optional<TerminationRecord> TerminationDetector::hit_zero(Complex z, int id) const {
  const auto zid = static_cast<ZeroId>(id);
  if (!q_.is_zero_of_differential(zid)) return std::nullopt;
  const Complex z0 = q_.zero(zid);
  if (segment_distance(z0, prev_, z) >= cfg_.eps_hit) return std::nullopt;
  TerminationRecord r;
  if (id == launch_zero_ || (q_.is_degenerate_equal() && launch_zero_ >= 0)) {
    if (!left_launch_) return std::nullopt;
    r.tag = Termination::Loop;
    r.endpoint_zero = launch_zero_;
    r.winding = winding();
  } else {
    r.tag = Termination::ShortTrajectory;
    r.endpoint_zero = id;
    r.winding = winding();
  }
  return r;
}

std::optional<TerminationRecord> TerminationDetector::observe(Complex z) {
  if (fired_) return std::nullopt;
  ++steps_;
  if (prev_ != Complex{} && z != Complex{}) turning_ += std::arg(z / prev_);

  if (!left_launch_) {
    const Complex z0 = q_.zero(static_cast<ZeroId>(launch_zero_));
    if (std::abs(z - z0) > 10.0 * cfg_.eps_hit) left_launch_ = true;
  }

  std::optional<TerminationRecord> out;
  const int zero_count = q_.is_degenerate_equal() ? 1 : 2;
  for (int id = 0; id < zero_count && !out; ++id) out = hit_zero(z, id);

  const double r = std::abs(z);
  if (!out && r < cfg_.r_min) {
    TerminationRecord t;
    t.winding = static_cast<int>(turning_ / kTwoPi);
    t.tag = std::abs(turning_) < kTwoPi ? Termination::RadialToOrigin : Termination::SpiralToOrigin;
    out = t;
  }
  if (!out && r > cfg_.r_max) {
    TerminationRecord t;
    t.tag = Termination::EscapeToInfinity;
    t.winding = winding();
    if (kind_ == TrajectoryKind::Horizontal)
      t.escape = z.imag() >= 0.0 ? EscapeDirection::PlusImag : EscapeDirection::MinusImag;
    else
      t.escape = z.real() >= 0.0 ? EscapeDirection::PlusReal : EscapeDirection::MinusReal;
    out = t;
  }
  if (!out) {
    // Log-spiral test: three further turns with monotone shrinking radius and
    // an overall contraction by 4.
    const int turns = static_cast<int>(std::abs(turning_) / kTwoPi);
    while (checkpoint_turns_ < turns) {
      ++checkpoint_turns_;
      if (!checkpoint_radius_.empty() && r >= checkpoint_radius_.back())
        run_start_ = checkpoint_radius_.size();
      checkpoint_radius_.push_back(r);
    }
    const std::size_t n = checkpoint_radius_.size();
    if (n >= run_start_ + 4 && checkpoint_radius_.back() * 4.0 <= checkpoint_radius_[run_start_]) {
      TerminationRecord t;
      t.tag = Termination::SpiralToOrigin;
      t.winding = static_cast<int>(turning_ / kTwoPi);
      out = t;
    }
  }
  if (!out && steps_ >= cfg_.step_budget) {
    TerminationRecord t;
    t.tag = Termination::StepBudgetExceeded;
    t.winding = winding();
    out = t;
  }
  prev_ = z;
  if (out) fired_ = true;
  return out;
}

Arc trace(const QDiff& q, Complex seed, Complex direction, TrajectoryKind kind,
          const TraceConfig& cfg_in) {
  require_finite(seed, "seed");
  require_finite(direction, "direction");
  if (std::abs(direction) == 0.0) throw Error(ErrorCode::InvalidArgument, "direction must be nonzero");
  const TraceConfig cfg = cfg_in.resolved(q);
  const Complex d = q.D(seed);
  if (seed == Complex{} || d == Complex{})
    throw Error(ErrorCode::Domain, "the field vanishes or is singular at the seed");

  const Complex s = std::sqrt(d);
  const Complex u = kind == TrajectoryKind::Horizontal ? kI * seed / s : seed / s;
  const Complex unit_dir = direction / std::abs(direction);
  const double sign = std::real(u * std::conj(unit_dir)) >= 0.0 ? 1.0 : -1.0;
  if (std::abs(std::arg(sign * u * std::conj(unit_dir))) > kPi / 4)
    throw Error(ErrorCode::InvalidArgument, "direction is not within pi/4 of the trajectory field");

  Arc arc;
  arc.kind = kind;
  arc.origin.point = seed;
  arc.launch_angle = std::arg(unit_dir);
  arc.samples.push_back(seed);
  arc.branch_values.push_back(s);
  // a seed inside the hit radius of a zero counts as launched from it
  int near = -1;
  for (int id = 0; id < 2; ++id) {
    const auto zid = static_cast<ZeroId>(id);
    if (q.is_zero_of_differential(zid) && std::abs(seed - q.zero(zid)) < cfg.eps_hit) near = id;
  }
  arc.origin.zero = near;
  TerminationDetector detector(q, cfg, kind, seed, near);
  Integrator{q, cfg, kind}.run(arc, seed, s, sign, detector);
  finish_at_zero(q, arc);
  return arc;
}

Arc trace_from_zero(const QDiff& q, ZeroId zero, int ray, TrajectoryKind kind,
                    const TraceConfig& cfg_in) {
  const TraceConfig cfg = cfg_in.resolved(q);
  const auto angles = launch_directions(q, zero, kind);
  if (ray < 0 || ray >= static_cast<int>(angles.size()))
    throw Error(ErrorCode::InvalidArgument, "ray index out of range");
  const double theta = angles[ray];
  const Complex z0 = q.zero(zero);
  const Complex e = std::polar(1.0, theta);
  const Complex start = z0 + cfg.launch_offset * e;

  const Complex s = std::sqrt(q.D(start));
  const Complex u = kind == TrajectoryKind::Horizontal ? kI * start / s : start / s;
  const double sign = std::real(u * std::conj(e)) >= 0.0 ? 1.0 : -1.0;

  Arc arc;
  arc.kind = kind;
  arc.origin = {true, static_cast<int>(zero), ray, z0};
  arc.launch_angle = theta;
  arc.samples = {z0, start};
  arc.branch_values = {Complex{}, s};
  arc.length = cfg.launch_offset;
  TerminationDetector detector(q, cfg, kind, start, static_cast<int>(zero));
  Integrator{q, cfg, kind}.run(arc, start, s, sign, detector);
  finish_at_zero(q, arc);
  return arc;
}

double distance_to_polyline(Complex z, const std::vector<Complex>& poly) {
  if (poly.empty()) return INFINITY;
  if (poly.size() == 1) return std::abs(z - poly[0]);
  double best = INFINITY;
  for (std::size_t k = 0; k + 1 < poly.size(); ++k)
    best = std::min(best, segment_distance(z, poly[k], poly[k + 1]));
  return best;
}

double hausdorff(const std::vector<Complex>& p, const std::vector<Complex>& r) {
  auto one_sided = [](const std::vector<Complex>& from, const std::vector<Complex>& to) {
    double worst = 0.0;
    const std::size_t stride = std::max<std::size_t>(1, from.size() / 400);
    for (std::size_t k = 0; k < from.size(); k += stride)
      worst = std::max(worst, distance_to_polyline(from[k], to));
    if (!from.empty()) worst = std::max(worst, distance_to_polyline(from.back(), to));
    return worst;
  };
  return std::max(one_sided(p, r), one_sided(r, p));
}

double level_drift(const QDiff& q, const Arc& arc) {
  double running = 0.0;
  double worst = 0.0;
  const auto& z = arc.samples;
  const auto& s = arc.branch_values;
  for (std::size_t k = 0; k + 1 < z.size(); ++k) {
    const Complex ref = s[k] != Complex{} ? s[k] : s[k + 1];
    running += level_component(chord_integral(q, z[k], z[k + 1], ref), arc.kind);
    worst = std::max(worst, std::abs(running));
  }
  return worst;
}

ArcSet trace_all_from_zeros(const QDiff& q, const TraceConfig& cfg, TrajectoryKind kind) {
  struct Job {
    ZeroId zero;
    int ray;
    double angle;
  };
  std::vector<Job> jobs;
  const int zero_count = q.is_degenerate_equal() ? 1 : 2;
  for (int id = 0; id < zero_count; ++id) {
    const auto zid = static_cast<ZeroId>(id);
    if (!q.is_zero_of_differential(zid)) continue;
    const auto angles = launch_directions(q, zid, kind);
    for (int r = 0; r < static_cast<int>(angles.size()); ++r) jobs.push_back({zid, r, angles[r]});
  }

  std::vector<std::future<Arc>> pending;
  pending.reserve(jobs.size());
  for (const auto& j : jobs)
    pending.push_back(std::async(std::launch::async, [&q, &cfg, j, kind] {
      return trace_from_zero(q, j.zero, j.ray, kind, cfg);
    }));
  std::vector<Arc> traced;
  traced.reserve(jobs.size());
  for (auto& f : pending) traced.push_back(f.get());

  const double tol = 2e-2 * q.scale();
  ArcSet out;
  for (std::size_t k = 0; k < traced.size(); ++k) {
    Arc& arc = traced[k];
    LaunchRecord rec{static_cast<int>(jobs[k].zero), jobs[k].ray, jobs[k].angle, 0, false};
    bool merged = false;
    if (is_critical(arc.termination)) {
      for (std::size_t m = 0; m < out.arcs.size() && !merged; ++m) {
        const Arc& kept = out.arcs[m];
        if (!is_critical(kept.termination)) continue;
        // same curve traversed the other way: endpoints swapped
        if (kept.origin.zero != arc.termination.endpoint_zero ||
            kept.termination.endpoint_zero != arc.origin.zero)
          continue;
        if (kept.termination.tag != arc.termination.tag) continue;
        if (hausdorff(kept.samples, arc.samples) < tol) {
          rec.arc = m;
          rec.reversed = true;
          merged = true;
        }
      }
    }
    if (!merged) {
      rec.arc = out.arcs.size();
      out.arcs.push_back(std::move(arc));
    }
    out.launches.push_back(rec);
  }
  return out;
}

}  // namespace qd
