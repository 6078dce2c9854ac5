#include "qdiff/graph.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <map>
#include <numeric>
#include <random>
#include <thread>

namespace qd {

namespace {

const Complex kI{0.0, 1.0};

double wrap_2pi(double x) {
  x = std::fmod(x, kTwoPi);
  return x < 0.0 ? x + kTwoPi : x;
}

GraphVertex vertex_of_zero(const QDiff& q, int id) {
  const auto zid = static_cast<ZeroId>(id);
  if (!q.is_zero_of_differential(zid)) return GraphVertex::Origin;
  if (q.is_degenerate_equal()) return GraphVertex::A;
  return static_cast<GraphVertex>(id);
}

int vertex_order(const QDiff& q, GraphVertex v) {
  switch (v) {
    case GraphVertex::A:
    case GraphVertex::B: return q.is_degenerate_equal() ? 2 : 1;
    case GraphVertex::Origin: return q.is_degenerate_zero() ? -1 : -2;
    case GraphVertex::Infinity: return -4;
  }
  return 0;
}

Complex vertex_location(const QDiff& q, GraphVertex v) {
  switch (v) {
    case GraphVertex::A: return q.a();
    case GraphVertex::B: return q.b();
    default: return Complex{};
  }
}

struct HalfEdge {
  std::size_t arc;
  bool reversed;
  GraphVertex from;
  GraphVertex to;
  double angle;  // direction at `from` in that vertex's chart
};

// Tangent direction of a polyline leaving its first point.
double leaving_angle(const std::vector<Complex>& pts, bool from_back, double min_dist) {
  const std::size_t n = pts.size();
  const Complex z0 = from_back ? pts[n - 1] : pts[0];
  for (std::size_t k = 1; k < n; ++k) {
    const Complex z = from_back ? pts[n - 1 - k] : pts[k];
    if (std::abs(z - z0) >= min_dist) return wrap_2pi(std::arg(z - z0));
  }
  throw Error(ErrorCode::InsufficientResolution, "arc too short to measure its angle at a zero");
}

// Position of an arc reaching the origin among the trajectories that do:
// along each one, arg z - cot(phi/2) ln|z| is constant, phi = arg(ab).
double origin_phase(const QDiff& q, Complex z) {
  const double half = 0.5 * std::arg(q.a() * q.b());
  const double s = std::sin(half);
  if (q.is_degenerate_zero() || std::abs(s) < 1e-12) return wrap_2pi(std::arg(z));
  return wrap_2pi(std::arg(z) - std::cos(half) / s * std::log(std::abs(z)));
}

// Arc samples ending on the vertex: escapes are cut where they first cross
// |z| = r_max, so all of them are read off on one circle.
std::vector<Complex> edge_polyline(const Arc& arc, GraphVertex end, double r_max) {
  std::vector<Complex> pts = arc.samples;
  if (end == GraphVertex::Origin && pts.back() != Complex{}) pts.push_back(Complex{});
  if (end == GraphVertex::Infinity) {
    std::size_t k = 1;
    while (k < pts.size() && std::abs(pts[k]) <= r_max) ++k;
    if (k < pts.size()) {
      const Complex p = pts[k - 1], d = pts[k] - pts[k - 1];
      // |p + t d| = r_max on the segment
      const double A = std::norm(d), B = std::real(p * std::conj(d)), C = std::norm(p) - r_max * r_max;
      const double t = (-B + std::sqrt(std::max(0.0, B * B - A * C))) / A;
      pts.resize(k);
      pts.push_back(p + std::clamp(t, 0.0, 1.0) * d);
    }
  }
  return pts;
}

// Shortest distance from a zero to another critical point of the plane.
double isolation(const QDiff& q, GraphVertex v) {
  const Complex z = vertex_location(q, v);
  double d = std::abs(z);
  if (!q.is_degenerate_equal()) d = std::min(d, std::abs(q.a() - q.b()));
  return d;
}

double winding_about(const std::vector<Complex>& poly, Complex p) {
  double turn = 0.0;
  for (std::size_t k = 0; k + 1 < poly.size(); ++k) turn += std::arg((poly[k + 1] - p) / (poly[k] - p));
  return turn / kTwoPi;
}

double signed_area(const std::vector<Complex>& poly) {
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < poly.size(); ++k) s += std::imag(std::conj(poly[k]) * poly[k + 1]);
  return 0.5 * s;
}

}  // namespace

const char* to_string(CaseLabel c) {
  switch (c) {
    case CaseLabel::EqualZeros_Real: return "EqualZeros_Real";
    case CaseLabel::EqualZeros_Imaginary: return "EqualZeros_Imaginary";
    case CaseLabel::EqualZeros_Generic: return "EqualZeros_Generic";
    case CaseLabel::ZeroAtOrigin: return "ZeroAtOrigin";
    case CaseLabel::RealPair_SegmentPlusLoop: return "RealPair_SegmentPlusLoop";
    case CaseLabel::ConjugatePair_LoopThroughBoth: return "ConjugatePair_LoopThroughBoth";
    case CaseLabel::OneReality_SpiralPlusCritical: return "OneReality_SpiralPlusCritical";
    case CaseLabel::NoCritical_SpiralCases: return "NoCritical_SpiralCases";
  }
  return "?";
}

std::optional<CaseLabel> case_label_from_string(const std::string& s) {
  for (int k = 0; k <= static_cast<int>(CaseLabel::NoCritical_SpiralCases); ++k) {
    const auto c = static_cast<CaseLabel>(k);
    if (s == to_string(c)) return c;
  }
  return std::nullopt;
}

double teichmuller_sum(const PolygonFace& face) {
  double sum = 0.0;
  for (const FaceCorner& c : face.corners) sum += 1.0 - c.angle * (c.order + 2) / kTwoPi;
  return sum;
}

double teichmuller_expected(const PolygonFace& face) { return 2.0 + face.interior_order; }

std::vector<PolygonFace> extract_faces(const QDiff& q, const std::vector<Arc>& arcs,
                                       const TraceConfig& cfg) {
  const double r_max = cfg.resolved(q).r_max;
  const double base = 1e-4 * std::max(1.0, std::abs(q.a() - q.b()));

  std::vector<HalfEdge> half;
  std::vector<std::vector<Complex>> poly(arcs.size());
  for (std::size_t e = 0; e < arcs.size(); ++e) {
    const Arc& arc = arcs[e];
    if (arc.kind != TrajectoryKind::Horizontal)
      throw Error(ErrorCode::InvalidArgument, "faces are built from horizontal arcs");
    if (!arc.origin.from_zero) throw Error(ErrorCode::InvalidArgument, "arcs must start at a zero");
    const GraphVertex from = vertex_of_zero(q, arc.origin.zero);
    GraphVertex to;
    switch (arc.termination.tag) {
      case Termination::ShortTrajectory:
      case Termination::Loop: to = vertex_of_zero(q, arc.termination.endpoint_zero); break;
      case Termination::SpiralToOrigin:
      case Termination::RadialToOrigin: to = GraphVertex::Origin; break;
      case Termination::EscapeToInfinity: to = GraphVertex::Infinity; break;
      default: throw Error(ErrorCode::Domain, "an arc ended without a classified termination");
    }
    poly[e] = edge_polyline(arc, to, r_max);
    const double out_angle = leaving_angle(poly[e], false, std::min(base, 1e-4 * isolation(q, from)));
    double in_angle = 0.0;
    if (to == GraphVertex::Infinity)
      in_angle = wrap_2pi(-std::arg(poly[e].back()));  // u = 1/z chart
    else if (to == GraphVertex::Origin)
      in_angle = origin_phase(q, arc.samples.back());
    else
      in_angle = leaving_angle(poly[e], true, std::min(base, 1e-4 * isolation(q, to)));
    half.push_back({e, false, from, to, out_angle});
    half.push_back({e, true, to, from, in_angle});
  }

  // connected through shared vertices?
  {
    std::array<int, 4> parent{0, 1, 2, 3};
    auto find = [&](int v) {
      while (parent[v] != v) v = parent[v];
      return v;
    };
    std::array<bool, 4> used{};
    for (const HalfEdge& h : half) {
      used[static_cast<int>(h.from)] = true;
      parent[find(static_cast<int>(h.from))] = find(static_cast<int>(h.to));
    }
    int roots = 0;
    for (int v = 0; v < 4; ++v) roots += used[v] && find(v) == v;
    if (roots > 1) throw Error(ErrorCode::Domain, "critical graph is disconnected");
  }

  // rotation system: half-edges around each vertex by angle
  std::map<int, std::vector<std::size_t>> around;
  for (std::size_t h = 0; h < half.size(); ++h) around[static_cast<int>(half[h].from)].push_back(h);
  for (auto& [v, list] : around)
    std::sort(list.begin(), list.end(), [&](std::size_t x, std::size_t y) { return half[x].angle < half[y].angle; });
  auto twin = [](std::size_t h) { return h ^ 1u; };

  std::vector<bool> seen(half.size(), false);
  std::vector<PolygonFace> faces;
  for (std::size_t start = 0; start < half.size(); ++start) {
    if (seen[start]) continue;
    PolygonFace face;
    std::vector<Complex> outline;
    std::size_t h = start;
    do {
      seen[h] = true;
      face.edges.push_back({half[h].arc, half[h].reversed});
      std::vector<Complex> pts = poly[half[h].arc];
      if (half[h].reversed) std::reverse(pts.begin(), pts.end());

      // first clockwise from the twin keeps the face on the left
      const std::size_t t = twin(h);
      const GraphVertex v = half[t].from;
      const auto& list = around[static_cast<int>(v)];
      const std::size_t pos = std::find(list.begin(), list.end(), t) - list.begin();
      const std::size_t next = list[(pos + list.size() - 1) % list.size()];

      FaceCorner corner;
      corner.vertex = v;
      corner.location = vertex_location(q, v);
      corner.order = vertex_order(q, v);
      double theta = next == t ? kTwoPi : wrap_2pi(half[t].angle - half[next].angle);
      if (v == GraphVertex::Infinity) {
        // consecutive asymptotic directions at the order-4 pole are pi apart
        theta = kPi * std::round(theta / kPi);
        if (next == t) theta = kTwoPi;
      } else if (theta == 0.0) {
        throw Error(ErrorCode::InsufficientResolution, "two arcs leave a vertex in the same direction");
      }
      corner.angle = theta;
      face.corners.push_back(corner);

      outline.insert(outline.end(), pts.begin(), pts.end());
      if (v == GraphVertex::Infinity) {
        // close through the far circle, counter-clockwise in z
        std::vector<Complex> nxt = poly[half[next].arc];
        if (half[next].reversed) std::reverse(nxt.begin(), nxt.end());
        const Complex p1 = pts.back(), p2 = nxt.front();
        double sweep = wrap_2pi(std::arg(p2 / p1));
        if (next == t) sweep = kTwoPi;
        const int steps = std::max(2, static_cast<int>(std::ceil(sweep / 0.05)));
        for (int k = 1; k < steps; ++k) {
          const double s = static_cast<double>(k) / steps;
          const double r = (1.0 - s) * std::abs(p1) + s * std::abs(p2);
          outline.push_back(std::polar(r, std::arg(p1) + s * sweep));
        }
      }
      h = next;
    } while (h != start);
    outline.push_back(outline.front());

    for (const FaceCorner& c : face.corners)
      face.origin_on_boundary = face.origin_on_boundary || c.vertex == GraphVertex::Origin;
    if (!face.origin_on_boundary)
      face.contains_origin = std::lround(winding_about(outline, Complex{})) != 0;
    if (face.contains_origin) face.interior_order += vertex_order(q, GraphVertex::Origin);
    if (!around.count(static_cast<int>(GraphVertex::Infinity)) && signed_area(outline) < 0.0) {
      face.contains_infinity = true;
      face.interior_order += vertex_order(q, GraphVertex::Infinity);
    }
    faces.push_back(std::move(face));
  }
  return faces;
}

CriticalGraph classify_graph(const QDiff& q, const TraceConfig& cfg) {
  CriticalGraph g(q);
  g.config = cfg;
  ArcSet set = trace_all_from_zeros(q, cfg, TrajectoryKind::Horizontal);
  g.arcs = std::move(set.arcs);
  g.launches = std::move(set.launches);

  std::array<int, 2> origin_bound{0, 0};
  for (const Arc& arc : g.arcs) {
    const auto tag = arc.termination.tag;
    if (tag == Termination::ShortTrajectory) ++g.short_count;
    if (is_critical(arc.termination)) ++g.critical_count;
    if (tag == Termination::Loop && g.loop_zero < 0) g.loop_zero = arc.termination.endpoint_zero;
    if (is_origin_bound(arc.termination) && arc.origin.zero >= 0) ++origin_bound[arc.origin.zero];
  }
  g.critical_evidence = g.short_count > 0;

  if (!q.is_degenerate_zero()) {
    g.has_criterion = true;
    g.criterion = criterion_reality(q, cfg.crit_tol);
    g.ambiguous = g.criterion.boundary_ambiguous;
    const bool holds = g.criterion.cls != CriterionClass::Neither;
    if (!q.is_degenerate_equal()) g.agreement = holds == g.critical_evidence;
    g.guards.both_zeros_ok = !(holds && origin_bound[0] > 0 && origin_bound[1] > 0);
  }
  g.guards.same_zero_ok = origin_bound[0] <= 1 && origin_bound[1] <= 1;

  if (q.is_degenerate_equal()) {
    const double t = std::arg(q.a());
    const double off_real = std::abs(std::sin(t));
    const double off_imag = std::abs(std::cos(t));
    g.case_label = off_real < 1e-9   ? CaseLabel::EqualZeros_Real
                   : off_imag < 1e-9 ? CaseLabel::EqualZeros_Imaginary
                                     : CaseLabel::EqualZeros_Generic;
  } else if (q.is_degenerate_zero()) {
    g.case_label = CaseLabel::ZeroAtOrigin;
  } else if (g.short_count >= 1 && g.critical_count > g.short_count) {
    g.case_label = CaseLabel::RealPair_SegmentPlusLoop;
  } else if (g.short_count >= 2) {
    g.case_label = CaseLabel::ConjugatePair_LoopThroughBoth;
  } else if (g.short_count == 1) {
    g.case_label = CaseLabel::OneReality_SpiralPlusCritical;
  } else {
    g.case_label = CaseLabel::NoCritical_SpiralCases;
  }

  try {
    g.faces = extract_faces(q, g.arcs, cfg);
  } catch (const Error& e) {
    g.face_error = e.what();
  }
  return g;
}

const char* to_string(LocusShape s) {
  switch (s) {
    case LocusShape::Parabola: return "parabola";
    case LocusShape::PositiveRay: return "positive_ray";
    case LocusShape::NegativeRay: return "negative_ray";
  }
  return "?";
}

GammaLocus::GammaLocus(Complex a) : a_(a) {
  require_finite(a, "a");
  if (std::abs(a) < 1e-12) throw Error(ErrorCode::Degenerate, "the locus is degenerate for a = 0");
  root_ = std::sqrt(a);
  const bool real = std::abs(a.imag()) <= 1e-12 * std::abs(a);
  LocusBranch first{LocusShape::Parabola, false};
  LocusBranch second{LocusShape::Parabola, true};
  if (real && a.real() > 0.0) first.shape = LocusShape::PositiveRay;
  if (real && a.real() < 0.0) second.shape = LocusShape::NegativeRay;
  branches_ = {first, second};
}

Complex GammaLocus::point(int branch, double t) const {
  if (branch < 0 || branch > 1) throw Error(ErrorCode::InvalidArgument, "branch must be 0 or 1");
  const Complex shift = branches_[branch].imaginary_shift ? kI * t : Complex{t, 0.0};
  return (shift + root_) * (shift + root_);
}

double GammaLocus::parabola_x(int branch, double y) const {
  if (branch < 0 || branch > 1) throw Error(ErrorCode::InvalidArgument, "branch must be 0 or 1");
  const double p = root_.real(), q = root_.imag();
  if (branch == 0) {
    if (q == 0.0) throw Error(ErrorCode::Domain, "this branch is a ray, not a graph over y");
    const double t = (y - a_.imag()) / (2.0 * q);
    return a_.real() + 2.0 * t * p + t * t;
  }
  if (p == 0.0) throw Error(ErrorCode::Domain, "this branch is a ray, not a graph over y");
  const double t = (y - a_.imag()) / (2.0 * p);
  return a_.real() - 2.0 * t * q - t * t;
}

double GammaLocus::printed_parabola_x(int branch, double y) const {
  const double p = root_.real(), q = root_.imag();
  const double ty = y - a_.imag();
  if (branch == 0) return a_.real() + 2.0 * (ty / (2.0 * q)) * p + std::pow(ty / (2.0 * q), 2);
  return a_.real() - 2.0 * (ty / (2.0 * p)) * p - std::pow(ty / (2.0 * q), 2);
}

std::vector<LocusPoint> GammaLocus::sample(double x0, double x1, double y0, double y1,
                                           int per_branch) const {
  if (per_branch < 2) throw Error(ErrorCode::InvalidArgument, "need at least two samples per branch");
  const double reach = std::max({std::abs(x0), std::abs(x1), std::abs(y0), std::abs(y1)});
  const double span = std::sqrt(std::sqrt(2.0) * reach) + std::abs(root_) + 1.0;
  std::vector<LocusPoint> out;
  for (int br = 0; br < 2; ++br) {
    for (int k = 0; k < per_branch; ++k) {
      const double t = -span + 2.0 * span * k / (per_branch - 1);
      const Complex b = point(br, t);
      if (b.real() >= x0 && b.real() <= x1 && b.imag() >= y0 && b.imag() <= y1) out.push_back({br, t, b});
    }
  }
  return out;
}

double GammaLocus::distance(Complex b) const {
  const double span = std::sqrt(std::abs(b)) + std::abs(root_) + 2.0;
  double best = INFINITY;
  for (int br = 0; br < 2; ++br) {
    constexpr int kGrid = 400;
    const double h = 2.0 * span / kGrid;
    int arg = 0;
    double dmin = INFINITY;
    for (int k = 0; k <= kGrid; ++k) {
      const double d = std::abs(point(br, -span + h * k) - b);
      if (d < dmin) {
        dmin = d;
        arg = k;
      }
    }
    // golden-section refinement around the grid minimum
    double lo = -span + h * (arg - 1), hi = -span + h * (arg + 1);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 80; ++it) {
      const double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
      if (std::abs(point(br, m1) - b) < std::abs(point(br, m2) - b))
        hi = m2;
      else
        lo = m1;
    }
    best = std::min({best, dmin, std::abs(point(br, 0.5 * (lo + hi)) - b)});
  }
  return best;
}

GammaLocus gamma_locus(Complex a) { return GammaLocus(a); }

namespace {

// Walk the boundary of a cell with sqrt(b) continued along it and report
// which of Im((sqrt a +/- sqrt b)^2) vanishes or changes sign on the way.
CriterionClass cell_crossing(Complex a, Complex c0, double w, double h, double tau) {
  constexpr int kPerSide = 4;
  std::vector<Complex> tour;
  const std::array<Complex, 5> corners{c0, c0 + w, c0 + Complex{w, h}, c0 + kI * h, c0};
  for (int s = 0; s < 4; ++s)
    for (int k = 0; k < kPerSide; ++k)
      tour.push_back(corners[s] + (corners[s + 1] - corners[s]) * (static_cast<double>(k) / kPerSide));
  tour.push_back(c0);

  const Complex ra = std::sqrt(a);
  const double norm = std::abs(a) + std::abs(c0) + std::abs(w) + std::abs(h);
  const double tol = tau * norm;
  Complex rb = std::sqrt(tour[0]);
  auto values = [&](Complex r) {
    return std::pair{std::imag((ra + r) * (ra + r)), std::imag((ra - r) * (ra - r))};
  };
  auto [p0, m0] = values(rb);
  bool plus = std::abs(p0) < tol, minus = std::abs(m0) < tol;
  for (std::size_t k = 1; k < tour.size(); ++k) {
    rb = nearest_sqrt(tour[k], rb);
    auto [p, m] = values(rb);
    plus = plus || std::abs(p) < tol || (p > 0.0) != (p0 > 0.0);
    minus = minus || std::abs(m) < tol || (m > 0.0) != (m0 > 0.0);
    p0 = p;
    m0 = m;
  }
  if (plus && minus) return CriterionClass::BothReal;
  if (!plus && !minus) return CriterionClass::Neither;

  // name the crossing branch after the principal sqrt(ab) at the tour start
  const Complex mine = ra * std::sqrt(tour[0]);
  const Complex principal = std::sqrt(a * tour[0]);
  const bool aligned = std::abs(mine - principal) <= std::abs(mine + principal);
  if (plus == aligned) return CriterionClass::PlusReal;
  return CriterionClass::MinusReal;
}

}  // namespace

SurveyGrid survey(Complex a, const Region& region, int resolution, const SurveyOptions& opts) {
  require_finite(a, "a");
  if (resolution < 2) throw Error(ErrorCode::InvalidArgument, "resolution must be at least 2");
  if (!(region.x1 > region.x0) || !(region.y1 > region.y0))
    throw Error(ErrorCode::InvalidArgument, "region must have positive extent");
  SurveyGrid grid;
  grid.a = a;
  grid.region = region;
  grid.nx = grid.ny = resolution;
  grid.cells.resize(static_cast<std::size_t>(resolution) * resolution);
  const double w = grid.cell_width(), h = grid.cell_height();

  const unsigned workers = std::max(1u, std::min(16u, std::thread::hardware_concurrency()));
  std::vector<std::future<void>> jobs;
  for (unsigned wk = 0; wk < workers; ++wk) {
    jobs.push_back(std::async(std::launch::async, [&, wk] {
      for (int j = static_cast<int>(wk); j < grid.ny; j += static_cast<int>(workers)) {
        for (int i = 0; i < grid.nx; ++i) {
          SurveyCell& cell = grid.cells[static_cast<std::size_t>(j) * grid.nx + i];
          const Complex c0{region.x0 + i * w, region.y0 + j * h};
          cell.b = c0 + 0.5 * Complex{w, h};
          cell.cls = cell_crossing(a, c0, w, h, opts.trace.crit_tol);
        }
      }
    }));
  }
  for (auto& j : jobs) j.get();

  if (opts.trace_samples > 0 && std::abs(a) > 0.0) {
    std::vector<std::size_t> order(grid.cells.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(opts.seed);
    std::shuffle(order.begin(), order.end(), rng);
    order.resize(std::min<std::size_t>(order.size(), opts.trace_samples));
    std::sort(order.begin(), order.end());

    std::atomic<std::size_t> cursor{0};
    std::vector<std::future<void>> tracing;
    for (unsigned wk = 0; wk < workers; ++wk) {
      tracing.push_back(std::async(std::launch::async, [&] {
        for (std::size_t k = cursor++; k < order.size(); k = cursor++) {
          SurveyCell& cell = grid.cells[order[k]];
          const QDiff q(a, cell.b);
          cell.traced = true;
          if (q.is_degenerate_zero() || q.is_degenerate_equal()) {
            cell.center_ambiguous = true;
            continue;
          }
          const CriticalGraph g = classify_graph(q, opts.trace);
          cell.critical_evidence = g.critical_evidence;
          cell.critical_count = g.critical_count;
          cell.center_ambiguous = g.ambiguous;
          cell.agreement = g.agreement;
        }
      }));
    }
    for (auto& t : tracing) t.get();
    for (std::size_t idx : order) {
      const SurveyCell& c = grid.cells[idx];
      ++grid.traced;
      if (c.center_ambiguous) continue;
      ++grid.traced_unambiguous;
      grid.agreements += c.agreement;
    }
  }
  return grid;
}

}  // namespace qd
