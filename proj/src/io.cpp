#include "qdiff/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "json.hpp"

namespace qd {

namespace {

using Json = nlohmann::ordered_json;

void emit(const Json& j, std::string& out) {
  switch (j.type()) {
    case Json::value_t::null: out += "null"; break;
    case Json::value_t::boolean: out += j.get<bool>() ? "true" : "false"; break;
    case Json::value_t::number_integer: out += std::to_string(j.get<std::int64_t>()); break;
    case Json::value_t::number_unsigned: out += std::to_string(j.get<std::uint64_t>()); break;
    case Json::value_t::number_float: {
      const double x = j.get<double>();
      out += std::isfinite(x) ? format_number(x) : "null";
      break;
    }
    case Json::value_t::string: out += Json(j.get<std::string>()).dump(); break;
    case Json::value_t::array: {
      out += '[';
      bool first = true;
      for (const Json& v : j) {
        if (!first) out += ',';
        first = false;
        emit(v, out);
      }
      out += ']';
      break;
    }
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += Json(it.key()).dump();
        out += ':';
        emit(it.value(), out);
      }
      out += '}';
      break;
    }
    default: out += "null";
  }
}

std::string dump(const Json& j) {
  std::string out;
  emit(j, out);
  out += '\n';
  return out;
}

Json pair(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex read_pair(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::InvalidArgument, "expected [re, im]");
  // null stands for a non-finite value
  auto num = [](const Json& v) { return v.is_null() ? NAN : v.get<double>(); };
  return {num(j[0]), num(j[1])};
}

double read_number(const Json& j) { return j.is_null() ? NAN : j.get<double>(); }

const char* vertex_name(GraphVertex v) {
  switch (v) {
    case GraphVertex::A: return "a";
    case GraphVertex::B: return "b";
    case GraphVertex::Origin: return "origin";
    case GraphVertex::Infinity: return "infinity";
  }
  return "?";
}

ArcRecord arc_record(const Arc& arc) {
  ArcRecord r;
  r.kind = to_string(arc.kind);
  r.from_zero = arc.origin.zero;
  r.ray = arc.origin.ray;
  r.launch_angle = arc.launch_angle;
  r.termination = to_string(arc.termination.tag);
  r.endpoint_zero = arc.termination.endpoint_zero;
  r.escape = to_string(arc.termination.escape);
  r.winding = arc.termination.winding;
  r.closing_gap = arc.termination.closing_gap;
  r.level = arc.level;
  r.max_level_drift = arc.max_level_drift;
  r.length = arc.length;
  r.points = arc.samples;
  return r;
}

std::vector<Complex> oriented_short(const Arc& arc) {
  std::vector<Complex> path = arc.samples;
  if (arc.origin.zero == static_cast<int>(ZeroId::B)) std::reverse(path.begin(), path.end());
  return path;
}

// Fixed-point SVG coordinates: the viewport spans 0..1e6 units.
struct Viewport {
  double x0, y0, span;

  long long x(double v) const { return std::llround((v - x0) / span * 1e6); }
  long long y(double v) const { return std::llround((y0 + span - v) / span * 1e6); }
};

std::string svg_header() {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1000000 1000000\" "
         "width=\"800\" height=\"800\">\n"
         "<rect x=\"0\" y=\"0\" width=\"1000000\" height=\"1000000\" fill=\"white\"/>\n";
}

std::string svg_path(const Viewport& vp, const std::vector<Complex>& pts, const char* style) {
  std::string d;
  long long px = 0, py = 0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const long long x = vp.x(pts[k].real()), y = vp.y(pts[k].imag());
    if (k > 0 && k + 1 < pts.size() && x == px && y == py) continue;
    d += k == 0 ? "M" : " L";
    d += std::to_string(x) + " " + std::to_string(y);
    px = x;
    py = y;
  }
  return "<path d=\"" + d + "\" " + style + "/>\n";
}

std::string svg_dot(const Viewport& vp, Complex z, int r, const char* fill) {
  return "<circle cx=\"" + std::to_string(vp.x(z.real())) + "\" cy=\"" + std::to_string(vp.y(z.imag())) +
         "\" r=\"" + std::to_string(r) + "\" fill=\"" + fill + "\"/>\n";
}

}  // namespace

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

GraphDocument make_graph_document(const CriticalGraph& g, std::uint64_t seed,
                                  const std::vector<Arc>& extra) {
  GraphDocument doc;
  doc.seed = seed;
  doc.a = g.qdiff.a();
  doc.b = g.qdiff.b();
  doc.case_label = to_string(g.case_label);
  doc.criterion = g.has_criterion ? to_string(g.criterion.cls) : "n/a";
  doc.criterion_distance = g.has_criterion ? g.criterion.relative_distance : 0.0;
  doc.critical_count = g.critical_count;
  doc.loop_zero = g.loop_zero;
  for (const Arc& arc : g.arcs) doc.arcs.push_back(arc_record(arc));
  for (const Arc& arc : extra) doc.arcs.push_back(arc_record(arc));

  auto& v = doc.validation;
  for (const PolygonFace& f : g.faces) {
    FaceRecord fr;
    for (const FaceCorner& c : f.corners) fr.corners.push_back({vertex_name(c.vertex), c.order, c.angle});
    fr.contains_origin = f.contains_origin;
    fr.origin_on_boundary = f.origin_on_boundary;
    fr.teichmuller_sum = teichmuller_sum(f);
    fr.expected = teichmuller_expected(f);
    v.teichmuller_max_deviation = std::max(v.teichmuller_max_deviation, std::abs(fr.teichmuller_sum - fr.expected));
    doc.faces.push_back(std::move(fr));
  }
  v.criterion_agreement = g.agreement;
  v.ambiguous = g.ambiguous;
  v.validation_failed = g.validation_failed();
  v.origin_guard_same_zero = g.guards.same_zero_ok;
  v.origin_guard_both_zeros = g.guards.both_zeros_ok;
  v.face_error = g.face_error;
  for (const Arc& arc : g.arcs) {
    if (arc.termination.tag != Termination::ShortTrajectory) continue;
    const PeriodResult p = period_check(g.qdiff, oriented_short(arc));
    if (!v.period_available || p.mismatch > v.period_mismatch) {
      v.period_available = true;
      v.period = p.value;
      v.period_matched = p.matched;
      v.period_mismatch = p.mismatch;
    }
  }
  return doc;
}

std::string to_json(const GraphDocument& doc) {
  Json j;
  j["schema_version"] = doc.schema_version;
  j["seed"] = doc.seed;
  j["a"] = pair(doc.a);
  j["b"] = pair(doc.b);
  j["case_label"] = doc.case_label;
  j["criterion"] = doc.criterion;
  j["criterion_distance"] = doc.criterion_distance;
  j["critical_count"] = doc.critical_count;
  j["loop_zero"] = doc.loop_zero;
  Json arcs = Json::array();
  for (const ArcRecord& r : doc.arcs) {
    Json a;
    a["kind"] = r.kind;
    a["from_zero"] = r.from_zero;
    a["ray"] = r.ray;
    a["launch_angle"] = r.launch_angle;
    a["termination"] = r.termination;
    a["endpoint_zero"] = r.endpoint_zero;
    a["escape"] = r.escape;
    a["winding"] = r.winding;
    a["closing_gap"] = r.closing_gap;
    a["level"] = r.level;
    a["max_level_drift"] = r.max_level_drift;
    a["length"] = r.length;
    Json pts = Json::array();
    for (Complex z : r.points) pts.push_back(pair(z));
    a["points"] = std::move(pts);
    arcs.push_back(std::move(a));
  }
  j["arcs"] = std::move(arcs);
  Json faces = Json::array();
  for (const FaceRecord& f : doc.faces) {
    Json fj;
    Json corners = Json::array();
    for (const CornerRecord& c : f.corners)
      corners.push_back(Json{{"vertex", c.vertex}, {"order", c.order}, {"angle", c.angle}});
    fj["corners"] = std::move(corners);
    fj["contains_origin"] = f.contains_origin;
    fj["origin_on_boundary"] = f.origin_on_boundary;
    fj["teichmuller_sum"] = f.teichmuller_sum;
    fj["expected"] = f.expected;
    faces.push_back(std::move(fj));
  }
  j["faces"] = std::move(faces);
  const ValidationRecord& v = doc.validation;
  j["validation"] = Json{{"criterion_agreement", v.criterion_agreement},
                         {"ambiguous", v.ambiguous},
                         {"validation_failed", v.validation_failed},
                         {"period_available", v.period_available},
                         {"period", pair(v.period)},
                         {"period_matched", v.period_matched},
                         {"period_mismatch", v.period_mismatch},
                         {"teichmuller_max_deviation", v.teichmuller_max_deviation},
                         {"origin_guard_same_zero", v.origin_guard_same_zero},
                         {"origin_guard_both_zeros", v.origin_guard_both_zeros},
                         {"face_error", v.face_error}};
  return dump(j);
}

GraphDocument parse_graph_document(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed JSON: ") + e.what());
  }
  try {
    GraphDocument doc;
    doc.schema_version = j.at("schema_version").get<std::string>();
    if (doc.schema_version != kSchemaVersion)
      throw Error(ErrorCode::InvalidArgument, "unsupported schema version " + doc.schema_version);
    doc.seed = j.at("seed").get<std::uint64_t>();
    doc.a = read_pair(j.at("a"));
    doc.b = read_pair(j.at("b"));
    doc.case_label = j.at("case_label").get<std::string>();
    doc.criterion = j.at("criterion").get<std::string>();
    doc.criterion_distance = read_number(j.at("criterion_distance"));
    doc.critical_count = j.at("critical_count").get<int>();
    doc.loop_zero = j.at("loop_zero").get<int>();
    for (const Json& a : j.at("arcs")) {
      ArcRecord r;
      r.kind = a.at("kind").get<std::string>();
      r.from_zero = a.at("from_zero").get<int>();
      r.ray = a.at("ray").get<int>();
      r.launch_angle = read_number(a.at("launch_angle"));
      r.termination = a.at("termination").get<std::string>();
      r.endpoint_zero = a.at("endpoint_zero").get<int>();
      r.escape = a.at("escape").get<std::string>();
      r.winding = a.at("winding").get<int>();
      r.closing_gap = read_number(a.at("closing_gap"));
      r.level = read_number(a.at("level"));
      r.max_level_drift = read_number(a.at("max_level_drift"));
      r.length = read_number(a.at("length"));
      for (const Json& p : a.at("points")) r.points.push_back(read_pair(p));
      doc.arcs.push_back(std::move(r));
    }
    for (const Json& f : j.at("faces")) {
      FaceRecord fr;
      for (const Json& c : f.at("corners"))
        fr.corners.push_back({c.at("vertex").get<std::string>(), c.at("order").get<int>(), read_number(c.at("angle"))});
      fr.contains_origin = f.at("contains_origin").get<bool>();
      fr.origin_on_boundary = f.at("origin_on_boundary").get<bool>();
      fr.teichmuller_sum = read_number(f.at("teichmuller_sum"));
      fr.expected = read_number(f.at("expected"));
      doc.faces.push_back(std::move(fr));
    }
    const Json& v = j.at("validation");
    auto& out = doc.validation;
    out.criterion_agreement = v.at("criterion_agreement").get<bool>();
    out.ambiguous = v.at("ambiguous").get<bool>();
    out.validation_failed = v.at("validation_failed").get<bool>();
    out.period_available = v.at("period_available").get<bool>();
    out.period = read_pair(v.at("period"));
    out.period_matched = v.at("period_matched").get<int>();
    out.period_mismatch = read_number(v.at("period_mismatch"));
    out.teichmuller_max_deviation = read_number(v.at("teichmuller_max_deviation"));
    out.origin_guard_same_zero = v.at("origin_guard_same_zero").get<bool>();
    out.origin_guard_both_zeros = v.at("origin_guard_both_zeros").get<bool>();
    out.face_error = v.at("face_error").get<std::string>();
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed graph document: ") + e.what());
  }
}

std::string period_json(const QDiff& q, const TraceConfig& cfg, std::uint64_t seed) {
  if (q.is_degenerate_zero()) throw Error(ErrorCode::Degenerate, "period requires ab != 0");
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["seed"] = seed;
  j["a"] = pair(q.a());
  j["b"] = pair(q.b());
  const CriterionResult c = criterion_reality(q);
  j["criterion"] = to_string(c.cls);
  j["im_plus"] = c.im_plus;
  j["im_minus"] = c.im_minus;

  std::vector<std::pair<std::string, std::vector<Complex>>> paths;
  if (!q.is_degenerate_equal()) {
    const ArcSet set = trace_all_from_zeros(q, cfg, TrajectoryKind::Horizontal);
    for (const Arc& arc : set.arcs)
      if (arc.termination.tag == Termination::ShortTrajectory) paths.push_back({"traced", oriented_short(arc)});
    if (paths.empty()) {
      std::vector<Complex> seg{q.a(), q.b()};
      // bend around the origin when the chord passes through it
      const Complex mid = 0.5 * (q.a() + q.b());
      if (std::abs(mid) < 1e-3 * q.scale()) seg.insert(seg.begin() + 1, mid + Complex(0.0, 0.5) * (q.b() - q.a()));
      paths.push_back({"segment", seg});
    }
  }
  Json results = Json::array();
  for (const auto& [source, path] : paths) {
    const PeriodResult p = period_check(q, path);
    Json cands = Json::array();
    for (Complex z : p.candidates) cands.push_back(pair(z));
    results.push_back(Json{{"path", source},
                           {"value", pair(p.value)},
                           {"candidates", std::move(cands)},
                           {"matched", p.matched},
                           {"mismatch", p.mismatch},
                           {"real_part", p.value.real()}});
  }
  j["periods"] = std::move(results);
  return dump(j);
}

std::string locus_json(const GammaLocus& locus, const Region& r, int per_branch, std::uint64_t seed) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["seed"] = seed;
  j["a"] = pair(locus.anchor());
  j["region"] = Json::array({r.x0, r.x1, r.y0, r.y1});
  Json branches = Json::array();
  for (const LocusBranch& b : locus.branches())
    branches.push_back(Json{{"shape", to_string(b.shape)}, {"shift", b.imaginary_shift ? "imaginary" : "real"}});
  j["branches"] = std::move(branches);
  Json pts = Json::array();
  double worst = 0.0;
  for (const LocusPoint& p : locus.sample(r.x0, r.x1, r.y0, r.y1, per_branch)) {
    Json e{{"branch", p.branch}, {"t", p.t}, {"b", pair(p.b)}};
    if (std::abs(p.b) > 0.0) {
      const CriterionResult c = criterion_reality(QDiff(locus.anchor(), p.b));
      e["criterion"] = to_string(c.cls);
      worst = std::max(worst, std::min(std::abs(c.im_plus), std::abs(c.im_minus)));
    } else {
      e["criterion"] = "n/a";
    }
    pts.push_back(std::move(e));
  }
  j["points"] = std::move(pts);
  j["max_abs_im"] = worst;
  return dump(j);
}

std::string locus_csv(const GammaLocus& locus, const Region& r, int per_branch) {
  std::string out = "branch,t,re,im\n";
  for (const LocusPoint& p : locus.sample(r.x0, r.x1, r.y0, r.y1, per_branch))
    out += std::to_string(p.branch) + "," + format_number(p.t) + "," + format_number(p.b.real()) + "," +
           format_number(p.b.imag()) + "\n";
  return out;
}

std::string survey_json(const SurveyGrid& g, std::uint64_t seed) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["seed"] = seed;
  j["a"] = pair(g.a);
  j["region"] = Json::array({g.region.x0, g.region.x1, g.region.y0, g.region.y1});
  j["nx"] = g.nx;
  j["ny"] = g.ny;
  Json classes = Json::array();
  for (int row = 0; row < g.ny; ++row) {
    std::string line;
    for (int i = 0; i < g.nx; ++i) {
      switch (g.at(i, row).cls) {
        case CriterionClass::Neither: line += '.'; break;
        case CriterionClass::PlusReal: line += '+'; break;
        case CriterionClass::MinusReal: line += '-'; break;
        case CriterionClass::BothReal: line += '*'; break;
      }
    }
    classes.push_back(line);
  }
  j["rows"] = std::move(classes);
  Json traced = Json::array();
  for (const SurveyCell& c : g.cells) {
    if (!c.traced) continue;
    traced.push_back(Json{{"b", pair(c.b)},
                          {"critical_evidence", c.critical_evidence},
                          {"critical_count", c.critical_count},
                          {"ambiguous", c.center_ambiguous},
                          {"agreement", c.agreement}});
  }
  j["traced"] = std::move(traced);
  j["traced_unambiguous"] = g.traced_unambiguous;
  j["agreements"] = g.agreements;
  return dump(j);
}

std::string survey_csv(const SurveyGrid& g) {
  std::string out = "i,j,re,im,class,traced,critical_evidence,critical_count,agreement\n";
  for (int row = 0; row < g.ny; ++row)
    for (int i = 0; i < g.nx; ++i) {
      const SurveyCell& c = g.at(i, row);
      out += std::to_string(i) + "," + std::to_string(row) + "," + format_number(c.b.real()) + "," +
             format_number(c.b.imag()) + "," + to_string(c.cls) + "," + (c.traced ? "1" : "0") + "," +
             (c.critical_evidence ? "1" : "0") + "," + std::to_string(c.critical_count) + "," +
             (c.agreement ? "1" : "0") + "\n";
    }
  return out;
}

std::string survey_svg(const SurveyGrid& g) {
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " + std::to_string(g.nx) + " " +
                    std::to_string(g.ny) + "\" width=\"800\" height=\"800\" shape-rendering=\"crispEdges\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(g.nx) + "\" height=\"" + std::to_string(g.ny) +
         "\" fill=\"white\"/>\n";
  for (int row = 0; row < g.ny; ++row)
    for (int i = 0; i < g.nx; ++i) {
      const SurveyCell& c = g.at(i, row);
      const char* fill = nullptr;
      switch (c.cls) {
        case CriterionClass::PlusReal: fill = "#d62728"; break;
        case CriterionClass::MinusReal: fill = "#1f77b4"; break;
        case CriterionClass::BothReal: fill = "#9467bd"; break;
        case CriterionClass::Neither: break;
      }
      if (!fill && !(c.traced && !c.agreement)) continue;
      out += "<rect x=\"" + std::to_string(i) + "\" y=\"" + std::to_string(g.ny - 1 - row) +
             "\" width=\"1\" height=\"1\" fill=\"" + (fill ? fill : "none") + "\"" +
             (c.traced && !c.agreement ? " stroke=\"black\" stroke-width=\"0.2\"" : "") + "/>\n";
    }
  out += "</svg>\n";
  return out;
}

std::string convergence_json(const ConvergenceReport& rep, std::uint64_t seed) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["seed"] = seed;
  j["A"] = pair(rep.A);
  j["mass"] = pair(rep.mass);
  j["alpha"] = pair(rep.alpha);
  Json probes = Json::array();
  for (std::size_t k = 0; k < rep.probes.size(); ++k)
    probes.push_back(Json{{"z", pair(rep.probes[k])}, {"support_distance", rep.probe_support_distance[k]},
                          {"monotone", static_cast<bool>(rep.probe_monotone[k])}});
  j["probes"] = std::move(probes);
  Json rows = Json::array();
  for (std::size_t i = 0; i < rep.ns.size(); ++i) {
    const RootMeasure& m = rep.measures[i];
    Json roots = Json::array();
    for (Complex z : m.roots) roots.push_back(pair(z));
    rows.push_back(Json{{"n", rep.ns[i]},
                        {"errors", rep.errors[i]},
                        {"root_support_distance", rep.root_support_distance[i]},
                        {"converged", m.converged},
                        {"iterations", m.iterations},
                        {"max_residual", m.max_residual},
                        {"failure", m.failure},
                        {"roots", std::move(roots)}});
  }
  j["rows"] = std::move(rows);
  j["monotone"] = rep.monotone;
  Json support = Json::array();
  for (Complex z : rep.support) support.push_back(pair(z));
  j["support"] = std::move(support);
  return dump(j);
}

std::string convergence_csv(const ConvergenceReport& rep) {
  std::string out = "n,probe,re,im,error\n";
  for (std::size_t i = 0; i < rep.ns.size(); ++i)
    for (std::size_t k = 0; k < rep.probes.size(); ++k)
      out += std::to_string(rep.ns[i]) + "," + std::to_string(k) + "," + format_number(rep.probes[k].real()) +
             "," + format_number(rep.probes[k].imag()) + "," + format_number(rep.errors[i][k]) + "\n";
  return out;
}

std::string convergence_svg(const ConvergenceReport& rep) {
  std::vector<Complex> all = rep.support;
  if (!rep.measures.empty()) all.insert(all.end(), rep.measures.back().roots.begin(), rep.measures.back().roots.end());
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (Complex z : all) {
    x0 = std::min(x0, z.real());
    x1 = std::max(x1, z.real());
    y0 = std::min(y0, z.imag());
    y1 = std::max(y1, z.imag());
  }
  const double span = 1.2 * std::max({x1 - x0, y1 - y0, 1e-9});
  const Viewport vp{0.5 * (x0 + x1) - 0.5 * span, 0.5 * (y0 + y1) - 0.5 * span, span};
  std::string out = svg_header();
  out += svg_path(vp, rep.support, "fill=\"none\" stroke=\"black\" stroke-width=\"2500\"");
  if (!rep.measures.empty())
    for (Complex z : rep.measures.back().roots) out += svg_dot(vp, z, 5000, "#d62728");
  out += "</svg>\n";
  return out;
}

std::string graph_svg(const QDiff& q, const std::vector<Arc>& arcs, double r_max) {
  const Viewport vp{-r_max, -r_max, 2.0 * r_max};
  std::string out = svg_header();
  for (const Arc& arc : arcs) {
    const bool horizontal = arc.kind == TrajectoryKind::Horizontal;
    const char* style = horizontal ? "fill=\"none\" stroke=\"black\" stroke-width=\"2000\""
                                   : "fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1500\" "
                                     "stroke-dasharray=\"8000 6000\"";
    out += svg_path(vp, arc.samples, style);
  }
  for (int id = 0; id < 2; ++id) {
    const auto zid = static_cast<ZeroId>(id);
    if (q.is_zero_of_differential(zid)) out += svg_dot(vp, q.zero(zid), 6000, "#d62728");
  }
  const long long ox = vp.x(0.0), oy = vp.y(0.0), h = 6000;
  out += "<rect x=\"" + std::to_string(ox - h) + "\" y=\"" + std::to_string(oy - h) + "\" width=\"" +
         std::to_string(2 * h) + "\" height=\"" + std::to_string(2 * h) + "\" fill=\"#2ca02c\"/>\n";
  out += "</svg>\n";
  return out;
}

}  // namespace qd
