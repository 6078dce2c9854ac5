#include "qdiff/qdiff.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "qdiff/io.hpp"

struct qd_diff {
  qd::QDiff q;
};

struct qd_graph {
  qd::CriticalGraph g;
  std::vector<qd::Arc> vertical;
  bool vertical_traced = false;
};

struct qd_survey {
  qd::SurveyGrid grid;
};

struct qd_laguerre {
  qd::ConvergenceReport report;
};

namespace {

thread_local std::string g_last_error;

qd_status fail(qd_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

qd_status map_code(qd::ErrorCode c) {
  switch (c) {
    case qd::ErrorCode::InvalidArgument: return QD_ERR_INVALID_ARGUMENT;
    case qd::ErrorCode::InvalidDifferential: return QD_ERR_INVALID_DIFFERENTIAL;
    case qd::ErrorCode::Degenerate: return QD_ERR_DEGENERATE;
    case qd::ErrorCode::Domain: return QD_ERR_DOMAIN;
    case qd::ErrorCode::Continuation: return QD_ERR_CONTINUATION;
    case qd::ErrorCode::Convergence: return QD_ERR_CONVERGENCE;
    case qd::ErrorCode::PoleProximity: return QD_ERR_POLE_PROXIMITY;
    case qd::ErrorCode::InsufficientResolution: return QD_ERR_INSUFFICIENT_RESOLUTION;
  }
  return QD_ERR_INTERNAL;
}

template <class F>
qd_status guarded(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const qd::Error& e) {
    return fail(map_code(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(QD_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(QD_ERR_INTERNAL, e.what());
  }
}

qd::Complex to_cpp(qd_complex z) { return {z.re, z.im}; }
qd_complex to_c(qd::Complex z) { return {z.real(), z.imag()}; }

qd::TraceConfig to_cpp(const qd_trace_config* c) {
  qd::TraceConfig t;
  if (!c) return t;
  if (!(c->rel_tol > 0.0) || !(c->abs_tol > 0.0) || !(c->level_tol > 0.0) || !(c->crit_tol > 0.0) ||
      c->step_budget == 0)
    throw qd::Error(qd::ErrorCode::InvalidArgument, "tolerances and step budget must be positive");
  for (double v : {c->launch_offset, c->r_max, c->r_min, c->eps_hit})
    if (!(v >= 0.0) || !std::isfinite(v))
      throw qd::Error(qd::ErrorCode::InvalidArgument, "geometric thresholds must be finite and non-negative");
  t.rel_tol = c->rel_tol;
  t.abs_tol = c->abs_tol;
  t.launch_offset = c->launch_offset;
  t.r_max = c->r_max;
  t.r_min = c->r_min;
  t.eps_hit = c->eps_hit;
  t.step_budget = static_cast<std::size_t>(c->step_budget);
  t.level_tol = c->level_tol;
  t.project_level = c->project_level != 0;
  t.crit_tol = c->crit_tol;
  return t;
}

qd::Region to_cpp(qd_region r) {
  if (!std::isfinite(r.x0) || !std::isfinite(r.x1) || !std::isfinite(r.y0) || !std::isfinite(r.y1) ||
      !(r.x0 < r.x1) || !(r.y0 < r.y1))
    throw qd::Error(qd::ErrorCode::InvalidArgument, "region needs x0 < x1 and y0 < y1, all finite");
  return {r.x0, r.x1, r.y0, r.y1};
}

qd_status give(const std::string& s, char** out) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) return fail(QD_ERR_INTERNAL, "out of memory");
  std::memcpy(p, s.c_str(), s.size() + 1);
  *out = p;
  return QD_OK;
}

qd_status null_arg(const char* what) { return fail(QD_ERR_INVALID_ARGUMENT, std::string(what) + " is null"); }

const std::vector<qd::Arc>& vertical_arcs(const qd_graph* g) {
  auto* m = const_cast<qd_graph*>(g);
  if (!m->vertical_traced) {
    m->vertical = qd::trace_all_from_zeros(g->g.qdiff, g->g.config, qd::TrajectoryKind::Vertical).arcs;
    m->vertical_traced = true;
  }
  return g->vertical;
}

double max_deviation(const qd::CriticalGraph& g) {
  double worst = 0.0;
  for (const auto& f : g.faces) worst = std::max(worst, std::abs(qd::teichmuller_sum(f) - qd::teichmuller_expected(f)));
  return worst;
}

}  // namespace

extern "C" {

const char* qd_version(void) { return "1.0.0"; }

const char* qd_status_name(qd_status s) {
  switch (s) {
    case QD_OK: return "ok";
    case QD_ERR_INVALID_ARGUMENT: return "invalid argument";
    case QD_ERR_INVALID_DIFFERENTIAL: return "invalid differential";
    case QD_ERR_DEGENERATE: return "degenerate";
    case QD_ERR_DOMAIN: return "domain";
    case QD_ERR_CONTINUATION: return "continuation";
    case QD_ERR_CONVERGENCE: return "convergence";
    case QD_ERR_POLE_PROXIMITY: return "pole proximity";
    case QD_ERR_INSUFFICIENT_RESOLUTION: return "insufficient resolution";
    case QD_ERR_VALIDATION: return "validation";
    case QD_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* qd_last_error(void) { return g_last_error.c_str(); }

void qd_string_free(char* s) { std::free(s); }

void qd_trace_config_default(qd_trace_config* cfg) {
  if (!cfg) return;
  const qd::TraceConfig t;
  cfg->rel_tol = t.rel_tol;
  cfg->abs_tol = t.abs_tol;
  cfg->launch_offset = t.launch_offset;
  cfg->r_max = t.r_max;
  cfg->r_min = t.r_min;
  cfg->eps_hit = t.eps_hit;
  cfg->step_budget = t.step_budget;
  cfg->level_tol = t.level_tol;
  cfg->project_level = t.project_level ? 1 : 0;
  cfg->crit_tol = t.crit_tol;
}

qd_region qd_region_default(void) {
  const qd::Region r;
  return {r.x0, r.x1, r.y0, r.y1};
}

qd_status qd_diff_new(qd_complex a, qd_complex b, qd_diff** out) {
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new qd_diff{qd::QDiff(to_cpp(a), to_cpp(b))};
    return QD_OK;
  });
}

void qd_diff_free(qd_diff* d) { delete d; }

qd_status qd_diff_zeros(const qd_diff* d, qd_complex* a, qd_complex* b) {
  if (!d) return null_arg("diff");
  if (a) *a = to_c(d->q.a());
  if (b) *b = to_c(d->q.b());
  return QD_OK;
}

qd_status qd_diff_criterion(const qd_diff* d, double tau, qd_criterion* out) {
  if (!d || !out) return null_arg(!d ? "diff" : "out");
  return guarded([&] {
    if (!(tau > 0.0)) throw qd::Error(qd::ErrorCode::InvalidArgument, "tau must be positive");
    const qd::CriterionResult c = qd::criterion_reality(d->q, tau);
    out->cls = static_cast<qd_criterion_class>(static_cast<int>(c.cls));
    out->im_plus = c.im_plus;
    out->im_minus = c.im_minus;
    out->relative_distance = c.relative_distance;
    out->ambiguous = c.boundary_ambiguous ? 1 : 0;
    return QD_OK;
  });
}

qd_status qd_diff_residue_origin(const qd_diff* d, int sheet, qd_complex* out) {
  if (!d || !out) return null_arg(!d ? "diff" : "out");
  return guarded([&] {
    if (sheet != 1 && sheet != -1) throw qd::Error(qd::ErrorCode::InvalidArgument, "sheet must be +1 or -1");
    *out = to_c(qd::residue_origin(d->q, sheet > 0 ? qd::Sheet::Plus : qd::Sheet::Minus));
    return QD_OK;
  });
}

qd_status qd_diff_period_json(const qd_diff* d, const qd_trace_config* cfg, uint64_t seed, char** out) {
  if (!d || !out) return null_arg(!d ? "diff" : "out");
  return guarded([&] { return give(qd::period_json(d->q, to_cpp(cfg), seed), out); });
}

qd_status qd_graph_classify(const qd_diff* d, const qd_trace_config* cfg, qd_graph** out) {
  if (!d || !out) return null_arg(!d ? "diff" : "out");
  return guarded([&] {
    *out = new qd_graph{qd::classify_graph(d->q, to_cpp(cfg)), {}, false};
    return QD_OK;
  });
}

void qd_graph_free(qd_graph* g) { delete g; }

qd_status qd_graph_summarize(const qd_graph* g, qd_graph_summary* out) {
  if (!g || !out) return null_arg(!g ? "graph" : "out");
  const qd::CriticalGraph& c = g->g;
  out->case_label = qd::to_string(c.case_label);
  out->critical_count = c.critical_count;
  out->short_count = c.short_count;
  out->loop_zero = c.loop_zero;
  out->has_criterion = c.has_criterion;
  out->critical_evidence = c.critical_evidence;
  out->agreement = c.agreement;
  out->ambiguous = c.ambiguous;
  out->validation_failed = c.validation_failed();
  out->same_zero_ok = c.guards.same_zero_ok;
  out->both_zeros_ok = c.guards.both_zeros_ok;
  out->arc_count = c.arcs.size();
  out->face_count = c.faces.size();
  out->teichmuller_max_deviation = max_deviation(c);
  return QD_OK;
}

qd_status qd_graph_validate(const qd_graph* g) {
  if (!g) return null_arg("graph");
  const qd::CriticalGraph& c = g->g;
  std::string report;
  if (c.validation_failed()) {
    report += "criterion ";
    report += c.has_criterion ? qd::to_string(c.criterion.cls) : "n/a";
    report += c.critical_evidence ? " but a short trajectory was traced" : " but no short trajectory was traced";
  }
  auto add = [&](const char* s) {
    if (!report.empty()) report += "; ";
    report += s;
  };
  if (!c.guards.same_zero_ok) add("a zero sends two arcs to the origin");
  if (!c.guards.both_zeros_ok) add("both zeros send arcs to the origin while the criterion holds");
  if (report.empty()) {
    g_last_error.clear();
    return QD_OK;
  }
  return fail(QD_ERR_VALIDATION, report);
}

qd_status qd_graph_json(const qd_graph* g, uint64_t seed, int with_vertical, char** out) {
  if (!g || !out) return null_arg(!g ? "graph" : "out");
  return guarded([&] {
    const std::vector<qd::Arc> none;
    const auto& extra = with_vertical ? vertical_arcs(g) : none;
    return give(qd::to_json(qd::make_graph_document(g->g, seed, extra)), out);
  });
}

qd_status qd_graph_svg(const qd_graph* g, int with_vertical, char** out) {
  if (!g || !out) return null_arg(!g ? "graph" : "out");
  return guarded([&] {
    std::vector<qd::Arc> arcs = g->g.arcs;
    if (with_vertical) {
      const auto& v = vertical_arcs(g);
      arcs.insert(arcs.end(), v.begin(), v.end());
    }
    const double r_max = g->g.config.resolved(g->g.qdiff).r_max;
    return give(qd::graph_svg(g->g.qdiff, arcs, r_max), out);
  });
}

qd_status qd_graph_document_normalize(const char* json, char** out) {
  if (!json || !out) return null_arg(!json ? "json" : "out");
  return guarded([&] { return give(qd::to_json(qd::parse_graph_document(json)), out); });
}

qd_status qd_locus_json(qd_complex a, qd_region region, int per_branch, uint64_t seed, char** out) {
  if (!out) return null_arg("out");
  return guarded([&] {
    if (per_branch < 2) throw qd::Error(qd::ErrorCode::InvalidArgument, "per_branch must be at least 2");
    return give(qd::locus_json(qd::gamma_locus(to_cpp(a)), to_cpp(region), per_branch, seed), out);
  });
}

qd_status qd_locus_csv(qd_complex a, qd_region region, int per_branch, char** out) {
  if (!out) return null_arg("out");
  return guarded([&] {
    if (per_branch < 2) throw qd::Error(qd::ErrorCode::InvalidArgument, "per_branch must be at least 2");
    return give(qd::locus_csv(qd::gamma_locus(to_cpp(a)), to_cpp(region), per_branch), out);
  });
}

qd_status qd_survey_run(qd_complex a, qd_region region, int resolution, int trace_samples, uint64_t seed,
                        const qd_trace_config* cfg, qd_survey** out) {
  if (!out) return null_arg("out");
  return guarded([&] {
    if (trace_samples < 0) throw qd::Error(qd::ErrorCode::InvalidArgument, "trace_samples must be non-negative");
    qd::SurveyOptions opts;
    opts.trace_samples = trace_samples;
    opts.seed = seed;
    opts.trace = to_cpp(cfg);
    *out = new qd_survey{qd::survey(to_cpp(a), to_cpp(region), resolution, opts)};
    return QD_OK;
  });
}

void qd_survey_free(qd_survey* s) { delete s; }

qd_status qd_survey_json(const qd_survey* s, uint64_t seed, char** out) {
  if (!s || !out) return null_arg(!s ? "survey" : "out");
  return guarded([&] { return give(qd::survey_json(s->grid, seed), out); });
}

qd_status qd_survey_csv(const qd_survey* s, char** out) {
  if (!s || !out) return null_arg(!s ? "survey" : "out");
  return guarded([&] { return give(qd::survey_csv(s->grid), out); });
}

qd_status qd_survey_svg(const qd_survey* s, char** out) {
  if (!s || !out) return null_arg(!s ? "survey" : "out");
  return guarded([&] { return give(qd::survey_svg(s->grid), out); });
}

qd_status qd_survey_counts(const qd_survey* s, int* traced, int* traced_unambiguous, int* agreements) {
  if (!s) return null_arg("survey");
  if (traced) *traced = s->grid.traced;
  if (traced_unambiguous) *traced_unambiguous = s->grid.traced_unambiguous;
  if (agreements) *agreements = s->grid.agreements;
  return QD_OK;
}

qd_status qd_laguerre_run(qd_complex A, const int* ns, size_t count, const qd_trace_config* cfg, qd_laguerre** out) {
  if (!out) return null_arg("out");
  if (!ns && count > 0) return null_arg("ns");
  return guarded([&] {
    if (count == 0) throw qd::Error(qd::ErrorCode::InvalidArgument, "at least one n is required");
    std::vector<int> v(ns, ns + count);
    for (int n : v)
      if (n < 1) throw qd::Error(qd::ErrorCode::InvalidArgument, "n must be positive");
    *out = new qd_laguerre{qd::convergence_report(to_cpp(A), v, {}, to_cpp(cfg))};
    return QD_OK;
  });
}

void qd_laguerre_free(qd_laguerre* l) { delete l; }

qd_status qd_laguerre_json(const qd_laguerre* l, uint64_t seed, char** out) {
  if (!l || !out) return null_arg(!l ? "laguerre" : "out");
  return guarded([&] { return give(qd::convergence_json(l->report, seed), out); });
}

qd_status qd_laguerre_csv(const qd_laguerre* l, char** out) {
  if (!l || !out) return null_arg(!l ? "laguerre" : "out");
  return guarded([&] { return give(qd::convergence_csv(l->report), out); });
}

qd_status qd_laguerre_svg(const qd_laguerre* l, char** out) {
  if (!l || !out) return null_arg(!l ? "laguerre" : "out");
  return guarded([&] { return give(qd::convergence_svg(l->report), out); });
}

qd_status qd_laguerre_summary(const qd_laguerre* l, int* monotone, double* max_error_last,
                              double* max_root_distance_last) {
  if (!l) return null_arg("laguerre");
  const auto& r = l->report;
  if (monotone) *monotone = r.monotone ? 1 : 0;
  if (max_error_last) {
    double worst = 0.0;
    if (!r.errors.empty())
      for (double e : r.errors.back()) worst = std::max(worst, e);
    *max_error_last = worst;
  }
  if (max_root_distance_last) *max_root_distance_last = r.root_support_distance.empty() ? 0.0 : r.root_support_distance.back();
  return QD_OK;
}

}  // extern "C"
