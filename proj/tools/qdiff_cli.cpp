// Command-line front end. Talks to the library only through qdiff.h.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qdiff/qdiff.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitNumerical = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ApiError : std::runtime_error {
  ApiError(qd_status s, const std::string& what) : std::runtime_error(what), status(s) {}
  qd_status status;
};

void check(qd_status s) {
  if (s != QD_OK) throw ApiError(s, std::string(qd_status_name(s)) + ": " + qd_last_error());
}

int exit_code(qd_status s) {
  switch (s) {
    case QD_OK: return kExitOk;
    case QD_ERR_INVALID_ARGUMENT:
    case QD_ERR_INVALID_DIFFERENTIAL:
    case QD_ERR_DEGENERATE: return kExitUsage;
    case QD_ERR_VALIDATION: return kExitValidation;
    default: return kExitNumerical;
  }
}

// Owned C strings and handles.
struct StringDeleter {
  void operator()(char* s) const { qd_string_free(s); }
};
using CString = std::unique_ptr<char, StringDeleter>;

template <class T, void (*Free)(T*)>
struct HandleDeleter {
  void operator()(T* p) const { Free(p); }
};
using Diff = std::unique_ptr<qd_diff, HandleDeleter<qd_diff, qd_diff_free>>;
using Graph = std::unique_ptr<qd_graph, HandleDeleter<qd_graph, qd_graph_free>>;
using Survey = std::unique_ptr<qd_survey, HandleDeleter<qd_survey, qd_survey_free>>;
using Laguerre = std::unique_ptr<qd_laguerre, HandleDeleter<qd_laguerre, qd_laguerre_free>>;

template <class F>
std::string take(F&& f) {
  char* raw = nullptr;
  check(f(&raw));
  CString owned(raw);
  return owned.get();
}

double parse_real(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw UsageError("cannot parse " + what + " from '" + s + "'");
  }
  if (used != s.size()) throw UsageError("cannot parse " + what + " from '" + s + "'");
  if (!std::isfinite(v)) throw UsageError(what + " must be finite");
  return v;
}

// Accepts "re,im", "re", "im i", "re+imi" and "re-imi"; a bare "i" is one.
qd_complex parse_complex(std::string s, const std::string& what) {
  std::erase_if(s, [](unsigned char c) { return std::isspace(c); });
  if (s.empty()) throw UsageError(what + " is required");
  if (auto comma = s.find(','); comma != std::string::npos)
    return {parse_real(s.substr(0, comma), what), parse_real(s.substr(comma + 1), what)};
  if (s.back() != 'i' && s.back() != 'j') return {parse_real(s, what), 0.0};
  s.pop_back();
  std::size_t split = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  auto coefficient = [&](const std::string& t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    return parse_real(t, what);
  };
  if (split == std::string::npos) return {0.0, coefficient(s)};
  return {parse_real(s.substr(0, split), what), coefficient(s.substr(split))};
}

qd_region parse_region(const std::string& s) {
  std::vector<double> v;
  std::stringstream in(s);
  std::string part;
  while (std::getline(in, part, ',')) v.push_back(parse_real(part, "region"));
  if (v.size() != 4) throw UsageError("region needs x0,x1,y0,y1");
  if (!(v[0] < v[1]) || !(v[2] < v[3])) throw UsageError("region needs x0 < x1 and y0 < y1");
  return {v[0], v[1], v[2], v[3]};
}

// key=value lines become "--key value" arguments placed ahead of the
// command line, so flags given there take precedence.
std::vector<std::string> config_arguments(const char* path) {
  std::ifstream in(path);
  if (!in) throw UsageError(std::string("cannot read config file ") + path);
  std::vector<std::string> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    auto trim = [](std::string t) {
      const auto b = t.find_first_not_of(" \t\r");
      const auto e = t.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : t.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError(std::string(path) + ":" + std::to_string(number) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw UsageError(std::string(path) + ":" + std::to_string(number) + ": empty key");
    out.push_back("--" + key);
    out.push_back(trim(line.substr(eq + 1)));
  }
  return out;
}

struct Options {
  std::string a, b, A;
  int n = 100;
  std::string region = "-3,3,-3,3";
  int resolution = 101;
  int samples = -1;
  std::string svg, json, csv;
  std::uint64_t seed = 1;
  std::optional<double> tol_level, tol_crit, rel_tol, abs_tol, r_max;
  std::optional<std::uint64_t> step_budget;
};

qd_trace_config trace_config(const Options& o) {
  qd_trace_config c;
  qd_trace_config_default(&c);
  auto positive = [](std::optional<double> v, const char* name, double& dst) {
    if (!v) return;
    if (!(*v > 0.0) || !std::isfinite(*v)) throw UsageError(std::string(name) + " must be positive");
    dst = *v;
  };
  positive(o.tol_level, "--tol-level", c.level_tol);
  positive(o.tol_crit, "--tol-crit", c.crit_tol);
  positive(o.rel_tol, "--rel-tol", c.rel_tol);
  positive(o.abs_tol, "--abs-tol", c.abs_tol);
  positive(o.r_max, "--r-max", c.r_max);
  if (o.step_budget) {
    if (*o.step_budget == 0) throw UsageError("--step-budget must be positive");
    c.step_budget = *o.step_budget;
  }
  return c;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ApiError(QD_ERR_INTERNAL, "cannot open " + path + " for writing");
  out << text;
  if (!out) throw ApiError(QD_ERR_INTERNAL, "write to " + path + " failed");
}

// JSON goes to --json when given and to stdout otherwise.
void emit_json(const Options& o, const std::string& doc, const std::string& summary) {
  if (o.json.empty()) {
    std::cout << doc;
  } else {
    write_file(o.json, doc);
    std::cout << summary;
  }
}

Diff make_diff(const Options& o) {
  qd_diff* d = nullptr;
  check(qd_diff_new(parse_complex(o.a, "--a"), parse_complex(o.b, "--b"), &d));
  return Diff(d);
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

int run_graph(const Options& o, bool with_vertical) {
  const Diff d = make_diff(o);
  const qd_trace_config cfg = trace_config(o);
  qd_graph* raw = nullptr;
  check(qd_graph_classify(d.get(), &cfg, &raw));
  const Graph g(raw);
  qd_graph_summary s;
  check(qd_graph_summarize(g.get(), &s));
  const std::string doc = take([&](char** out) { return qd_graph_json(g.get(), o.seed, with_vertical, out); });
  emit_json(o, doc,
            std::string("case ") + s.case_label + ", " + std::to_string(s.critical_count) + " critical arcs, " +
                std::to_string(s.arc_count) + " arcs, " + std::to_string(s.face_count) + " faces\n");
  if (!o.svg.empty())
    write_file(o.svg, take([&](char** out) { return qd_graph_svg(g.get(), with_vertical, out); }));
  const qd_status v = qd_graph_validate(g.get());
  if (v == QD_ERR_VALIDATION) {
    std::cerr << "validation failure: " << qd_last_error() << "\n";
    return kExitValidation;
  }
  check(v);
  return kExitOk;
}

int run_period(const Options& o) {
  const Diff d = make_diff(o);
  const qd_trace_config cfg = trace_config(o);
  const std::string doc = take([&](char** out) { return qd_diff_period_json(d.get(), &cfg, o.seed, out); });
  const auto j = nlohmann::json::parse(doc);
  std::string summary;
  double worst = 0.0;
  for (const auto& p : j.at("periods")) {
    const double mismatch = p.at("mismatch").get<double>();
    worst = std::max(worst, mismatch);
    summary += "period (" + p.at("path").get<std::string>() + ") = " + fmt(p.at("value")[0].get<double>()) + " + " +
               fmt(p.at("value")[1].get<double>()) + "i, matched candidate " +
               std::to_string(p.at("matched").get<int>()) + ", mismatch " + fmt(mismatch) + "\n";
  }
  emit_json(o, doc, summary);
  if (worst > 1e-6) {
    std::cerr << "validation failure: period mismatch " << fmt(worst) << "\n";
    return kExitValidation;
  }
  return kExitOk;
}

int run_locus(const Options& o) {
  const qd_complex a = parse_complex(o.a, "--a");
  const qd_region r = parse_region(o.region);
  const int per_branch = o.samples < 0 ? 200 : o.samples;
  const std::string doc = take([&](char** out) { return qd_locus_json(a, r, per_branch, o.seed, out); });
  emit_json(o, doc, "locus written to " + o.json + "\n");
  if (!o.csv.empty()) write_file(o.csv, take([&](char** out) { return qd_locus_csv(a, r, per_branch, out); }));
  return kExitOk;
}

int run_survey(const Options& o) {
  const qd_complex a = parse_complex(o.a, "--a");
  const qd_region r = parse_region(o.region);
  const qd_trace_config cfg = trace_config(o);
  qd_survey* raw = nullptr;
  check(qd_survey_run(a, r, o.resolution, o.samples < 0 ? 0 : o.samples, o.seed, &cfg, &raw));
  const Survey s(raw);
  int traced = 0, unambiguous = 0, agreements = 0;
  check(qd_survey_counts(s.get(), &traced, &unambiguous, &agreements));
  const std::string doc = take([&](char** out) { return qd_survey_json(s.get(), o.seed, out); });
  emit_json(o, doc,
            "traced " + std::to_string(traced) + " cells, " + std::to_string(agreements) + "/" +
                std::to_string(unambiguous) + " unambiguous cells agree\n");
  if (!o.csv.empty()) write_file(o.csv, take([&](char** out) { return qd_survey_csv(s.get(), out); }));
  if (!o.svg.empty()) write_file(o.svg, take([&](char** out) { return qd_survey_svg(s.get(), out); }));
  if (agreements < unambiguous) {
    std::cerr << "validation failure: " << unambiguous - agreements << " traced cells disagree with the criterion\n";
    return kExitValidation;
  }
  return kExitOk;
}

int run_laguerre(const Options& o) {
  const qd_complex A = parse_complex(o.A, "--A");
  if (o.n < 1) throw UsageError("--n must be positive");
  std::vector<int> ns;
  for (int n : {o.n / 4, o.n / 2, o.n})
    if (n >= 1 && (ns.empty() || ns.back() != n)) ns.push_back(n);
  const qd_trace_config cfg = trace_config(o);
  qd_laguerre* raw = nullptr;
  check(qd_laguerre_run(A, ns.data(), ns.size(), &cfg, &raw));
  const Laguerre l(raw);
  int monotone = 0;
  double err = 0.0, dist = 0.0;
  check(qd_laguerre_summary(l.get(), &monotone, &err, &dist));
  const std::string doc = take([&](char** out) { return qd_laguerre_json(l.get(), o.seed, out); });
  emit_json(o, doc,
            "n = " + std::to_string(ns.back()) + ": max probe error " + fmt(err) + ", max root distance " +
                fmt(dist) + ", errors " + (monotone ? "decrease" : "do not decrease") + " in n\n");
  if (!o.csv.empty()) write_file(o.csv, take([&](char** out) { return qd_laguerre_csv(l.get(), out); }));
  if (!o.svg.empty()) write_file(o.svg, take([&](char** out) { return qd_laguerre_svg(l.get(), out); }));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Critical graphs of -(z-a)(z-b)/z^2 dz^2"};
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  Options o;
  app.add_option("--a", o.a, "zero a, as re,im or re+imi");
  app.add_option("--b", o.b, "zero b");
  app.add_option("--A", o.A, "Laguerre parameter");
  app.add_option("--n", o.n, "largest Laguerre degree");
  app.add_option("--region", o.region, "x0,x1,y0,y1");
  app.add_option("--resolution", o.resolution, "survey cells per side");
  app.add_option("--samples", o.samples, "locus points per branch, or survey cells to trace");
  app.add_option("--svg", o.svg, "SVG output path");
  app.add_option("--json", o.json, "JSON output path (stdout when omitted)");
  app.add_option("--csv", o.csv, "CSV output path");
  app.add_option("--seed", o.seed, "seed for sampled checks, recorded in outputs");
  app.add_option("--tol-level", o.tol_level, "level drift tolerance per unit length");
  app.add_option("--tol-crit", o.tol_crit, "reality tolerance of the criterion");
  app.add_option("--rel-tol", o.rel_tol, "integrator relative tolerance");
  app.add_option("--abs-tol", o.abs_tol, "integrator absolute tolerance");
  app.add_option("--r-max", o.r_max, "escape radius");
  app.add_option("--step-budget", o.step_budget, "integrator steps per arc");

  auto* trace = app.add_subcommand("trace", "horizontal and vertical arcs from the zeros");
  auto* classify = app.add_subcommand("classify", "horizontal critical graph and its case");
  auto* period = app.add_subcommand("period", "period of the short arc against the closed forms");
  auto* locus = app.add_subcommand("locus", "parameters b with a critical trajectory, for fixed a");
  auto* surv = app.add_subcommand("survey", "criterion classes over a grid of b");
  auto* lag = app.add_subcommand("laguerre", "Laguerre root measures against the Cauchy transform");

  std::vector<std::string> args;
  try {
    if (const char* path = std::getenv("QD_CONFIG"); path && *path) args = config_arguments(path);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  for (int k = 1; k < argc; ++k) args.emplace_back(argv[k]);
  // Every option takes a value; gluing it on keeps "-3,3,-3,3" or "-1-2i"
  // from being read as flags.
  std::vector<std::string> joined;
  for (std::size_t k = 0; k < args.size(); ++k) {
    const std::string& t = args[k];
    if (t.rfind("--", 0) == 0 && t.size() > 2 && t.find('=') == std::string::npos && t != "--help" &&
        k + 1 < args.size()) {
      joined.push_back(t + "=" + args[++k]);
    } else {
      joined.push_back(t);
    }
  }
  std::reverse(joined.begin(), joined.end());  // CLI11 consumes a reversed vector

  try {
    app.parse(joined);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (trace->parsed()) return run_graph(o, true);
    if (classify->parsed()) return run_graph(o, false);
    if (period->parsed()) return run_period(o);
    if (locus->parsed()) return run_locus(o);
    if (surv->parsed()) return run_survey(o);
    if (lag->parsed()) return run_laguerre(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ApiError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.status);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}
