#include <cmath>
#include <cstring>
#include <limits>
#include <string>
#include <thread>

#include "doctest.h"
#include "qdiff/qdiff.h"

namespace {

std::string own(char* s) {
  std::string out = s ? s : "";
  qd_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("status names and versions") {
  CHECK(std::string(qd_status_name(QD_OK)) == "ok");
  CHECK(std::string(qd_status_name(QD_ERR_VALIDATION)) == "validation");
  CHECK(std::strlen(qd_version()) > 0);
}

TEST_CASE("invalid input is reported with a message") {
  qd_diff* d = nullptr;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK(qd_diff_new({nan, 0.0}, {1.0, 0.0}, &d) == QD_ERR_INVALID_ARGUMENT);
  CHECK(d == nullptr);
  CHECK(std::strlen(qd_last_error()) > 0);
  CHECK(qd_diff_new({0.0, 0.0}, {0.0, 0.0}, &d) == QD_ERR_INVALID_DIFFERENTIAL);
  CHECK(qd_diff_new({1.0, 0.0}, {4.0, 0.0}, nullptr) == QD_ERR_INVALID_ARGUMENT);
  CHECK(qd_graph_summarize(nullptr, nullptr) == QD_ERR_INVALID_ARGUMENT);
  qd_diff_free(nullptr);
  qd_string_free(nullptr);
}

TEST_CASE("the last error is per thread") {
  qd_diff* d = nullptr;
  CHECK(qd_diff_new({0.0, 0.0}, {0.0, 0.0}, &d) != QD_OK);
  std::string other = "unset";
  std::thread([&] { other = qd_last_error(); }).join();
  CHECK(other.empty());
  CHECK(std::strlen(qd_last_error()) > 0);
}

TEST_CASE("differential queries") {
  qd_diff* d = nullptr;
  REQUIRE(qd_diff_new({1.0, 0.0}, {4.0, 0.0}, &d) == QD_OK);
  qd_complex a, b, r;
  CHECK(qd_diff_zeros(d, &a, &b) == QD_OK);
  CHECK(a.re == 1.0);
  CHECK(b.re == 4.0);
  CHECK(qd_diff_residue_origin(d, -1, &r) == QD_OK);
  CHECK(r.re == doctest::Approx(-2.0));
  CHECK(qd_diff_residue_origin(d, 0, &r) == QD_ERR_INVALID_ARGUMENT);
  qd_criterion c;
  CHECK(qd_diff_criterion(d, 1e-9, &c) == QD_OK);
  CHECK(c.cls == QD_CRITERION_BOTH_REAL);
  CHECK(qd_diff_criterion(d, -1.0, &c) == QD_ERR_INVALID_ARGUMENT);
  char* s = nullptr;
  REQUIRE(qd_diff_period_json(d, nullptr, 1, &s) == QD_OK);
  CHECK(own(s).find("\"matched\":2") != std::string::npos);
  qd_diff_free(d);
}

TEST_CASE("graph handle") {
  qd_diff* d = nullptr;
  REQUIRE(qd_diff_new({1.0, 0.0}, {4.0, 0.0}, &d) == QD_OK);
  qd_trace_config cfg;
  qd_trace_config_default(&cfg);
  qd_graph* g = nullptr;
  REQUIRE(qd_graph_classify(d, &cfg, &g) == QD_OK);
  qd_graph_summary s;
  REQUIRE(qd_graph_summarize(g, &s) == QD_OK);
  CHECK(std::string(s.case_label) == "RealPair_SegmentPlusLoop");
  CHECK(s.critical_count == 2);
  CHECK(s.loop_zero == 0);
  CHECK(s.teichmuller_max_deviation < 1e-3);
  CHECK(qd_graph_validate(g) == QD_OK);

  char* json = nullptr;
  REQUIRE(qd_graph_json(g, 7, 1, &json) == QD_OK);
  const std::string text = own(json);
  char* again = nullptr;
  REQUIRE(qd_graph_document_normalize(text.c_str(), &again) == QD_OK);
  CHECK(own(again) == text);
  CHECK(qd_graph_document_normalize("[1,2", &again) == QD_ERR_INVALID_ARGUMENT);

  char* svg = nullptr;
  REQUIRE(qd_graph_svg(g, 1, &svg) == QD_OK);
  CHECK(own(svg).find("stroke-dasharray") != std::string::npos);
  qd_graph_free(g);
  qd_diff_free(d);
}

TEST_CASE("bad trace configurations are rejected") {
  qd_diff* d = nullptr;
  REQUIRE(qd_diff_new({1.0, 0.0}, {4.0, 0.0}, &d) == QD_OK);
  qd_trace_config cfg;
  qd_trace_config_default(&cfg);
  cfg.level_tol = 0.0;
  qd_graph* g = nullptr;
  CHECK(qd_graph_classify(d, &cfg, &g) == QD_ERR_INVALID_ARGUMENT);
  qd_trace_config_default(&cfg);
  cfg.r_max = -1.0;
  CHECK(qd_graph_classify(d, &cfg, &g) == QD_ERR_INVALID_ARGUMENT);
  CHECK(g == nullptr);
  qd_diff_free(d);
}

TEST_CASE("a loose criterion tolerance produces a validation failure") {
  qd_diff* d = nullptr;
  REQUIRE(qd_diff_new({1.0, 0.0}, {3.0, 4.0}, &d) == QD_OK);
  qd_trace_config cfg;
  qd_trace_config_default(&cfg);
  cfg.crit_tol = 10.0;
  qd_graph* g = nullptr;
  REQUIRE(qd_graph_classify(d, &cfg, &g) == QD_OK);
  CHECK(qd_graph_validate(g) == QD_ERR_VALIDATION);
  CHECK(std::string(qd_last_error()).find("no short trajectory") != std::string::npos);
  qd_graph_free(g);
  qd_diff_free(d);
}

TEST_CASE("locus, survey and laguerre handles") {
  char* s = nullptr;
  REQUIRE(qd_locus_json({0.0, 1.0}, qd_region_default(), 20, 1, &s) == QD_OK);
  CHECK(own(s).find("\"branches\"") != std::string::npos);
  CHECK(qd_locus_csv({0.0, 0.0}, qd_region_default(), 20, &s) == QD_ERR_DEGENERATE);
  CHECK(qd_locus_csv({1.0, 0.0}, {1.0, 0.0, -1.0, 1.0}, 20, &s) == QD_ERR_INVALID_ARGUMENT);

  qd_survey* sv = nullptr;
  REQUIRE(qd_survey_run({1.0, 0.0}, qd_region_default(), 21, 5, 3, nullptr, &sv) == QD_OK);
  int traced = 0, unamb = 0, agree = 0;
  CHECK(qd_survey_counts(sv, &traced, &unamb, &agree) == QD_OK);
  CHECK(traced == 5);
  CHECK(agree == unamb);
  REQUIRE(qd_survey_csv(sv, &s) == QD_OK);
  CHECK(own(s).rfind("i,j,", 0) == 0);
  qd_survey_free(sv);

  const int ns[] = {5, 10};
  qd_laguerre* l = nullptr;
  REQUIRE(qd_laguerre_run({-3.0, 0.0}, ns, 2, nullptr, &l) == QD_OK);
  int mono = 0;
  double err = 0.0, dist = 0.0;
  CHECK(qd_laguerre_summary(l, &mono, &err, &dist) == QD_OK);
  CHECK(err < 0.1);
  CHECK(dist < 0.5);
  REQUIRE(qd_laguerre_svg(l, &s) == QD_OK);
  CHECK(own(s).find("<svg") == 0);
  qd_laguerre_free(l);
  CHECK(qd_laguerre_run({-0.5, 0.0}, ns, 2, nullptr, &l) == QD_ERR_DOMAIN);
  CHECK(qd_laguerre_run({-3.0, 0.0}, ns, 0, nullptr, &l) == QD_ERR_INVALID_ARGUMENT);
}
