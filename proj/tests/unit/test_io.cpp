#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <regex>

#include "doctest.h"
#include "json.hpp"
#include "qdiff/io.hpp"

using namespace qd;

TEST_SUITE("io") {

TEST_CASE("numbers carry 17 significant digits") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(1.0) == "1");
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> mantissa(-1.0, 1.0);
  std::uniform_int_distribution<int> exponent(-300, 300);
  for (int k = 0; k < 1000; ++k) {
    const double x = std::ldexp(mantissa(rng), exponent(rng));
    CHECK(std::strtod(format_number(x).c_str(), nullptr) == x);
  }
}

TEST_CASE("graph documents round-trip exactly") {
  const std::pair<Complex, Complex> cases[] = {
      {1.0, 4.0}, {1.0, 1.0}, {0.0, 4.0}, {1.0, Complex(3.0, 4.0)}, {Complex(0.3, -1.1), Complex(-2.0, 0.7)}};
  for (const auto& [a, b] : cases) {
    const CriticalGraph g = classify_graph(QDiff(a, b));
    const auto vertical = trace_all_from_zeros(g.qdiff, g.config, TrajectoryKind::Vertical).arcs;
    const GraphDocument doc = make_graph_document(g, 17, vertical);
    const std::string text = to_json(doc);
    const GraphDocument back = parse_graph_document(text);
    CHECK(back == doc);
    CHECK(to_json(back) == text);
    CHECK(doc.arcs.size() == g.arcs.size() + vertical.size());
    CHECK(doc.seed == 17);
  }
}

TEST_CASE("graph document content for 1, 4") {
  const GraphDocument doc = make_graph_document(classify_graph(QDiff(1.0, 4.0)), 1);
  CHECK(doc.schema_version == "1");
  CHECK(doc.case_label == "RealPair_SegmentPlusLoop");
  CHECK(doc.criterion == "both_real");
  CHECK(doc.critical_count == 2);
  CHECK(doc.validation.period_available);
  CHECK(doc.validation.period_mismatch < 1e-8);
  CHECK(doc.validation.teichmuller_max_deviation < 1e-3);
  CHECK_FALSE(doc.validation.validation_failed);
  CHECK(make_graph_document(classify_graph(QDiff(0.0, 4.0)), 1).criterion == "n/a");
}

TEST_CASE("malformed documents are rejected") {
  auto code = [](const std::string& s) {
    try {
      parse_graph_document(s);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode{};
  };
  CHECK(code("{") == ErrorCode::InvalidArgument);
  CHECK(code("{}") == ErrorCode::InvalidArgument);
  std::string text = to_json(make_graph_document(classify_graph(QDiff(1.0, 4.0)), 1));
  text.replace(text.find("\"schema_version\":\"1\""), 20, "\"schema_version\":\"9\"");
  CHECK(code(text) == ErrorCode::InvalidArgument);
}

TEST_CASE("non-finite numbers are written as null") {
  GraphDocument doc;
  doc.criterion_distance = std::numeric_limits<double>::infinity();
  const std::string text = to_json(doc);
  CHECK(text.find("\"criterion_distance\":null") != std::string::npos);
  CHECK(std::isnan(parse_graph_document(text).criterion_distance));
  CHECK(text.back() == '\n');
}

TEST_CASE("graph SVG uses integer coordinates in a fixed viewport") {
  const CriticalGraph g = classify_graph(QDiff(1.0, 4.0));
  auto arcs = g.arcs;
  const auto v = trace_all_from_zeros(g.qdiff, g.config, TrajectoryKind::Vertical).arcs;
  arcs.insert(arcs.end(), v.begin(), v.end());
  const std::string svg = graph_svg(g.qdiff, arcs, 80.0);
  CHECK(svg.find("viewBox=\"0 0 1000000 1000000\"") != std::string::npos);
  CHECK(svg.find("stroke-dasharray") != std::string::npos);
  CHECK(svg.find("<circle") != std::string::npos);
  CHECK_FALSE(std::regex_search(svg, std::regex("d=\"[^\"]*\\.")));
  // the zero at 1 lands 1/160 of the width right of centre
  CHECK(svg.find("cx=\"506250\" cy=\"500000\"") != std::string::npos);
  CHECK(graph_svg(g.qdiff, arcs, 80.0) == svg);
}

TEST_CASE("period document") {
  const auto j = nlohmann::json::parse(period_json(QDiff(1.0, 4.0), {}, 3));
  CHECK(j["seed"] == 3);
  REQUIRE(j["periods"].size() == 1);
  CHECK(j["periods"][0]["path"] == "traced");
  CHECK(j["periods"][0]["matched"] == 2);
  CHECK(j["periods"][0]["mismatch"].get<double>() < 1e-8);
  const auto n = nlohmann::json::parse(period_json(QDiff(1.0, Complex(3.0, 4.0)), {}, 3));
  CHECK(n["periods"][0]["path"] == "segment");
  CHECK_THROWS_AS(period_json(QDiff(0.0, 4.0), {}, 1), Error);
}

TEST_CASE("locus, survey and convergence tables") {
  const GammaLocus L = gamma_locus(Complex(0.0, 1.0));
  const std::string csv = locus_csv(L, {}, 20);
  CHECK(csv.rfind("branch,t,re,im\n", 0) == 0);
  const auto lj = nlohmann::json::parse(locus_json(L, {}, 20, 4));
  CHECK(lj["max_abs_im"].get<double>() < 1e-9);
  CHECK(lj["branches"].size() == 2);

  const SurveyGrid grid = survey(1.0, {}, 11);
  const auto sj = nlohmann::json::parse(survey_json(grid, 2));
  CHECK(sj["rows"].size() == 11);
  CHECK(sj["rows"][0].get<std::string>().size() == 11);
  const std::string scsv = survey_csv(grid);
  CHECK(std::count(scsv.begin(), scsv.end(), '\n') == 1 + 121);
  CHECK(survey_svg(grid).find("viewBox=\"0 0 11 11\"") != std::string::npos);

  const ConvergenceReport rep = convergence_report(-3.0, {5, 10});
  const std::string ccsv = convergence_csv(rep);
  CHECK(ccsv.rfind("n,probe,re,im,error\n", 0) == 0);
  CHECK(std::count(ccsv.begin(), ccsv.end(), '\n') == 1 + 2 * 8);
  const auto cj = nlohmann::json::parse(convergence_json(rep, 6));
  CHECK(cj["rows"].size() == 2);
  CHECK(cj["rows"][1]["roots"].size() == 10);
  CHECK(convergence_svg(rep).find("<circle") != std::string::npos);
}

}  // TEST_SUITE
