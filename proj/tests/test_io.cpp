#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "polybound/driver.hpp"
#include "polybound/mps.hpp"
#include "polybound/report.hpp"

using namespace polybound;
using nlohmann::json;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("verdict names") {
  CHECK(verdict_name(Verdict::Bounded) == "bounded");
  CHECK(verdict_name(Verdict::LowerOnly) == "lower-only");
  CHECK(verdict_name(Verdict::InfeasibleProven) == "infeasible-proven");
  CHECK(verdict_name(Verdict::Undecided) == "feasibility-unknown");
}

TEST_CASE("bound report JSON") {
  auto pp = fixtures::pp1();
  auto params = fixtures::pp1_params();
  auto res = bound_global_minimum(pp, params);
  auto report = make_bound_report(pp, params, res, 0.123);

  const std::string text = write_report(report, ReportFormat::Json, false);
  const json doc = json::parse(text);
  CHECK(doc.at("schema") == "report_v1");
  CHECK(doc.at("problem") == "pp1");
  CHECK(doc.at("mode") == "bound");
  CHECK(doc.at("verdict") == "bounded");
  CHECK(doc.at("interval").at("lower").get<double>() ==
        doctest::Approx(-124.79947916666667));
  CHECK(doc.at("interval").at("upper").get<double>() == doctest::Approx(-119.0));
  CHECK(doc.at("variables").size() == 3);
  CHECK(doc.at("variables")[0].at("sigma") == 3);
  CHECK(doc.at("variables")[0].at("kappa").get<double>() == doctest::Approx(0.375));
  CHECK(doc.at("errors")[0].at("polynomial") == "objective");
  CHECK(doc.at("errors")[0].at("errub").get<double>() ==
        doctest::Approx(17.4140625));
  CHECK(doc.at("model").at("phi") == 7);
  CHECK(doc.at("solver").at("limit_reached") == false);
  CHECK(doc.at("witness_lower").at("feasible") == true);
  CHECK_FALSE(doc.contains("meta"));  // include_meta = false

  // with meta the wall time appears, and only there
  const json with_meta =
      json::parse(write_report(report, ReportFormat::Json, true));
  CHECK(with_meta.at("meta").at("wall_seconds").get<double>() ==
        doctest::Approx(0.123));

  // meta-free output is deterministic: a second run serializes identically
  auto res2 = bound_global_minimum(pp, params);
  auto report2 = make_bound_report(pp, params, res2, 99.0);
  CHECK(write_report(report2, ReportFormat::Json, false) == text);
}

TEST_CASE("infeasible-proven report has a verdict but no interval") {
  auto pp = parse_program(
      "minimize x; subject to x >= 2; var x in [0, 1];", "empty");
  auto res = bound_global_minimum(pp, ReformParams{});
  auto report = make_bound_report(pp, ReformParams{}, res, 0.0);
  const json doc = json::parse(write_report(report, ReportFormat::Json, false));
  CHECK(doc.at("verdict") == "infeasible-proven");
  CHECK(doc.at("interval").empty());
  CHECK_FALSE(doc.contains("witness_lower"));
}

TEST_CASE("text report mentions the key numbers") {
  auto pp = fixtures::pp1();
  auto params = fixtures::pp1_params();
  auto res = bound_global_minimum(pp, params);
  auto report = make_bound_report(pp, params, res, 0.0);
  const std::string text = write_report(report, ReportFormat::Text, false);
  CHECK(text.find("pp1") != std::string::npos);
  CHECK(text.find("bounded") != std::string::npos);
  CHECK(text.find("-119") != std::string::npos);
  CHECK(text.find("-124.79947916666667") != std::string::npos);
}

TEST_CASE("MPS fixed-format export") {
  auto model = build_lower_program(fixtures::pp1(), fixtures::pp1_params());
  auto exp = export_milp(model, ExportFormat::MpsFixed);
  const auto lines = lines_of(exp.content);
  REQUIRE_FALSE(lines.empty());
  CHECK(lines.front().rfind("NAME", 0) == 0);
  CHECK(lines.back() == "ENDATA");

  // section headers start in column 1; data lines are indented
  std::vector<std::string> sections;
  for (const auto& line : lines) {
    if (!line.empty() && line[0] != ' ' && line[0] != '*') sections.push_back(line);
  }
  REQUIRE(sections.size() >= 6);
  CHECK(sections[1] == "ROWS");
  CHECK(sections[2] == "COLUMNS");
  CHECK(sections[3] == "RHS");
  CHECK(sections[4] == "BOUNDS");
  CHECK(sections[5] == "ENDATA");

  // binaries live inside an INTEGER marker block
  CHECK(exp.content.find("'MARKER'") != std::string::npos);
  CHECK(exp.content.find("'INTORG'") != std::string::npos);
  CHECK(exp.content.find("'INTEND'") != std::string::npos);

  // data fields sit at the classical fixed columns (2, 5, 15, 25, 40, 50)
  bool checked_column_line = false;
  bool in_columns = false;
  for (const auto& line : lines) {
    if (line == "COLUMNS") {
      in_columns = true;
      continue;
    }
    if (in_columns && !line.empty() && line[0] != ' ') break;
    if (in_columns && line.find("'MARKER'") == std::string::npos &&
        line.size() > 25) {
      CHECK(line[0] == ' ');
      CHECK(line[4] != ' ');   // field 2: column name at offset 4
      CHECK(line[14] != ' ');  // field 3: row name at offset 14
      CHECK(line[24] != ' ');  // field 4: value at offset 24
      checked_column_line = true;
      break;
    }
  }
  CHECK(checked_column_line);

  // pp1 names are all short, so no renaming is needed
  CHECK(exp.renamed.empty());
}

TEST_CASE("MPS export renames names longer than eight characters") {
  auto pp = parse_program(
      "minimize a_very_long_name * a_very_long_name; "
      "var a_very_long_name in [0, 2];");
  auto model = build_lower_program(pp, fixtures::sigmas({1}));
  // lifted names stay short (u1_1, r1, y1); force a long one
  model.vars[0].name = "unit_with_a_long_name";
  auto exp = export_milp(model, ExportFormat::MpsFixed);
  REQUIRE(exp.renamed.size() == 1);
  CHECK(exp.renamed[0].first == "unit_with_a_long_name");
  CHECK(exp.renamed[0].second.size() <= 8);
  CHECK(exp.content.find("unit_with_a_long_name") == std::string::npos);
  CHECK(exp.content.find(exp.renamed[0].second) != std::string::npos);
}

TEST_CASE("empty model still exports valid MPS") {
  MilpModel m;
  m.name = "void";
  auto exp = export_milp(m, ExportFormat::MpsFixed);
  const auto lines = lines_of(exp.content);
  CHECK(lines.front().rfind("NAME", 0) == 0);
  CHECK(lines.back() == "ENDATA");
}

TEST_CASE("native-json round trip is lossless") {
  auto model = build_lower_program(fixtures::pp2(), fixtures::pp2_params());
  auto exp = export_milp(model, ExportFormat::NativeJson);
  CHECK(exp.renamed.empty());
  const json doc = json::parse(exp.content);
  CHECK(doc.at("format") == "polybound-milp-v1");

  auto back = import_native_json(exp.content);
  CHECK(back.name == model.name);
  REQUIRE(back.vars.size() == model.vars.size());
  REQUIRE(back.rows.size() == model.rows.size());
  CHECK(back.objective.constant == model.objective.constant);
  CHECK(back.objective.terms == model.objective.terms);
  for (std::size_t i = 0; i < model.rows.size(); ++i) {
    CHECK(back.rows[i].expr.terms == model.rows[i].expr.terms);
    CHECK(back.rows[i].rhs == model.rows[i].rhs);
  }
  for (std::size_t j = 0; j < model.vars.size(); ++j) {
    CHECK(back.vars[j].name == model.vars[j].name);
    CHECK(back.vars[j].binary == model.vars[j].binary);
    CHECK(back.vars[j].lower == model.vars[j].lower);
    CHECK(back.vars[j].upper == model.vars[j].upper);
  }

  // re-export is byte identical
  CHECK(export_milp(back, ExportFormat::NativeJson).content == exp.content);

  // the re-imported model solves to the same optimum
  CHECK(solve_lp(back).value == solve_lp(model).value);
}
