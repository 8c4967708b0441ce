#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "polybound/branch_bound.hpp"
#include "polybound/milp_model.hpp"

using namespace polybound;

namespace {

LiftedVar make_var(int id, bool binary) {
  LiftedVar v;
  v.id = id;
  v.name = (binary ? "u" : "r") + std::to_string(id);
  v.lower = 0.0;
  v.upper = 1.0;
  v.binary = binary;
  v.kind = binary ? LiftedKind::Unit : LiftedKind::Remainder;
  return v;
}

}  // namespace

TEST_CASE("pp1 lower program optimum and witness") {
  auto model = build_lower_program(fixtures::pp1(), fixtures::pp1_params());
  auto out = solve_milp(model);
  REQUIRE(out.optimal());
  CHECK(out.value == doctest::Approx(-124.79947916666667).epsilon(1e-12));
  CHECK(out.gap == 0.0);
  CHECK_FALSE(out.limit_reached);
  auto x = map_to_original(out.point, model.expansions, fixtures::pp1().variables);
  CHECK(x[0] == doctest::Approx(3.0));
  CHECK(x[1] == doctest::Approx(0.0));
  CHECK(x[2] == doctest::Approx(8.0));
}

TEST_CASE("model without binaries solves at the root") {
  auto pp = parse_program("minimize 2*x - y; var x in [1, 4]; var y in [0, 2];");
  auto model = build_lower_program(pp, ReformParams{});
  REQUIRE(model.num_binaries() == 0);
  auto out = solve_milp(model);
  REQUIRE(out.optimal());
  CHECK(out.nodes == 1);
  CHECK(out.value == solve_lp(model).value);
  CHECK(out.value == doctest::Approx(0.0));  // x = 1, y = 2
}

TEST_CASE("single binary objective") {
  MilpModel m;
  m.name = "one-bit";
  m.vars = {make_var(0, true)};
  m.objective.add(0, 1.0);
  auto out = solve_milp(m);
  REQUIRE(out.optimal());
  CHECK(out.value == doctest::Approx(0.0));
  CHECK(out.point.assignment[0] == 0.0);
}

TEST_CASE("infeasible MILP is reported") {
  MilpModel m;
  m.name = "infeasible";
  m.vars = {make_var(0, true), make_var(1, false)};
  LinearConstraintRow row;  // u + r <= -1 cannot hold with both in [0, 1]
  row.expr.add(0, 1.0);
  row.expr.add(1, 1.0);
  row.rhs = -1.0;
  m.rows.push_back(row);
  auto out = solve_milp(m);
  CHECK(out.status == MilpOutcome::Status::Infeasible);
  CHECK_FALSE(out.limit_reached);
}

TEST_CASE("branch-and-bound matches the enumeration oracle on pp1") {
  auto model = build_lower_program(fixtures::pp1(), fixtures::pp1_params());
  auto oracle = enumerate_oracle(model);
  REQUIRE(oracle.optimal());
  CHECK(oracle.nodes == 128);  // 2^7 patterns
  auto bb = solve_milp(model);
  REQUIRE(bb.optimal());
  CHECK(bb.value == doctest::Approx(oracle.value).epsilon(1e-10));
  CHECK(bb.nodes < oracle.nodes);  // pruning must beat brute force here
}

TEST_CASE("oracle refuses large binary counts") {
  MilpModel m;
  m.name = "too-big";
  for (int i = 0; i < 26; ++i) m.vars.push_back(make_var(i, true));
  CHECK_THROWS_AS(enumerate_oracle(m), DomainError);
}

TEST_CASE("node limit yields undecided without an incumbent") {
  auto model = build_lower_program(fixtures::pp1(), fixtures::pp1_params());
  MilpOptions opts;
  opts.node_limit = 1;
  auto out = solve_milp(model, opts);
  CHECK(out.limit_reached);
  CHECK(out.status == MilpOutcome::Status::Undecided);
  CHECK(out.nodes == 1);
}

TEST_CASE("a gap is reported when limits stop the search early") {
  auto model = build_lower_program(fixtures::pp3(), fixtures::pp3_params());
  MilpOptions opts;
  opts.node_limit = 400;
  auto out = solve_milp(model, opts);
  CHECK(out.limit_reached);
  if (out.optimal()) {
    CHECK(out.gap > 0.0);
    // incumbent minus gap is a valid lower bound on the true optimum
    CHECK(out.value - out.gap <= -10.9965 + 1e-6);
    CHECK(out.value >= -10.9966);
  } else {
    CHECK(out.status == MilpOutcome::Status::Undecided);
  }
}

TEST_CASE("time limit is honoured") {
  auto model = build_lower_program(fixtures::pp3(), fixtures::pp3_params());
  MilpOptions opts;
  opts.time_limit = 0.15;
  auto out = solve_milp(model, opts);
  CHECK(out.limit_reached);
}

TEST_CASE("multithreaded search finds the same optimum") {
  auto model = build_lower_program(fixtures::pp1(), fixtures::pp1_params());
  MilpOptions opts;
  opts.threads = 2;
  auto out = solve_milp(model, opts);
  REQUIRE(out.optimal());
  CHECK(out.value == doctest::Approx(-124.79947916666667).epsilon(1e-12));
}

TEST_CASE("single-threaded search is deterministic") {
  auto model = build_lower_program(fixtures::pp1(), fixtures::pp1_params());
  auto a = solve_milp(model);
  auto b = solve_milp(model);
  CHECK(a.value == b.value);
  CHECK(a.nodes == b.nodes);
  CHECK(a.lp_iterations == b.lp_iterations);
  CHECK(a.point.assignment == b.point.assignment);
}
