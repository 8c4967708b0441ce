#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <limits>

#include "fixtures.hpp"
#include "polybound/milp_model.hpp"
#include "polybound/simplex.hpp"

using namespace polybound;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

LiftedVar make_var(int id, double lower = 0.0, double upper = 1.0) {
  LiftedVar v;
  v.id = id;
  v.name = "v" + std::to_string(id);
  v.lower = lower;
  v.upper = upper;
  return v;
}

MilpModel tiny(std::initializer_list<LiftedVar> vars) {
  MilpModel m;
  m.name = "tiny";
  m.vars = vars;
  return m;
}

}  // namespace

TEST_CASE("unconstrained box minimization") {
  // minimize -x, x in [0, 1] -> optimal(-1, x = 1)
  auto m = tiny({make_var(0)});
  m.objective.add(0, -1.0);
  auto out = solve_lp(m);
  REQUIRE(out.optimal());
  CHECK(out.value == doctest::Approx(-1.0));
  CHECK(out.point[0] == doctest::Approx(1.0));

  // the objective constant is carried through
  m.objective.constant = 5.0;
  CHECK(solve_lp(m).value == doctest::Approx(4.0));
}

TEST_CASE("simple constrained optimum") {
  // minimize -x - 2y s.t. x + y <= 1, over the unit box
  auto m = tiny({make_var(0), make_var(1)});
  m.objective.add(0, -1.0);
  m.objective.add(1, -2.0);
  LinearConstraintRow row;
  row.expr.add(0, 1.0);
  row.expr.add(1, 1.0);
  row.rhs = 1.0;
  m.rows.push_back(row);
  auto out = solve_lp(m);
  REQUIRE(out.optimal());
  CHECK(out.value == doctest::Approx(-2.0));
  CHECK(out.point[0] == doctest::Approx(0.0));
  CHECK(out.point[1] == doctest::Approx(1.0));
}

TEST_CASE("infeasible constraint pair") {
  // x + y <= 1 and x + y >= 2 cannot both hold in the unit box
  auto m = tiny({make_var(0), make_var(1)});
  LinearConstraintRow le, ge;
  le.expr.add(0, 1.0);
  le.expr.add(1, 1.0);
  le.rhs = 1.0;
  ge.expr.add(0, -1.0);
  ge.expr.add(1, -1.0);
  ge.rhs = -2.0;
  m.rows = {le, ge};
  CHECK(solve_lp(m).status == LpOutcome::Status::Infeasible);
}

TEST_CASE("unbounded ray is detected") {
  auto m = tiny({make_var(0, 0.0, kInf), make_var(1)});
  m.objective.add(0, -1.0);
  LinearConstraintRow row;  // x does not appear: it can grow forever
  row.expr.add(1, 1.0);
  row.rhs = 1.0;
  m.rows.push_back(row);
  CHECK(solve_lp(m).status == LpOutcome::Status::Unbounded);
}

TEST_CASE("equality-style row pairs are handled") {
  // x + y = 1 encoded as two inequalities; minimize x
  auto m = tiny({make_var(0), make_var(1)});
  m.objective.add(0, 1.0);
  LinearConstraintRow le, ge;
  le.expr.add(0, 1.0);
  le.expr.add(1, 1.0);
  le.rhs = 1.0;
  ge.expr.add(0, -1.0);
  ge.expr.add(1, -1.0);
  ge.rhs = -1.0;
  m.rows = {le, ge};
  auto out = solve_lp(m);
  REQUIRE(out.optimal());
  CHECK(out.value == doctest::Approx(0.0));
  CHECK(out.point[0] + out.point[1] == doctest::Approx(1.0));
}

TEST_CASE("extra bounds tighten and validate") {
  auto m = tiny({make_var(0)});
  m.objective.add(0, -1.0);
  auto out = solve_lp(m, {{0, VarBounds{0.0, 0.25}}});
  REQUIRE(out.optimal());
  CHECK(out.value == doctest::Approx(-0.25));

  CHECK_THROWS_AS(solve_lp(m, {{0, VarBounds{-1.0, 2.0}}}), DomainError);
  CHECK_THROWS_AS(solve_lp(m, {{5, VarBounds{0.0, 1.0}}}), DomainError);
}

TEST_CASE("pp1 relaxation stays below the MILP optimum") {
  auto model = build_lower_program(fixtures::pp1(), fixtures::pp1_params());
  auto out = solve_lp(model);
  REQUIRE(out.optimal());
  CHECK(out.value <= -124.799);
  CHECK(out.iterations > 0);

  // weak duality spot check: feasible lifted points cannot beat the LP
  LiftedPoint zero;
  zero.assignment.assign(model.num_vars(), 0.0);
  bool zero_feasible = true;
  for (const auto& row : model.rows) {
    if (row.expr.evaluate(zero.assignment) > row.rhs + 1e-9) zero_feasible = false;
  }
  if (zero_feasible) {
    CHECK(model.objective.evaluate(zero.assignment) >= out.value - 1e-9);
  }
}

TEST_CASE("pp3 root relaxation value") {
  auto model = build_lower_program(fixtures::pp3(), fixtures::pp3_params());
  auto out = solve_lp(model);
  REQUIRE(out.optimal());
  CHECK(out.value == doctest::Approx(-16.66870147705078).epsilon(1e-9));
}

TEST_CASE("solutions respect bounds and constraints") {
  auto model = build_lower_program(fixtures::pp2(), fixtures::pp2_params());
  auto out = solve_lp(model);
  REQUIRE(out.optimal());
  for (const auto& v : model.vars) {
    const double x = out.point[static_cast<std::size_t>(v.id)];
    CHECK(x >= v.lower - 1e-7);
    CHECK(x <= v.upper + 1e-7);
  }
  for (const auto& row : model.rows) {
    CHECK(row.expr.evaluate(out.point) <= row.rhs + 1e-6);
  }
}

TEST_CASE("solve_lp is deterministic") {
  auto model = build_lower_program(fixtures::pp3(), fixtures::pp3_params());
  auto a = solve_lp(model);
  auto b = solve_lp(model);
  CHECK(a.value == b.value);
  CHECK(a.iterations == b.iterations);
  CHECK(a.point == b.point);
}
