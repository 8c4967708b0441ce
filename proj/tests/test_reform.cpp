#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "fixtures.hpp"
#include "polybound/reform.hpp"

using namespace polybound;

namespace {

// Canonical (coefficients, rhs) form of a constraint set, independent of row
// order and term order.
std::multiset<std::pair<std::map<LiftedId, double>, double>> row_set(
    const std::vector<LinearConstraintRow>& rows) {
  std::multiset<std::pair<std::map<LiftedId, double>, double>> out;
  for (const auto& r : rows) out.insert({r.expr.terms, r.rhs - r.expr.constant});
  return out;
}

}  // namespace

TEST_CASE("kappa_from_sigma on the worked examples") {
  // example 1, sigma = (3, 2, 2)
  CHECK(kappa_from_sigma(2, 5, 3, false) == doctest::Approx(0.375).epsilon(1e-6));
  CHECK(kappa_from_sigma(0, 10, 2, false) == doctest::Approx(2.5).epsilon(1e-6));
  CHECK(kappa_from_sigma(4, 8, 2, false) == doctest::Approx(1.0).epsilon(1e-6));

  // example 2: discrete x1 (sigma=3), continuous x3 (sigma=9), x4 (sigma=5)
  CHECK(kappa_from_sigma(1, 1.375, 3, true) ==
        doctest::Approx(0.375 / 7.0).epsilon(1e-6));
  CHECK(kappa_from_sigma(47.5, 52.5, 9, false) ==
        doctest::Approx(0.00976562).epsilon(1e-6));
  CHECK(kappa_from_sigma(90, 112, 5, false) == doctest::Approx(0.6875).epsilon(1e-6));

  // kappa = beta - alpha gives sigma = 0
  CHECK(kappa_from_sigma(0, 1, 0, false) == doctest::Approx(1.0));
}

TEST_CASE("sigma_from_kappa inverts kappa_from_sigma") {
  CHECK(sigma_from_kappa(2, 5, 0.375, false) == 3);
  CHECK(sigma_from_kappa(0, 10, 2.5, false) == 2);
  CHECK(sigma_from_kappa(4, 8, 1.0, false) == 2);
  CHECK(sigma_from_kappa(47.5, 52.5, 0.009765625, false) == 9);
  CHECK(sigma_from_kappa(90, 112, 0.6875, false) == 5);
  // discrete: delta = 1
  CHECK(sigma_from_kappa(1, 1.375, 0.0625, true) == 3);
  CHECK(sigma_from_kappa(0, 1, 1.0, false) == 0);
}

TEST_CASE("resolve_params applies the per-kind rules") {
  auto pp1 = normalize_program(fixtures::pp1());

  SUBCASE("sigma given") {
    auto rp = resolve_params(pp1, fixtures::pp1_params());
    CHECK(rp.sigma == std::vector<int>{3, 2, 2});
    CHECK(rp.kappa[0] == doctest::Approx(0.375));
    CHECK(rp.kappa[1] == doctest::Approx(2.5));
    CHECK(rp.kappa[2] == doctest::Approx(1.0));
  }

  SUBCASE("kappa given derives sigma") {
    ReformParams params;
    params.per_variable[0].kappa = 0.375;
    params.per_variable[1].kappa = 2.5;
    params.per_variable[2].kappa = 1.0;
    auto rp = resolve_params(pp1, params);
    CHECK(rp.sigma == std::vector<int>{3, 2, 2});
  }

  SUBCASE("default sigma fills the gaps") {
    ReformParams params;
    params.default_sigma = 2;
    auto rp = resolve_params(pp1, params);
    CHECK(rp.sigma == std::vector<int>{2, 2, 2});
  }

  SUBCASE("discrete variables always use the declared step") {
    auto pp2 = normalize_program(fixtures::pp2());
    auto rp = resolve_params(pp2, fixtures::pp2_params());
    CHECK(rp.sigma == std::vector<int>{3, 3, 9, 5});
    CHECK(rp.kappa[0] == doctest::Approx(0.0625));
    CHECK(rp.kappa[1] == doctest::Approx(0.0625));
    CHECK(rp.kappa[2] == doctest::Approx(0.009765625));
    CHECK(rp.kappa[3] == doctest::Approx(0.6875));
  }

  SUBCASE("linear-only variables collapse to sigma = 0") {
    auto pp = normalize_program(parse_program(
        "minimize x*y + z; subject to z >= 0;"
        "var x in [0,1]; var y in [0,1]; var z in [0,5];"));
    auto rp = resolve_params(pp, ReformParams{});
    CHECK(rp.sigma[0] == 3);
    CHECK(rp.sigma[1] == 3);
    CHECK(rp.sigma[2] == 0);  // z appears only linearly
    CHECK(rp.kappa[2] == doctest::Approx(5.0));
  }
}

TEST_CASE("appears_only_linearly") {
  auto pp1 = normalize_program(fixtures::pp1());
  CHECK_FALSE(appears_only_linearly(pp1, 0));  // x1^2 in the objective
  auto pp = normalize_program(
      parse_program("minimize x + y^2; var x in [0,1]; var y in [0,1];"));
  CHECK(appears_only_linearly(pp, 0));
  CHECK_FALSE(appears_only_linearly(pp, 1));
}

TEST_CASE("expand_variable realizes the expansion") {
  VariableSpec x2{"x2", 0.0, 10.0, VarKind::Continuous, 0.0};
  LiftedId next = 0;
  auto exp = expand_variable(x2, 1, 2, 2.5, &next);
  CHECK(exp.alpha == 0.0);
  CHECK(exp.kappa == doctest::Approx(2.5));
  CHECK(exp.sigma == 2);
  CHECK(exp.unit_ids.size() == 2);
  CHECK(exp.remainder_id.has_value());
  CHECK(exp.unit_weight(1) == doctest::Approx(2.5));
  CHECK(exp.unit_weight(2) == doctest::Approx(5.0));
  // max attainable 2.5*3 + 2.5 = 10 = beta: no extra bound constraint
  CHECK(exp.max_attainable() == doctest::Approx(10.0));
  CHECK_FALSE(exp.needs_upper_bound_constraint);

  // sigma = 0 continuous: single remainder spanning the whole box
  VariableSpec unit{"x", 0.0, 1.0, VarKind::Continuous, 0.0};
  LiftedId next2 = 0;
  auto triv = expand_variable(unit, 0, 0, 1.0, &next2);
  CHECK(triv.unit_ids.empty());
  CHECK(triv.remainder_id.has_value());
  CHECK_FALSE(triv.needs_upper_bound_constraint);

  // discrete x1 of example 2: max attainable 1 + 0.0625*7 = 1.4375 > 1.375
  VariableSpec d{"x1", 1.0, 1.375, VarKind::Discrete, 0.0625};
  LiftedId next3 = 0;
  auto dexp = expand_variable(d, 0, 3, 0.0625, &next3);
  CHECK_FALSE(dexp.remainder_id.has_value());
  CHECK(dexp.max_attainable() == doctest::Approx(1.4375));
  CHECK(dexp.needs_upper_bound_constraint);
}

TEST_CASE("expand_monomial reproduces the paper's x2*x3 element list") {
  auto pp1 = normalize_program(fixtures::pp1());
  auto rp = resolve_params(pp1, fixtures::pp1_params());
  std::vector<VariableExpansion> exps;
  LiftedId next = 0;
  for (int i = 0; i < 3; ++i) {
    exps.push_back(expand_variable(pp1.variables[static_cast<std::size_t>(i)], i,
                                   rp.sigma[static_cast<std::size_t>(i)],
                                   rp.kappa[static_cast<std::size_t>(i)], &next));
  }
  const LiftedId u21 = exps[1].unit_ids[0], u22 = exps[1].unit_ids[1];
  const LiftedId u31 = exps[2].unit_ids[0], u32 = exps[2].unit_ids[1];
  const LiftedId r2 = *exps[1].remainder_id, r3 = *exps[2].remainder_id;

  auto elems = expand_monomial(Monomial::var(1) * Monomial::var(2), exps);
  REQUIRE(elems.size() == 12);

  using Units = std::vector<LiftedId>;
  using Rems = std::vector<LiftedId>;
  struct Want {
    double coeff;
    Units units;
    Rems rems;
  };
  // Coefficients and variables of z_{9,1}..z_{9,12}, in expansion order.
  const Want want[12] = {
      {10.0, {u21}, {}},      {2.5, {u21, u31}, {}}, {5.0, {u21, u32}, {}},
      {2.5, {u21}, {r3}},     {20.0, {u22}, {}},     {5.0, {u22, u31}, {}},
      {10.0, {u22, u32}, {}}, {5.0, {u22}, {r3}},    {10.0, {}, {r2}},
      {2.5, {u31}, {r2}},     {5.0, {u32}, {r2}},    {2.5, {}, {r2, r3}},
  };
  for (int k = 0; k < 12; ++k) {
    CAPTURE(k);
    CHECK(elems[static_cast<std::size_t>(k)].coefficient() ==
          doctest::Approx(want[k].coeff));
    CHECK(elems[static_cast<std::size_t>(k)].unit_vars == want[k].units);
    CHECK(elems[static_cast<std::size_t>(k)].remainder_vars == want[k].rems);
  }
  // the two-remainder element averages: a = coeff / n_r
  CHECK(elems[11].a == doctest::Approx(1.25));
  CHECK(elems[11].n_kl() == 2);

  // constant monomial -> single element a = 1, no variables
  auto one = expand_monomial(Monomial(), exps);
  REQUIRE(one.size() == 1);
  CHECK(one[0].a == doctest::Approx(1.0));
  CHECK(one[0].n_u() == 0);
  CHECK(one[0].n_r() == 0);
}

TEST_CASE("product constraints match the paper's displays") {
  UnitProductRegistry reg(100);

  SUBCASE("pure unit product y = u21 * u31") {
    auto res = reg.resolve({1, 3}, std::nullopt);  // ids of u21, u31
    REQUIRE_FALSE(res.is_constant);
    auto rows = product_constraints(reg.products()[0]);
    const LiftedId y = res.id;
    std::multiset<std::pair<std::map<LiftedId, double>, double>> want{
        {{{y, 1.0}, {1, -1.0}}, 0.0},         // y <= u21
        {{{y, 1.0}, {3, -1.0}}, 0.0},         // y <= u31
        {{{1, 1.0}, {3, 1.0}, {y, -1.0}}, 1.0},  // u21 + u31 - y <= 1
    };
    CHECK(row_set(rows) == want);
  }

  SUBCASE("mixed product y = u21 * r3") {
    auto res = reg.resolve({1}, 7);  // u21 with remainder r3
    auto rows = product_constraints(reg.products()[0]);
    const LiftedId y = res.id;
    std::multiset<std::pair<std::map<LiftedId, double>, double>> want{
        {{{y, 1.0}, {1, -1.0}}, 0.0},            // y <= u21
        {{{7, 1.0}, {1, 1.0}, {y, -1.0}}, 1.0},  // r3 + u21 - y <= 1
        {{{y, 1.0}, {7, -1.0}}, 0.0},            // y <= r3
    };
    CHECK(row_set(rows) == want);
  }
}

TEST_CASE("registry interning rules") {
  UnitProductRegistry reg(50);
  // trivial products alias instead of interning
  CHECK(reg.resolve({}, std::nullopt).is_constant);
  CHECK(reg.resolve({4}, std::nullopt).id == 4);
  CHECK(reg.resolve({}, 9).id == 9);
  CHECK(reg.products().empty());

  // duplicate unit ids collapse (u * u = u)
  auto a = reg.resolve({4, 4}, std::nullopt);
  CHECK(a.id == 4);

  // identical signatures share one variable
  auto b = reg.resolve({4, 6}, std::nullopt);
  auto c = reg.resolve({6, 4}, std::nullopt);
  CHECK(b.id == c.id);
  CHECK(reg.products().size() == 1);
  auto d = reg.resolve({4, 6}, 9);
  CHECK(d.id != b.id);
  CHECK(reg.products().size() == 2);
}

TEST_CASE("linearize_element averages remainder products") {
  UnitProductRegistry reg(10);
  Element e;
  e.a = 1.25;
  e.remainder_vars = {7, 8};
  auto lin = linearize_element(e, reg);
  // 1.25 * (y(r7) + y(r8)) with trivial products aliased to r7, r8
  CHECK(lin.constant == 0.0);
  CHECK(lin.terms.at(7) == doctest::Approx(1.25));
  CHECK(lin.terms.at(8) == doctest::Approx(1.25));
  CHECK(reg.products().empty());
}

TEST_CASE("error bounds of the pp1 objective") {
  auto pp1 = normalize_program(fixtures::pp1());
  auto rp = resolve_params(pp1, fixtures::pp1_params());
  std::vector<VariableExpansion> exps;
  LiftedId next = 0;
  for (int i = 0; i < 3; ++i) {
    exps.push_back(expand_variable(pp1.variables[static_cast<std::size_t>(i)], i,
                                   rp.sigma[static_cast<std::size_t>(i)],
                                   rp.kappa[static_cast<std::size_t>(i)], &next));
  }
  UnitProductRegistry reg(next);
  auto lp = linearize_polynomial(pp1.objective, exps, reg);
  CHECK(lp.err.errlb == doctest::Approx(-2.0));
  CHECK(lp.err.errub == doctest::Approx(17.4140625));

  // degree <= 1 polynomials carry no error
  auto lin = linearize_polynomial(pp1.constraints[0].poly, exps, reg);
  CHECK(lin.err.errlb == 0.0);
  CHECK(lin.err.errub == 0.0);
}

TEST_CASE("linear_bounds shifts by the error constants") {
  LinearExpr lin;
  lin.constant = 3.0;
  lin.add(0, 2.0);

  auto [llb0, lub0] = linear_bounds(lin, ErrorBounds{0.0, 0.0});
  CHECK(llb0.constant == doctest::Approx(3.0));
  CHECK(lub0.constant == doctest::Approx(3.0));

  auto [llb, lub] = linear_bounds(lin, ErrorBounds{-2.0, 0.0});
  CHECK(llb.constant == doctest::Approx(3.0));   // llb = lin - errub = lin
  CHECK(lub.constant == doctest::Approx(5.0));   // lub = lin - errlb = lin + 2
  CHECK(llb.terms.at(0) == doctest::Approx(2.0));
  CHECK(lub.terms.at(0) == doctest::Approx(2.0));
}
