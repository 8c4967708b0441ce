#include "polybound/milp_model.hpp"

#include <algorithm>
#include <cmath>

namespace polybound {

namespace {

/// Expand every non-fixed variable with ids laid out as: all units (by
/// variable, then bit), then all remainders.  This fixes the model's
/// variable order regardless of how many variables are discrete.
std::vector<VariableExpansion> expand_all(const PolynomialProgram& pp,
                                          const ResolvedParams& resolved,
                                          LiftedId* next_id) {
  std::vector<VariableExpansion> expansions;
  for (std::size_t i = 0; i < pp.variables.size(); ++i) {
    const auto& v = pp.variables[i];
    if (v.is_fixed() || v.lower == v.upper) continue;
    LiftedId scratch = 0;
    VariableExpansion ex = expand_variable(v, static_cast<int>(i),
                                           resolved.sigma[i], resolved.kappa[i],
                                           &scratch);
    expansions.push_back(std::move(ex));
  }
  for (auto& ex : expansions) {
    for (auto& id : ex.unit_ids) id = (*next_id)++;
  }
  for (auto& ex : expansions) {
    if (ex.remainder_id) ex.remainder_id = (*next_id)++;
  }
  return expansions;
}

LinearConstraintRow folded(const LinearExpr& expr, double rhs) {
  LinearConstraintRow row;
  row.expr = expr;
  row.rhs = rhs - expr.constant;
  row.expr.constant = 0.0;
  return row;
}

std::string product_name(std::size_t k) { return "y" + std::to_string(k + 1); }

}  // namespace

int MilpModel::num_binaries() const {
  return static_cast<int>(
      std::count_if(vars.begin(), vars.end(), [](const LiftedVar& v) { return v.binary; }));
}

MilpModel build_program(const PolynomialProgram& pp, const ReformParams& params,
                        BoundSide side) {
  const PolynomialProgram norm = pp.normalized ? pp : normalize_program(pp);
  const ResolvedParams resolved = resolve_params(norm, params);

  MilpModel model;
  model.name = norm.name;

  LiftedId next_id = 0;
  model.expansions = expand_all(norm, resolved, &next_id);

  for (const auto& ex : model.expansions) {
    for (std::size_t j = 0; j < ex.unit_ids.size(); ++j) {
      LiftedVar var;
      var.id = ex.unit_ids[j];
      var.kind = LiftedKind::Unit;
      var.name = "u" + std::to_string(ex.var_index + 1) + "_" + std::to_string(j + 1);
      var.binary = true;
      var.var_index = ex.var_index;
      var.bit = static_cast<int>(j + 1);
      model.vars.push_back(std::move(var));
    }
  }
  for (const auto& ex : model.expansions) {
    if (!ex.remainder_id) continue;
    LiftedVar var;
    var.id = *ex.remainder_id;
    var.kind = LiftedKind::Remainder;
    var.name = "r" + std::to_string(ex.var_index + 1);
    var.var_index = ex.var_index;
    model.vars.push_back(std::move(var));
  }

  UnitProductRegistry registry(next_id);
  ReformCounts counts;

  LinearizedPolynomial obj =
      linearize_polynomial(norm.objective, model.expansions, registry, &counts);
  std::vector<LinearizedPolynomial> cons;
  cons.reserve(norm.constraints.size());
  for (const auto& g : norm.constraints) {
    cons.push_back(linearize_polynomial(g.poly, model.expansions, registry, &counts));
  }

  model.products = registry.products();
  for (std::size_t k = 0; k < model.products.size(); ++k) {
    LiftedVar var;
    var.id = model.products[k].id;
    var.kind = LiftedKind::Product;
    var.name = product_name(k);
    model.vars.push_back(std::move(var));
  }

  const bool lower_side = side == BoundSide::Lower;
  model.objective_error = obj.err;
  {
    auto [llb, lub] = linear_bounds(obj.lin, obj.err);
    model.objective = lower_side ? std::move(llb) : std::move(lub);
  }
  for (const auto& c : cons) {
    model.constraint_errors.push_back(c.err);
    auto [llb, lub] = linear_bounds(c.lin, c.err);
    model.rows.push_back(folded(lower_side ? llb : lub, 0.0));
  }
  model.phi_w_row_begin = model.rows.size();

  for (const auto& up : model.products) {
    for (auto& row : product_constraints(up)) model.rows.push_back(std::move(row));
  }
  const std::size_t rho_rows_begin = model.phi_w_row_begin;
  for (const auto& ex : model.expansions) {
    if (!ex.needs_upper_bound_constraint) continue;
    LinearExpr expr;
    for (std::size_t j = 0; j < ex.unit_ids.size(); ++j) {
      expr.add(ex.unit_ids[j], ex.unit_weight(static_cast<int>(j + 1)));
    }
    if (ex.remainder_id) expr.add(*ex.remainder_id, ex.kappa);
    model.rows.push_back(folded(expr, ex.beta - ex.alpha));
  }

  model.stats.phi = model.num_binaries();
  model.stats.psi = static_cast<int>(model.products.size());
  model.stats.psi_pre_dedup = counts.unit_products;
  model.stats.rho = static_cast<int>(model.rows.size() - rho_rows_begin);
  model.stats.rho_pre_dedup = counts.product_constraints;
  model.stats.t = static_cast<int>(norm.monomial_basis().size());
  model.stats.d = norm.max_degree();
  for (const auto& ex : model.expansions) {
    model.stats.sigma_max = std::max(model.stats.sigma_max, ex.sigma);
  }
  return model;
}

MilpModel build_lower_program(const PolynomialProgram& pp, const ReformParams& params) {
  return build_program(pp, params, BoundSide::Lower);
}

MilpModel build_upper_program(const PolynomialProgram& pp, const ReformParams& params) {
  return build_program(pp, params, BoundSide::Upper);
}

std::vector<double> map_to_original(const LiftedPoint& point,
                                    const std::vector<VariableExpansion>& expansions,
                                    const std::vector<VariableSpec>& variables) {
  std::vector<double> x(variables.size(), 0.0);
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (variables[i].is_fixed() || variables[i].lower == variables[i].upper) {
      x[i] = variables[i].lower;
    }
  }
  for (const auto& ex : expansions) {
    double v = ex.alpha;
    for (std::size_t j = 0; j < ex.unit_ids.size(); ++j) {
      const auto id = static_cast<std::size_t>(ex.unit_ids[j]);
      if (id >= point.assignment.size()) {
        throw DomainError("lifted point is missing a unit assignment");
      }
      v += ex.unit_weight(static_cast<int>(j + 1)) * point.assignment[id];
    }
    if (ex.remainder_id) {
      const auto id = static_cast<std::size_t>(*ex.remainder_id);
      if (id >= point.assignment.size()) {
        throw DomainError("lifted point is missing a remainder assignment");
      }
      v += ex.kappa * point.assignment[id];
    }
    x[static_cast<std::size_t>(ex.var_index)] = v;
  }
  return x;
}

LiftedPoint lift_point(const std::vector<double>& x, const MilpModel& model) {
  LiftedPoint point;
  point.assignment.assign(model.num_vars(), 0.0);
  for (const auto& ex : model.expansions) {
    const double value = x.at(static_cast<std::size_t>(ex.var_index));
    double residue = value - ex.alpha;
    if (ex.kappa > 0.0) {
      long long q;
      if (ex.discrete) {
        q = std::llround(residue / ex.kappa);
      } else {
        q = static_cast<long long>(std::floor(residue / ex.kappa + 1e-12));
      }
      const long long cap = (1LL << ex.sigma) - 1;
      q = std::clamp(q, 0LL, cap);
      for (int j = 0; j < ex.sigma; ++j) {
        point.assignment[static_cast<std::size_t>(ex.unit_ids[j])] =
            (q >> j) & 1 ? 1.0 : 0.0;
      }
      residue -= static_cast<double>(q) * ex.kappa;
    }
    if (ex.remainder_id) {
      point.assignment[static_cast<std::size_t>(*ex.remainder_id)] =
          std::clamp(residue / ex.kappa, 0.0, 1.0);
    }
  }
  for (const auto& up : model.products) {
    double y = 1.0;
    for (LiftedId u : up.unit_vars) y *= point.assignment[static_cast<std::size_t>(u)];
    if (up.remainder) y *= point.assignment[static_cast<std::size_t>(*up.remainder)];
    point.assignment[static_cast<std::size_t>(up.id)] = y;
  }
  return point;
}

}  // namespace polybound
