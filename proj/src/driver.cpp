#include "polybound/driver.hpp"

#include <algorithm>
#include <cmath>

namespace polybound {

namespace {

Witness make_witness(const MilpModel& model, const LiftedPoint& point,
                     const PolynomialProgram& norm, double feas_tol) {
  Witness w;
  w.lifted = point;
  w.original = map_to_original(point, model.expansions, norm.variables);
  w.objective_value = evaluate(norm.objective, w.original);
  w.polynomial_feasible = check_feasibility(norm, w.original, feas_tol).feasible;
  return w;
}

double snap_up(double alpha, double step, double value) {
  return alpha + std::ceil((value - alpha) / step - 1e-9) * step;
}

double snap_down(double alpha, double step, double value) {
  return alpha + std::floor((value - alpha) / step + 1e-9) * step;
}

}  // namespace

ReformParams pin_sigmas(const PolynomialProgram& pp, const ReformParams& params) {
  const PolynomialProgram norm = pp.normalized ? pp : normalize_program(pp);
  const ResolvedParams resolved = resolve_params(norm, params);
  ReformParams out;
  out.default_sigma = params.default_sigma;
  for (std::size_t i = 0; i < norm.variables.size(); ++i) {
    const auto& v = norm.variables[i];
    if (v.is_fixed() || v.lower == v.upper || v.is_discrete()) continue;
    out.per_variable[static_cast<int>(i)].sigma = resolved.sigma[i];
  }
  return out;
}

std::pair<PolynomialProgram, IntervalResult> refine_focused(
    const PolynomialProgram& pp, const std::vector<double>& center,
    const std::vector<double>& kappas, const ReformParams& params,
    const DriverOptions& options) {
  const PolynomialProgram norm = pp.normalized ? pp : normalize_program(pp);

  PolynomialProgram focused = norm;
  focused.name = norm.name.empty() ? "focused" : norm.name + ".2";
  focused.normalized = false;  // fixed-variable substitution may be needed again
  for (std::size_t i = 0; i < focused.variables.size(); ++i) {
    auto& v = focused.variables[i];
    if (v.is_fixed() || v.lower == v.upper) continue;
    const double kappa = kappas[i];
    double lo = std::max(v.lower, center[i] - kappa);
    double hi = std::min(v.upper, center[i] + kappa);
    if (v.is_discrete()) {
      const double alpha = v.lower;
      lo = snap_up(alpha, v.step, lo);
      hi = snap_down(alpha, v.step, hi);
      if (hi < lo) {  // window between grid points: pin the nearest value
        lo = hi = alpha + std::round((center[i] - alpha) / v.step) * v.step;
      }
    }
    if (hi - lo <= 0.0) {
      v.kind = VarKind::Fixed;
      v.step = 0.0;
      v.lower = v.upper = lo;
    } else {
      v.lower = lo;
      v.upper = hi;
    }
  }

  IntervalResult res;
  const PolynomialProgram focused_norm = normalize_program(focused);
  const MilpModel upper_model = build_upper_program(focused_norm, params);
  const MilpOutcome up = solve_milp(upper_model, options.milp);
  res.nodes_upper = up.nodes;
  res.lp_iterations = up.lp_iterations;
  res.limit_reached = up.limit_reached;
  if (up.optimal()) {
    Witness w = make_witness(upper_model, up.point, focused_norm, options.feas_tol);
    res.upper = w.objective_value;
    res.witness_upper = std::move(w);
    res.verdict = Verdict::Bounded;
  } else if (up.status == MilpOutcome::Status::Infeasible) {
    res.verdict = Verdict::LowerOnly;
  } else {
    res.verdict = Verdict::Undecided;
  }
  return {std::move(focused), std::move(res)};
}

IntervalResult bound_global_minimum(const PolynomialProgram& pp,
                                    const ReformParams& params,
                                    const DriverOptions& options) {
  const PolynomialProgram norm = pp.normalized ? pp : normalize_program(pp);
  IntervalResult res;

  const MilpModel lower_model = build_lower_program(norm, params);
  res.stats = lower_model.stats;
  res.objective_error = lower_model.objective_error;
  res.constraint_errors = lower_model.constraint_errors;
  const MilpOutcome lo = solve_milp(lower_model, options.milp);
  res.nodes_lower = lo.nodes;
  res.lp_iterations += lo.lp_iterations;
  res.limit_reached = lo.limit_reached;
  if (lo.status == MilpOutcome::Status::Infeasible) {
    res.verdict = Verdict::InfeasibleProven;
    return res;
  }
  if (lo.status == MilpOutcome::Status::Undecided) {
    res.verdict = Verdict::Undecided;
    return res;
  }
  // With a limit hit the proven bound is the incumbent minus the gap.
  res.lower = lo.value - lo.gap;
  Witness wminus = make_witness(lower_model, lo.point, norm, options.feas_tol);
  const bool wminus_feasible = wminus.polynomial_feasible;
  const double wminus_value = wminus.objective_value;
  res.witness_lower = std::move(wminus);

  if (wminus_feasible) {
    res.upper = wminus_value;
    res.verdict = Verdict::Bounded;
    return res;
  }

  const MilpModel upper_model = build_upper_program(norm, params);
  const MilpOutcome up = solve_milp(upper_model, options.milp);
  res.nodes_upper = up.nodes;
  res.lp_iterations += up.lp_iterations;
  res.limit_reached = res.limit_reached || up.limit_reached;
  if (up.optimal()) {
    Witness wplus = make_witness(upper_model, up.point, norm, options.feas_tol);
    res.upper = wplus.objective_value;  // f(x(w+)) <= lub[f](w+)
    res.witness_upper = std::move(wplus);
    res.verdict = Verdict::Bounded;
    return res;
  }
  if (up.status == MilpOutcome::Status::Undecided) {
    res.verdict = Verdict::LowerOnly;
    return res;
  }

  if (options.refine && res.witness_lower) {
    const ReformParams focused_params = pin_sigmas(norm, params);
    std::vector<double> center = res.witness_lower->original;
    std::vector<double> kappas(norm.variables.size(), 0.0);
    for (const auto& ex : lower_model.expansions) {
      kappas[static_cast<std::size_t>(ex.var_index)] = ex.kappa;
    }
    PolynomialProgram scope = norm;
    for (int round = 0; round < std::max(1, options.refine_rounds); ++round) {
      auto [focused, sub] = refine_focused(scope, center, kappas, focused_params, options);
      RefinementStep step;
      step.program = focused;
      step.nodes = sub.nodes_upper;
      res.lp_iterations += sub.lp_iterations;
      res.limit_reached = res.limit_reached || sub.limit_reached;
      if (sub.upper) {
        step.upper_found = true;
        step.upper = *sub.upper;
        step.witness = sub.witness_upper;
        res.refinement_trace.push_back(std::move(step));
        res.upper = *sub.upper;
        res.witness_upper = sub.witness_upper;
        res.verdict = Verdict::Bounded;
        return res;
      }
      res.refinement_trace.push_back(std::move(step));
      if (round + 1 >= std::max(1, options.refine_rounds)) break;
      // iterated refinement: recenter on the focused problem's own LP-down
      const PolynomialProgram fnorm = normalize_program(focused);
      const MilpModel fmodel = build_lower_program(fnorm, focused_params);
      const MilpOutcome flo = solve_milp(fmodel, options.milp);
      if (!flo.optimal()) break;
      center = map_to_original(flo.point, fmodel.expansions, fnorm.variables);
      for (const auto& ex : fmodel.expansions) {
        kappas[static_cast<std::size_t>(ex.var_index)] = ex.kappa;
      }
      scope = fnorm;
    }
  }

  res.verdict = Verdict::LowerOnly;
  return res;
}

TauResult tau_variant(const PolynomialProgram& pp, const ReformParams& params,
                      const DriverOptions& options) {
  const PolynomialProgram norm = pp.normalized ? pp : normalize_program(pp);
  MilpModel model = build_lower_program(norm, params);
  // Undo the error shifts: objective lin[f], constraints lin[g] <= 0.
  model.objective.constant += model.objective_error.errub;
  for (std::size_t j = 0; j < model.phi_w_row_begin; ++j) {
    model.rows[j].rhs -= model.constraint_errors[j].errub;
  }

  TauResult res;
  res.stats = model.stats;
  res.objective_error = model.objective_error;
  for (const auto& eb : model.constraint_errors) {
    res.tau_per_constraint.push_back(std::max(0.0, -eb.errlb));
  }
  for (double t : res.tau_per_constraint) res.tau = std::max(res.tau, t);

  const MilpOutcome out = solve_milp(model, options.milp);
  res.nodes = out.nodes;
  res.lp_iterations = out.lp_iterations;
  if (out.optimal()) {
    res.feasible = true;
    res.z = out.value;
    res.interval_lo = out.value - model.objective_error.errub;
    res.interval_hi = out.value - model.objective_error.errlb;
    res.witness = make_witness(model, out.point, norm, options.feas_tol);
  }
  return res;
}

}  // namespace polybound
