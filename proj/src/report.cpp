#include "polybound/report.hpp"

#include <sstream>

#include <json.hpp>

#include "polybound/parse.hpp"

namespace polybound {

namespace {

using ordered_json = nlohmann::ordered_json;

std::vector<BoundReport::Variable> describe_variables(const PolynomialProgram& pp,
                                                      const ReformParams& params) {
  const PolynomialProgram norm = pp.normalized ? pp : normalize_program(pp);
  const ResolvedParams resolved = resolve_params(norm, params);
  std::vector<BoundReport::Variable> out;
  for (std::size_t i = 0; i < norm.variables.size(); ++i) {
    const auto& v = norm.variables[i];
    BoundReport::Variable rv;
    rv.name = v.name;
    rv.kind = v.is_fixed() ? "fixed" : (v.is_discrete() ? "discrete" : "continuous");
    rv.lower = v.lower;
    rv.upper = v.upper;
    rv.sigma = resolved.sigma[i];
    rv.kappa = resolved.kappa[i];
    out.push_back(std::move(rv));
  }
  return out;
}

BoundReport::WitnessReport describe_witness(const Witness& w,
                                            const std::vector<VariableSpec>& vars) {
  BoundReport::WitnessReport out;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    out.point.emplace_back(vars[i].name, w.original[i]);
  }
  out.objective = w.objective_value;
  out.feasible = w.polynomial_feasible;
  return out;
}

std::vector<BoundReport::PolyError> describe_errors(
    const ErrorBounds& objective, const std::vector<ErrorBounds>& constraints) {
  std::vector<BoundReport::PolyError> out;
  out.push_back({"objective", objective.errlb, objective.errub});
  for (std::size_t j = 0; j < constraints.size(); ++j) {
    out.push_back({"g" + std::to_string(j + 1), constraints[j].errlb, constraints[j].errub});
  }
  return out;
}

ordered_json variable_json(const BoundReport::Variable& v) {
  ordered_json j;
  j["name"] = v.name;
  j["kind"] = v.kind;
  j["lower"] = v.lower;
  j["upper"] = v.upper;
  if (v.kind != "fixed") {
    j["sigma"] = v.sigma;
    j["kappa"] = v.kappa;
  }
  return j;
}

ordered_json witness_json(const BoundReport::WitnessReport& w) {
  ordered_json j;
  ordered_json point;
  for (const auto& [name, value] : w.point) point[name] = value;
  j["point"] = std::move(point);
  j["objective"] = w.objective;
  j["feasible"] = w.feasible;
  return j;
}

void print_witness(std::ostringstream& os, const char* label,
                   const BoundReport::WitnessReport& w) {
  os << label << ":";
  for (const auto& [name, value] : w.point) {
    os << " " << name << "=" << format_double(value);
  }
  os << "  f=" << format_double(w.objective)
     << (w.feasible ? "  (feasible)" : "  (not polynomial feasible)") << "\n";
}

void print_variables(std::ostringstream& os,
                     const std::vector<BoundReport::Variable>& vars,
                     const std::string& indent) {
  for (const auto& v : vars) {
    os << indent << v.name << " in [" << format_double(v.lower) << ", "
       << format_double(v.upper) << "]";
    if (v.kind == "fixed") {
      os << "  fixed";
    } else {
      os << "  " << v.kind << "  sigma=" << v.sigma
         << "  kappa=" << format_double(v.kappa);
    }
    os << "\n";
  }
}

}  // namespace

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Bounded: return "bounded";
    case Verdict::LowerOnly: return "lower-only";
    case Verdict::InfeasibleProven: return "infeasible-proven";
    case Verdict::Undecided: return "feasibility-unknown";
  }
  return "feasibility-unknown";
}

BoundReport make_bound_report(const PolynomialProgram& pp, const ReformParams& params,
                              const IntervalResult& result, double wall_seconds) {
  const PolynomialProgram norm = pp.normalized ? pp : normalize_program(pp);
  BoundReport rep;
  rep.problem = norm.name;
  rep.mode = "bound";
  rep.verdict = verdict_name(result.verdict);
  rep.variables = describe_variables(norm, params);
  rep.lower = result.lower;
  rep.upper = result.upper;
  if (result.witness_lower) {
    rep.witness_lower = describe_witness(*result.witness_lower, norm.variables);
  }
  if (result.witness_upper) {
    rep.witness_upper = describe_witness(*result.witness_upper, norm.variables);
  }
  rep.errors = describe_errors(result.objective_error, result.constraint_errors);
  const ReformParams pinned = pin_sigmas(norm, params);
  for (const auto& step : result.refinement_trace) {
    BoundReport::Refinement r;
    r.name = step.program.name;
    r.variables = describe_variables(step.program, pinned);
    r.upper_found = step.upper_found;
    r.upper = step.upper;
    if (step.witness) {
      r.witness = describe_witness(*step.witness, step.program.variables);
    }
    r.nodes = step.nodes;
    rep.refinements.push_back(std::move(r));
  }
  rep.stats = result.stats;
  rep.nodes = result.nodes_lower + result.nodes_upper;
  rep.lp_iterations = result.lp_iterations;
  rep.limit_reached = result.limit_reached;
  rep.wall_seconds = wall_seconds;
  return rep;
}

BoundReport make_tau_report(const PolynomialProgram& pp, const ReformParams& params,
                            const TauResult& result, double wall_seconds) {
  const PolynomialProgram norm = pp.normalized ? pp : normalize_program(pp);
  BoundReport rep;
  rep.problem = norm.name;
  rep.mode = "tau";
  rep.verdict = result.feasible ? "bounded" : "feasibility-unknown";
  rep.variables = describe_variables(norm, params);
  if (result.feasible) {
    rep.lower = result.interval_lo;
    rep.upper = result.interval_hi;
  }
  if (result.witness) {
    rep.witness_lower = describe_witness(*result.witness, norm.variables);
  }
  std::vector<ErrorBounds> gerrs;
  for (double t : result.tau_per_constraint) gerrs.push_back({-t, 0.0});
  rep.errors = describe_errors(result.objective_error, gerrs);

  BoundReport::Tau tau;
  tau.per_constraint = result.tau_per_constraint;
  tau.tau = result.tau;
  tau.feasible = result.feasible;
  tau.z = result.z;
  tau.interval_lo = result.interval_lo;
  tau.interval_hi = result.interval_hi;
  rep.tau = std::move(tau);

  rep.stats = result.stats;
  rep.nodes = result.nodes;
  rep.lp_iterations = result.lp_iterations;
  rep.wall_seconds = wall_seconds;
  return rep;
}

BoundReport make_model_report(const PolynomialProgram& pp, const ReformParams& params,
                              const MilpModel& model, double wall_seconds) {
  const PolynomialProgram norm = pp.normalized ? pp : normalize_program(pp);
  BoundReport rep;
  rep.problem = norm.name;
  rep.mode = "reformulate-only";
  rep.verdict = "feasibility-unknown";
  rep.variables = describe_variables(norm, params);
  rep.errors = describe_errors(model.objective_error, model.constraint_errors);
  rep.stats = model.stats;
  rep.wall_seconds = wall_seconds;
  return rep;
}

std::string write_report(const BoundReport& rep, ReportFormat format,
                         bool include_meta) {
  if (format == ReportFormat::Json) {
    ordered_json j;
    j["schema"] = "report_v1";
    j["problem"] = rep.problem;
    j["mode"] = rep.mode;
    j["verdict"] = rep.verdict;
    ordered_json interval;
    if (rep.lower) interval["lower"] = *rep.lower;
    if (rep.upper) interval["upper"] = *rep.upper;
    j["interval"] = std::move(interval);
    ordered_json vars = ordered_json::array();
    for (const auto& v : rep.variables) vars.push_back(variable_json(v));
    j["variables"] = std::move(vars);
    if (rep.witness_lower) j["witness_lower"] = witness_json(*rep.witness_lower);
    if (rep.witness_upper) j["witness_upper"] = witness_json(*rep.witness_upper);
    ordered_json errs = ordered_json::array();
    for (const auto& e : rep.errors) {
      ordered_json je;
      je["polynomial"] = e.label;
      je["errlb"] = e.errlb;
      je["errub"] = e.errub;
      errs.push_back(std::move(je));
    }
    j["errors"] = std::move(errs);
    if (!rep.refinements.empty()) {
      ordered_json refs = ordered_json::array();
      for (const auto& r : rep.refinements) {
        ordered_json jr;
        jr["name"] = r.name;
        ordered_json rvars = ordered_json::array();
        for (const auto& v : r.variables) rvars.push_back(variable_json(v));
        jr["variables"] = std::move(rvars);
        jr["upper_found"] = r.upper_found;
        if (r.upper_found) jr["upper"] = r.upper;
        if (r.witness) jr["witness"] = witness_json(*r.witness);
        jr["nodes"] = r.nodes;
        refs.push_back(std::move(jr));
      }
      j["refinements"] = std::move(refs);
    }
    if (rep.tau) {
      ordered_json jt;
      jt["per_constraint"] = rep.tau->per_constraint;
      jt["tau"] = rep.tau->tau;
      jt["feasible"] = rep.tau->feasible;
      if (rep.tau->feasible) {
        jt["z"] = rep.tau->z;
        jt["interval"] = {rep.tau->interval_lo, rep.tau->interval_hi};
      }
      j["tau"] = std::move(jt);
    }
    ordered_json model;
    model["phi"] = rep.stats.phi;
    model["psi"] = rep.stats.psi;
    model["psi_pre_dedup"] = rep.stats.psi_pre_dedup;
    model["rho"] = rep.stats.rho;
    model["rho_pre_dedup"] = rep.stats.rho_pre_dedup;
    model["t"] = rep.stats.t;
    model["d"] = rep.stats.d;
    j["model"] = std::move(model);
    ordered_json solver;
    solver["nodes"] = rep.nodes;
    solver["lp_iterations"] = rep.lp_iterations;
    solver["limit_reached"] = rep.limit_reached;
    j["solver"] = std::move(solver);
    if (rep.oracle_agrees) j["oracle_agrees"] = *rep.oracle_agrees;
    if (include_meta) {
      ordered_json meta;
      meta["wall_seconds"] = rep.wall_seconds;
      j["meta"] = std::move(meta);
    }
    return j.dump(2) + "\n";
  }

  std::ostringstream os;
  os << "problem: " << rep.problem << "\n";
  os << "mode: " << rep.mode << "\n";
  os << "verdict: " << rep.verdict << "\n";
  if (rep.lower && rep.upper) {
    os << "interval: [" << format_double(*rep.lower) << ", " << format_double(*rep.upper)
       << "]\n";
  } else if (rep.lower) {
    os << "lower bound: " << format_double(*rep.lower) << "\n";
  }
  os << "variables:\n";
  print_variables(os, rep.variables, "  ");
  if (rep.witness_lower) print_witness(os, "witness (lower)", *rep.witness_lower);
  if (rep.witness_upper) print_witness(os, "witness (upper)", *rep.witness_upper);
  os << "error bounds:\n";
  for (const auto& e : rep.errors) {
    os << "  " << e.label << ": errlb=" << format_double(e.errlb)
       << " errub=" << format_double(e.errub) << "\n";
  }
  for (const auto& r : rep.refinements) {
    os << "refinement " << r.name << ":\n";
    print_variables(os, r.variables, "    ");
    if (r.upper_found) {
      os << "    upper bound: " << format_double(r.upper) << "\n";
      if (r.witness) print_witness(os, "    witness", *r.witness);
    } else {
      os << "    no upper bound found\n";
    }
  }
  if (rep.tau) {
    os << "tau per constraint:";
    for (double t : rep.tau->per_constraint) os << " " << format_double(t);
    os << "\n";
    os << "tau: " << format_double(rep.tau->tau) << "\n";
    if (rep.tau->feasible) {
      os << "z: " << format_double(rep.tau->z) << "\n";
      os << "tau interval: [" << format_double(rep.tau->interval_lo) << ", "
         << format_double(rep.tau->interval_hi) << "]\n";
    } else {
      os << "linearized program infeasible (proves nothing about the original)\n";
    }
  }
  os << "model: phi=" << rep.stats.phi << " psi=" << rep.stats.psi
     << " rho=" << rep.stats.rho << " t=" << rep.stats.t << " d=" << rep.stats.d << "\n";
  os << "solver: nodes=" << rep.nodes << " lp_iterations=" << rep.lp_iterations;
  if (rep.limit_reached) os << " (limit reached)";
  os << "\n";
  if (rep.oracle_agrees) {
    os << "oracle cross-check: " << (*rep.oracle_agrees ? "agrees" : "DISAGREES") << "\n";
  }
  if (include_meta) {
    os << "wall time: " << format_double(rep.wall_seconds) << " s\n";
  }
  return os.str();
}

}  // namespace polybound
