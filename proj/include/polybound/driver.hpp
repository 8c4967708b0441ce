#pragma once

#include <optional>

#include "polybound/branch_bound.hpp"
#include "polybound/milp_model.hpp"

namespace polybound {

/// A solved reformulated point together with its image in original variables.
struct Witness {
  LiftedPoint lifted;
  std::vector<double> original;
  double objective_value = 0.0;  // f evaluated at `original`
  bool polynomial_feasible = false;
};

enum class Verdict { Bounded, LowerOnly, InfeasibleProven, Undecided };

struct RefinementStep {
  PolynomialProgram program;  // the focused subproblem
  bool upper_found = false;
  double upper = 0.0;
  std::optional<Witness> witness;
  long long nodes = 0;
  long long lp_iterations = 0;
};

struct IntervalResult {
  std::optional<double> lower;
  std::optional<double> upper;
  Verdict verdict = Verdict::Undecided;
  std::optional<Witness> witness_lower;  // w-minus
  std::optional<Witness> witness_upper;  // w-plus or refined solution
  std::vector<RefinementStep> refinement_trace;
  long long nodes_lower = 0;
  long long nodes_upper = 0;
  long long lp_iterations = 0;
  bool limit_reached = false;
  // copied from the LP-down model for reporting
  ModelStats stats;
  ErrorBounds objective_error;
  std::vector<ErrorBounds> constraint_errors;
};

struct TauResult {
  std::vector<double> tau_per_constraint;
  double tau = 0.0;
  bool feasible = false;  // feasibility of the linearized MILP only
  double z = 0.0;         // its optimal value when feasible
  double interval_lo = 0.0;
  double interval_hi = 0.0;
  std::optional<Witness> witness;
  long long nodes = 0;
  long long lp_iterations = 0;
  ModelStats stats;
  ErrorBounds objective_error;
};

struct DriverOptions {
  MilpOptions milp;
  bool refine = false;     // run focused refinement when LP-up is infeasible
  int refine_rounds = 1;
  double feas_tol = 1e-6;  // tolerance for the polynomial-feasibility test
};

/// Full bounding procedure: solve LP-down; if its witness maps to a
/// polynomially feasible point that supplies the upper bound, otherwise
/// solve LP-up (and optionally refine around the witness).
IntervalResult bound_global_minimum(const PolynomialProgram& pp,
                                    const ReformParams& params,
                                    const DriverOptions& options = {});

/// Build the subproblem boxed to [center_i - kappa_i, center_i + kappa_i],
/// intersected with the original box, and solve its LP-up.
std::pair<PolynomialProgram, IntervalResult> refine_focused(
    const PolynomialProgram& pp, const std::vector<double>& center,
    const std::vector<double>& kappas, const ReformParams& params,
    const DriverOptions& options = {});

/// Params that pin every continuous variable to the sigma it resolves to on
/// `pp`'s box, so kappa is re-derived when the box is later narrowed.
ReformParams pin_sigmas(const PolynomialProgram& pp, const ReformParams& params);

/// Single-MILP variant: minimize lin[f] subject to lin[g] <= 0, reporting
/// the per-constraint violation tolerances tau_i = max(0, -errlb[g_i]).
TauResult tau_variant(const PolynomialProgram& pp, const ReformParams& params,
                      const DriverOptions& options = {});

}  // namespace polybound
