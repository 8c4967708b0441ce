#pragma once

#include <map>
#include <vector>

#include "polybound/milp_model.hpp"

namespace polybound {

/// Override of one variable's box, used by branch-and-bound to fix binaries.
struct VarBounds {
  double lower = 0.0;
  double upper = 0.0;
};

struct LpOutcome {
  enum class Status { Optimal, Infeasible, Unbounded };
  Status status = Status::Optimal;
  double value = 0.0;
  std::vector<double> point;  // one entry per model variable
  long long iterations = 0;

  bool optimal() const { return status == Status::Optimal; }
};

/// Centralized solver tolerances.
struct LpTolerances {
  double feasibility = 1e-7;
  double reduced_cost = 1e-7;
  double pivot = 1e-9;
  long long bland_after = 5000;  // iterations before switching pivot rules
  long long max_iterations = 2000000;  // hard stop; throws rather than loop
  int refactor_every = 64;
};

/// Solve the continuous relaxation of `model` (integrality dropped) with a
/// bounded-variable two-phase primal simplex.  `extra_bounds` tightens the
/// box of selected variables; entries must lie within the original box.
/// Throws DomainError on a numerically singular basis.
LpOutcome solve_lp(const MilpModel& model,
                   const std::map<int, VarBounds>& extra_bounds = {},
                   const LpTolerances& tol = {});

}  // namespace polybound
