#pragma once

#include <cstdint>

#include "polybound/milp_model.hpp"
#include "polybound/simplex.hpp"

namespace polybound {

struct MilpOptions {
  double abs_gap = 1e-6;
  double integrality_tol = 1e-6;
  long long node_limit = 0;  // 0 = unlimited
  double time_limit = 0.0;   // seconds; 0 = unlimited
  int threads = 1;
};

struct MilpOutcome {
  enum class Status {
    Optimal,    // proven within abs_gap
    Infeasible,
    Undecided,  // limit reached with no incumbent
  };
  Status status = Status::Undecided;
  double value = 0.0;
  LiftedPoint point;
  long long nodes = 0;
  long long lp_iterations = 0;
  double gap = 0.0;           // incumbent minus proven lower bound
  bool limit_reached = false;

  bool optimal() const { return status == Status::Optimal; }
};

/// Exact branch-and-bound over the binary unit variables: best-bound node
/// selection, most-fractional branching, LP-rounding heuristic.  With limits
/// set it may return an incumbent with a positive gap (limit_reached).
MilpOutcome solve_milp(const MilpModel& model, const MilpOptions& options = {});

/// Exhaustive 2^phi enumeration (one LP solve per binary pattern); the test
/// oracle.  Refuses models with more than 25 binaries.
MilpOutcome enumerate_oracle(const MilpModel& model);

}  // namespace polybound
