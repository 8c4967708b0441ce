#pragma once

#include <optional>
#include <string>
#include <vector>

#include "polybound/driver.hpp"

namespace polybound {

enum class ReportFormat { Text, Json };

/// Flattened, serialization-ready view of a run.  JSON output follows the
/// `report_v1` schema documented in the README.
struct BoundReport {
  struct Variable {
    std::string name;
    std::string kind;  // "continuous", "discrete", "fixed"
    double lower = 0.0;
    double upper = 0.0;
    int sigma = 0;
    double kappa = 0.0;
  };
  struct PolyError {
    std::string label;  // "objective", "g1", ...
    double errlb = 0.0;
    double errub = 0.0;
  };
  struct WitnessReport {
    std::vector<std::pair<std::string, double>> point;
    double objective = 0.0;
    bool feasible = false;
  };
  struct Refinement {
    std::string name;
    std::vector<Variable> variables;
    bool upper_found = false;
    double upper = 0.0;
    std::optional<WitnessReport> witness;
    long long nodes = 0;
  };
  struct Tau {
    std::vector<double> per_constraint;
    double tau = 0.0;
    bool feasible = false;
    double z = 0.0;
    double interval_lo = 0.0;
    double interval_hi = 0.0;
  };

  std::string problem;
  std::string mode;  // "bound", "tau", "reformulate-only"
  std::string verdict;
  std::vector<Variable> variables;
  std::optional<double> lower;
  std::optional<double> upper;
  std::optional<WitnessReport> witness_lower;
  std::optional<WitnessReport> witness_upper;
  std::vector<PolyError> errors;  // objective first
  std::vector<Refinement> refinements;
  std::optional<Tau> tau;
  ModelStats stats;
  long long nodes = 0;
  long long lp_iterations = 0;
  bool limit_reached = false;
  std::optional<bool> oracle_agrees;  // set by the --oracle cross-check
  double wall_seconds = 0.0;          // meta; omitted with include_meta=false
};

std::string verdict_name(Verdict v);

BoundReport make_bound_report(const PolynomialProgram& pp, const ReformParams& params,
                              const IntervalResult& result, double wall_seconds);

BoundReport make_tau_report(const PolynomialProgram& pp, const ReformParams& params,
                            const TauResult& result, double wall_seconds);

/// Model-only report for reformulate-only runs.
BoundReport make_model_report(const PolynomialProgram& pp, const ReformParams& params,
                              const MilpModel& model, double wall_seconds);

std::string write_report(const BoundReport& report, ReportFormat format,
                         bool include_meta = true);

}  // namespace polybound
