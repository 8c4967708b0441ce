#pragma once

#include <string>
#include <vector>

#include "polybound/poly.hpp"
#include "polybound/reform.hpp"

namespace polybound {

/// Kind tags for lifted variables, used for reporting and MPS naming.
enum class LiftedKind { Unit, Remainder, Product };

struct LiftedVar {
  LiftedId id = -1;
  LiftedKind kind = LiftedKind::Unit;
  std::string name;
  double lower = 0.0;
  double upper = 1.0;
  bool binary = false;
  // provenance
  int var_index = -1;  // for Unit/Remainder: original variable
  int bit = 0;         // for Unit: 1-based bit position
};

/// Structural size counters of a built model.
struct ModelStats {
  int phi = 0;                 // binary unit variables
  int psi = 0;                 // interned unit-product variables
  long long psi_pre_dedup = 0;
  int rho = 0;                 // Phi_w rows: product + expansion bound constraints
  long long rho_pre_dedup = 0;
  int t = 0;                   // distinct monomials in the program
  int d = 0;                   // max degree
  int sigma_max = 0;
};

/// Mixed binary linear program over the lifted variables w = (u; r; y).
/// All constraints are `expr <= rhs` with the expression's constant already
/// folded into the right-hand side.
struct MilpModel {
  std::string name;
  std::vector<LiftedVar> vars;  // ordered: units, remainders, products
  LinearExpr objective;         // constant carries the error shift
  std::vector<LinearConstraintRow> rows;
  std::size_t phi_w_row_begin = 0;  // rows before this index are linearized g's

  std::vector<VariableExpansion> expansions;  // non-fixed variables only
  std::vector<UnitProduct> products;          // interning order
  ModelStats stats;
  ErrorBounds objective_error;
  std::vector<ErrorBounds> constraint_errors;  // one per normalized constraint

  int num_binaries() const;
  std::size_t num_vars() const { return vars.size(); }
};

struct LiftedPoint {
  std::vector<double> assignment;  // indexed by LiftedId
};

enum class BoundSide { Lower, Upper };  // LP-down (llb) vs LP-up (lub)

/// Build the optimistic program (objective and constraints relaxed by llb).
MilpModel build_lower_program(const PolynomialProgram& pp, const ReformParams& params);

/// Build the pessimistic program (lub everywhere).
MilpModel build_upper_program(const PolynomialProgram& pp, const ReformParams& params);

MilpModel build_program(const PolynomialProgram& pp, const ReformParams& params,
                        BoundSide side);

/// x_i = alpha_i + kappa_i sum 2^(j-1) u_ij (+ kappa_i r_i); fixed variables
/// reattach their constant value.
std::vector<double> map_to_original(const LiftedPoint& point,
                                    const std::vector<VariableExpansion>& expansions,
                                    const std::vector<VariableSpec>& variables);

/// Lift an original point: greedy digit extraction for the units, remainder
/// for the residue, exact products for the y variables.
LiftedPoint lift_point(const std::vector<double>& x, const MilpModel& model);

}  // namespace polybound
