#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace polybound {

/// Thrown for domain-rule violations (bad bounds, undeclared variables, ...).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class VarKind { Continuous, Discrete, Fixed };

/// A box-bounded decision variable.  Discrete variables step through
/// lower, lower+step, ..., upper; fixed variables have lower == upper.
struct VariableSpec {
  std::string name;
  double lower = 0.0;
  double upper = 0.0;
  VarKind kind = VarKind::Continuous;
  double step = 0.0;  // only meaningful for Discrete

  void validate() const;
  bool is_fixed() const { return kind == VarKind::Fixed; }
  bool is_discrete() const { return kind == VarKind::Discrete; }
  bool operator==(const VariableSpec&) const = default;
};

/// Product of variables: map var index -> positive power.  Empty map is the
/// constant monomial 1.  The map is ordered, which fixes a canonical term
/// order for the whole polynomial layer.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::map<int, int> exponents);
  static Monomial var(int index, int power = 1);

  const std::map<int, int>& exponents() const { return exps_; }
  int degree() const;
  bool is_constant() const { return exps_.empty(); }
  bool contains(int var_index) const { return exps_.count(var_index) != 0; }

  Monomial operator*(const Monomial& other) const;
  auto operator<=>(const Monomial& other) const = default;

  /// Flattened index tuple, one entry per power (x1^2*x3 -> [1,1,3]).
  std::vector<int> index_tuple() const;

 private:
  std::map<int, int> exps_;
};

/// Sparse polynomial in canonical merged form: terms sorted by monomial,
/// no duplicate monomials, no zero coefficients.
class Polynomial {
 public:
  Polynomial() = default;
  static Polynomial constant(double c);
  static Polynomial var(int index);

  void add_term(double coeff, const Monomial& m);
  const std::map<Monomial, double>& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }
  int degree() const;
  bool is_zero() const { return terms_.empty(); }
  double constant_term() const;

  Polynomial operator+(const Polynomial& other) const;
  Polynomial operator-() const;
  Polynomial operator-(const Polynomial& other) const;
  Polynomial operator*(const Polynomial& other) const;
  Polynomial& operator+=(const Polynomial& other);

  /// Replace variable `index` with the constant `value` everywhere.
  Polynomial substitute(int index, double value) const;

  /// Largest variable index used, or -1 for a constant polynomial.
  int max_var_index() const;
  bool uses_var(int index) const;

  bool operator==(const Polynomial&) const = default;

 private:
  std::map<Monomial, double> terms_;
};

enum class Relation { LessEqual, GreaterEqual, Equal };

struct Constraint {
  Polynomial poly;
  Relation relation = Relation::LessEqual;
  // Normalized constraints are `poly <= 0`.
  bool operator==(const Constraint&) const = default;
};

/// The polynomial program: minimize a polynomial objective over a box,
/// subject to polynomial constraints.
struct PolynomialProgram {
  std::string name;
  std::vector<VariableSpec> variables;
  Polynomial objective;
  std::vector<Constraint> constraints;
  bool normalized = false;

  int var_index(const std::string& name) const;  // -1 if absent
  void validate() const;

  /// Distinct monomials across objective and constraints (the basis m),
  /// including the constant monomial when present.  Count is t.
  std::vector<Monomial> monomial_basis() const;
  int max_degree() const;
};

/// Evaluate poly at a full assignment (index -> value).
double evaluate(const Polynomial& poly, const std::vector<double>& point);
double evaluate(const Polynomial& poly, const std::map<int, double>& point);

/// Rewrite every constraint as g <= 0, split equalities into two
/// inequalities, and substitute fixed variables as constants.  Idempotent.
PolynomialProgram normalize_program(const PolynomialProgram& pp);

struct Violation {
  std::string what;  // human-readable description
  double magnitude = 0.0;
};

struct FeasibilityResult {
  bool feasible = true;
  std::vector<Violation> violations;
};

/// Check box bounds and all normalized constraints at `point` within tol.
FeasibilityResult check_feasibility(const PolynomialProgram& pp,
                                    const std::vector<double>& point,
                                    double tol = 1e-6);

}  // namespace polybound
