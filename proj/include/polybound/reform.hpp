#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "polybound/poly.hpp"

namespace polybound {

/// Ids of lifted variables.  Unit (u) and remainder (r) ids are assigned by
/// the expansion pass; unit-product (y) ids by the registry.  All share one
/// id space so linear expressions can mix them.
using LiftedId = int;

/// Per-variable reformulation setting: exactly one of sigma/kappa given,
/// the other derived.
struct VariableParam {
  std::optional<int> sigma;
  std::optional<double> kappa;
};

/// Per-program reformulation parameters.  Unset variables fall back to
/// `default_sigma` (or to 0 for variables appearing only linearly).
struct ReformParams {
  std::map<int, VariableParam> per_variable;
  int default_sigma = 3;
};

/// Realization of the binary expansion of one variable:
///   x = alpha + kappa * sum 2^(j-1) u_j + kappa * r      (continuous)
///   x = alpha + kappa * sum 2^(j-1) u_j                  (discrete)
struct VariableExpansion {
  int var_index = -1;
  double alpha = 0.0;
  double beta = 0.0;
  double kappa = 0.0;
  int sigma = 0;
  bool discrete = false;
  std::vector<LiftedId> unit_ids;        // sigma entries, bit j-1 at [j-1]
  std::optional<LiftedId> remainder_id;  // absent for discrete variables
  bool needs_upper_bound_constraint = false;

  /// Largest value the expansion can take with all u = 1 (and r = 1).
  double max_attainable() const;
  double unit_weight(int j) const;  // kappa * 2^(j-1), j is 1-based
};

/// One element z of a distributed monomial product: coefficient a times
/// n_kl times a product of unit variables and remainder variables.
struct Element {
  double a = 0.0;                     // Eq-style constant (product / n_r)
  std::vector<LiftedId> unit_vars;    // may contain duplicates before interning
  std::vector<LiftedId> remainder_vars;  // may contain duplicates
  int n_u() const { return static_cast<int>(unit_vars.size()); }
  int n_r() const { return static_cast<int>(remainder_vars.size()); }
  int n_kl() const { return n_r() > 0 ? n_r() : 1; }
  /// Raw product coefficient (a * n_r, or a when n_r = 0).
  double coefficient() const { return n_r() > 0 ? a * n_r() : a; }
};

/// Sparse linear function of lifted variables.
struct LinearExpr {
  double constant = 0.0;
  std::map<LiftedId, double> terms;

  void add(LiftedId id, double coeff);
  LinearExpr& operator+=(const LinearExpr& other);
  double evaluate(const std::vector<double>& point) const;
};

struct ErrorBounds {
  double errlb = 0.0;  // <= 0
  double errub = 0.0;  // >= 0
};

/// A product of unit variables and at most one remainder variable that got
/// its own lifted variable.  Trivial products (single u, single r, empty)
/// are never interned.
struct UnitProduct {
  LiftedId id = -1;
  std::set<LiftedId> unit_vars;
  std::optional<LiftedId> remainder;
};

/// One linear constraint `expr <= rhs` over lifted variables.
struct LinearConstraintRow {
  LinearExpr expr;
  double rhs = 0.0;
};

/// Interns unit-product variables by signature so identical products across
/// monomials share one variable (and one constraint set).  Interning is the
/// lone synchronization point for concurrent linearization.
class UnitProductRegistry {
 public:
  explicit UnitProductRegistry(LiftedId first_id) : next_id_(first_id) {}

  /// Resolve a product to either a constant 1, an existing u/r variable, or
  /// an interned y variable.  Duplicate unit ids collapse (u is binary).
  struct Resolved {
    bool is_constant = false;   // empty product
    LiftedId id = -1;           // valid unless is_constant
  };
  Resolved resolve(const std::vector<LiftedId>& units,
                   std::optional<LiftedId> remainder);

  const std::vector<UnitProduct>& products() const { return products_; }
  LiftedId next_id() const { return next_id_; }

 private:
  mutable std::mutex mu_;
  LiftedId next_id_;
  std::map<std::pair<std::set<LiftedId>, std::optional<LiftedId>>, std::size_t> index_;
  std::vector<UnitProduct> products_;
};

/// Counts accumulated while linearizing, before any deduplication; used for
/// the structural size bounds.
struct ReformCounts {
  long long elements = 0;         // total elements over all monomials
  long long unit_products = 0;    // sum of n_kl (pre-dedup psi)
  long long product_constraints = 0;  // sum of n_kl * (n_u + 1) (pre-dedup rho)
};

/// sigma = ceil(log2((beta-alpha)/kappa + delta)), delta = 1 for discrete.
int sigma_from_kappa(double alpha, double beta, double kappa, bool discrete);

/// kappa* = (beta-alpha)/(2^sigma - delta); continuous sigma = 0 gives beta-alpha.
double kappa_from_sigma(double alpha, double beta, int sigma, bool discrete);

/// Resolve params for one variable and allocate its lifted ids via `alloc`.
VariableExpansion expand_variable(const VariableSpec& spec, int var_index,
                                  int sigma, double kappa, LiftedId* next_id);

/// Distribute the product over the expanded factors.  Constant-only elements
/// merge into one leading constant element (empty variable lists).  Ordering
/// is factor-choice lexicographic: for each factor, constant first, then
/// units by bit, then the remainder.
std::vector<Element> expand_monomial(const Monomial& monomial,
                                     const std::vector<VariableExpansion>& expansions);

/// Replace remainder products by their mean and products by unit-product
/// variables: a * sum_h y(units, r_h), or a * y(units) when n_r = 0.
LinearExpr linearize_element(const Element& elem, UnitProductRegistry& registry);

/// Constraints tying an interned product to its factors.
std::vector<LinearConstraintRow> product_constraints(const UnitProduct& up);

struct LinearizedPolynomial {
  LinearExpr lin;
  ErrorBounds err;
};

/// Linearize c_1 m_1 + ... and accumulate the error bounds
///   errlb = sum { c a (n_kl - 1) : c a < 0 },  errub = positive-product sum.
LinearizedPolynomial linearize_polynomial(const Polynomial& poly,
                                          const std::vector<VariableExpansion>& expansions,
                                          UnitProductRegistry& registry,
                                          ReformCounts* counts = nullptr);

/// llb = lin - errub (never overestimates g); lub = lin - errlb.
std::pair<LinearExpr, LinearExpr> linear_bounds(const LinearExpr& lin,
                                                const ErrorBounds& eb);

/// True when the variable occurs only in degree-1 monomials everywhere.
bool appears_only_linearly(const PolynomialProgram& pp, int var_index);

/// Resolve (sigma, kappa) for every non-fixed variable of a normalized
/// program, applying the discrete-step rule and the linear-only rule.
struct ResolvedParams {
  std::vector<int> sigma;     // per variable; 0 for fixed
  std::vector<double> kappa;  // per variable; 0 for fixed
};
ResolvedParams resolve_params(const PolynomialProgram& pp, const ReformParams& params);

}  // namespace polybound
