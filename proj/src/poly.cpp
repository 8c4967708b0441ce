#include "polybound/poly.hpp"

#include <cmath>
#include <sstream>

namespace polybound {

namespace {
constexpr double kStepTol = 1e-9;
constexpr double kZeroCoeff = 0.0;
}  // namespace

void VariableSpec::validate() const {
  if (!(lower <= upper)) {
    throw DomainError("variable '" + name + "': lower bound " +
                      std::to_string(lower) + " exceeds upper bound " +
                      std::to_string(upper));
  }
  if (kind == VarKind::Fixed && lower != upper) {
    throw DomainError("fixed variable '" + name + "' must have equal bounds");
  }
  if (kind == VarKind::Discrete) {
    if (!(step > 0.0)) {
      throw DomainError("discrete variable '" + name + "' needs step > 0");
    }
    const double span = upper - lower;
    const double ratio = span / step;
    if (std::abs(ratio - std::round(ratio)) > kStepTol * std::max(1.0, ratio)) {
      throw DomainError("discrete variable '" + name +
                        "': range is not an integer multiple of the step");
    }
  }
}

Monomial::Monomial(std::map<int, int> exponents) : exps_(std::move(exponents)) {
  for (auto& [idx, pow] : exps_) {
    if (idx < 0 || pow <= 0) {
      throw DomainError("monomial exponents must map valid indices to positive powers");
    }
  }
}

Monomial Monomial::var(int index, int power) {
  return Monomial(std::map<int, int>{{index, power}});
}

int Monomial::degree() const {
  int d = 0;
  for (const auto& [idx, pow] : exps_) d += pow;
  return d;
}

Monomial Monomial::operator*(const Monomial& other) const {
  std::map<int, int> out = exps_;
  for (const auto& [idx, pow] : other.exps_) out[idx] += pow;
  return Monomial(std::move(out));
}

std::vector<int> Monomial::index_tuple() const {
  std::vector<int> out;
  for (const auto& [idx, pow] : exps_) {
    out.insert(out.end(), static_cast<std::size_t>(pow), idx);
  }
  return out;
}

Polynomial Polynomial::constant(double c) {
  Polynomial p;
  p.add_term(c, Monomial{});
  return p;
}

Polynomial Polynomial::var(int index) {
  Polynomial p;
  p.add_term(1.0, Monomial::var(index));
  return p;
}

void Polynomial::add_term(double coeff, const Monomial& m) {
  if (coeff == kZeroCoeff) return;
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(m, coeff);
  } else {
    it->second += coeff;
    if (it->second == kZeroCoeff) terms_.erase(it);
  }
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

double Polynomial::constant_term() const {
  auto it = terms_.find(Monomial{});
  return it == terms_.end() ? 0.0 : it->second;
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
  Polynomial out = *this;
  out += other;
  return out;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  for (const auto& [m, c] : other.terms_) add_term(c, m);
  return *this;
}

Polynomial Polynomial::operator-() const {
  Polynomial out;
  for (const auto& [m, c] : terms_) out.add_term(-c, m);
  return out;
}

Polynomial Polynomial::operator-(const Polynomial& other) const {
  return *this + (-other);
}

Polynomial Polynomial::operator*(const Polynomial& other) const {
  Polynomial out;
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : other.terms_) {
      out.add_term(ca * cb, ma * mb);
    }
  }
  return out;
}

Polynomial Polynomial::substitute(int index, double value) const {
  Polynomial out;
  for (const auto& [m, c] : terms_) {
    auto exps = m.exponents();
    auto it = exps.find(index);
    if (it == exps.end()) {
      out.add_term(c, m);
      continue;
    }
    const double scale = std::pow(value, it->second);
    exps.erase(it);
    out.add_term(c * scale, Monomial(std::move(exps)));
  }
  return out;
}

int Polynomial::max_var_index() const {
  int mx = -1;
  for (const auto& [m, c] : terms_) {
    if (!m.exponents().empty()) mx = std::max(mx, m.exponents().rbegin()->first);
  }
  return mx;
}

bool Polynomial::uses_var(int index) const {
  for (const auto& [m, c] : terms_) {
    if (m.contains(index)) return true;
  }
  return false;
}

int PolynomialProgram::var_index(const std::string& vname) const {
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (variables[i].name == vname) return static_cast<int>(i);
  }
  return -1;
}

void PolynomialProgram::validate() const {
  for (const auto& v : variables) v.validate();
  const int n = static_cast<int>(variables.size());
  auto check = [&](const Polynomial& p, const std::string& where) {
    if (p.max_var_index() >= n) {
      throw DomainError("undeclared variable index in " + where);
    }
  };
  check(objective, "objective");
  for (std::size_t j = 0; j < constraints.size(); ++j) {
    check(constraints[j].poly, "constraint " + std::to_string(j + 1));
  }
}

std::vector<Monomial> PolynomialProgram::monomial_basis() const {
  std::map<Monomial, bool> seen;
  for (const auto& [m, c] : objective.terms()) seen[m] = true;
  for (const auto& g : constraints) {
    for (const auto& [m, c] : g.poly.terms()) seen[m] = true;
  }
  std::vector<Monomial> out;
  out.reserve(seen.size());
  for (const auto& [m, b] : seen) out.push_back(m);
  return out;
}

int PolynomialProgram::max_degree() const {
  int d = objective.degree();
  for (const auto& g : constraints) d = std::max(d, g.poly.degree());
  return d;
}

double evaluate(const Polynomial& poly, const std::vector<double>& point) {
  if (poly.max_var_index() >= static_cast<int>(point.size())) {
    throw DomainError("evaluation point misses variable x" +
                      std::to_string(poly.max_var_index() + 1));
  }
  double sum = 0.0;
  for (const auto& [m, c] : poly.terms()) {
    double v = c;
    for (const auto& [idx, pow] : m.exponents()) {
      for (int p = 0; p < pow; ++p) v *= point[static_cast<std::size_t>(idx)];
    }
    sum += v;
  }
  return sum;
}

double evaluate(const Polynomial& poly, const std::map<int, double>& point) {
  double sum = 0.0;
  for (const auto& [m, c] : poly.terms()) {
    double v = c;
    for (const auto& [idx, pow] : m.exponents()) {
      auto it = point.find(idx);
      if (it == point.end()) {
        throw DomainError("evaluation point misses variable index " +
                          std::to_string(idx));
      }
      for (int p = 0; p < pow; ++p) v *= it->second;
    }
    sum += v;
  }
  return sum;
}

PolynomialProgram normalize_program(const PolynomialProgram& pp) {
  pp.validate();
  PolynomialProgram out;
  out.name = pp.name;
  out.variables = pp.variables;
  out.objective = pp.objective;
  out.normalized = true;

  // Fold fixed variables into coefficients; their specs stay in the list so
  // witness points can be reconstructed in full.
  for (std::size_t i = 0; i < out.variables.size(); ++i) {
    const auto& v = out.variables[i];
    if (v.is_fixed() || v.lower == v.upper) {
      out.objective = out.objective.substitute(static_cast<int>(i), v.lower);
    }
  }

  for (const auto& g : pp.constraints) {
    Polynomial p = g.poly;
    for (std::size_t i = 0; i < out.variables.size(); ++i) {
      const auto& v = out.variables[i];
      if (v.is_fixed() || v.lower == v.upper) {
        p = p.substitute(static_cast<int>(i), v.lower);
      }
    }
    switch (g.relation) {
      case Relation::LessEqual:
        out.constraints.push_back({p, Relation::LessEqual});
        break;
      case Relation::GreaterEqual:
        out.constraints.push_back({-p, Relation::LessEqual});
        break;
      case Relation::Equal:
        out.constraints.push_back({p, Relation::LessEqual});
        out.constraints.push_back({-p, Relation::LessEqual});
        break;
    }
  }
  return out;
}

FeasibilityResult check_feasibility(const PolynomialProgram& pp,
                                    const std::vector<double>& point,
                                    double tol) {
  if (point.size() != pp.variables.size()) {
    throw DomainError("feasibility point has wrong dimension");
  }
  FeasibilityResult res;
  for (std::size_t i = 0; i < pp.variables.size(); ++i) {
    const auto& v = pp.variables[i];
    if (point[i] < v.lower - tol) {
      res.violations.push_back({"bound " + v.name + " >= " + std::to_string(v.lower),
                                v.lower - point[i]});
    }
    if (point[i] > v.upper + tol) {
      res.violations.push_back({"bound " + v.name + " <= " + std::to_string(v.upper),
                                point[i] - v.upper});
    }
  }
  for (std::size_t j = 0; j < pp.constraints.size(); ++j) {
    const auto& g = pp.constraints[j];
    if (g.relation != Relation::LessEqual) {
      throw DomainError("check_feasibility requires a normalized program");
    }
    const double val = evaluate(g.poly, point);
    if (val > tol) {
      res.violations.push_back({"constraint " + std::to_string(j + 1) + " <= 0", val});
    }
  }
  res.feasible = res.violations.empty();
  return res;
}

}  // namespace polybound
