#include "polybound/reform.hpp"

#include <algorithm>
#include <cmath>

namespace polybound {

namespace {
constexpr double kBoundSlack = 1e-12;
}

double VariableExpansion::max_attainable() const {
  double v = alpha + kappa * (std::pow(2.0, sigma) - 1.0);
  if (remainder_id) v += kappa;
  return v;
}

double VariableExpansion::unit_weight(int j) const {
  return kappa * std::pow(2.0, j - 1);
}

void LinearExpr::add(LiftedId id, double coeff) {
  if (coeff == 0.0) return;
  auto it = terms.find(id);
  if (it == terms.end()) {
    terms.emplace(id, coeff);
  } else {
    it->second += coeff;
    if (it->second == 0.0) terms.erase(it);
  }
}

LinearExpr& LinearExpr::operator+=(const LinearExpr& other) {
  constant += other.constant;
  for (const auto& [id, c] : other.terms) add(id, c);
  return *this;
}

double LinearExpr::evaluate(const std::vector<double>& point) const {
  double v = constant;
  for (const auto& [id, c] : terms) v += c * point[static_cast<std::size_t>(id)];
  return v;
}

int sigma_from_kappa(double alpha, double beta, double kappa, bool discrete) {
  if (alpha == beta) return 0;
  if (!(kappa > 0.0)) {
    throw DomainError("kappa must be positive unless the variable is fixed");
  }
  if (kappa > beta - alpha + kBoundSlack) {
    throw DomainError("kappa exceeds the variable range");
  }
  const double delta = discrete ? 1.0 : 0.0;
  const double raw = std::log2((beta - alpha) / kappa + delta);
  // Guard against 2^k ratios landing a hair above an integer.
  const int sigma = static_cast<int>(std::ceil(raw - 1e-9));
  return std::max(sigma, 0);
}

double kappa_from_sigma(double alpha, double beta, int sigma, bool discrete) {
  if (sigma < 0) throw DomainError("sigma must be nonnegative");
  if (discrete && sigma == 0) {
    if (alpha != beta) {
      throw DomainError("a discrete variable with sigma = 0 must be fixed");
    }
    return 0.0;
  }
  if (sigma == 0) return beta - alpha;
  const double delta = discrete ? 1.0 : 0.0;
  return (beta - alpha) / (std::pow(2.0, sigma) - delta);
}

VariableExpansion expand_variable(const VariableSpec& spec, int var_index,
                                  int sigma, double kappa, LiftedId* next_id) {
  if (sigma < 0) throw DomainError("sigma must be nonnegative");
  if (spec.lower < spec.upper && !(kappa > 0.0)) {
    throw DomainError("kappa can be zero only for a fixed variable");
  }
  VariableExpansion ex;
  ex.var_index = var_index;
  ex.alpha = spec.lower;
  ex.beta = spec.upper;
  ex.kappa = kappa;
  ex.sigma = sigma;
  ex.discrete = spec.is_discrete();
  for (int j = 0; j < sigma; ++j) ex.unit_ids.push_back((*next_id)++);
  if (!ex.discrete) ex.remainder_id = (*next_id)++;
  ex.needs_upper_bound_constraint = ex.max_attainable() > ex.beta + kBoundSlack;
  return ex;
}

std::vector<Element> expand_monomial(const Monomial& monomial,
                                     const std::vector<VariableExpansion>& expansions) {
  struct FactorChoice {
    double weight;
    std::optional<LiftedId> unit;
    std::optional<LiftedId> remainder;
  };
  std::vector<std::vector<FactorChoice>> choices;
  for (int idx : monomial.index_tuple()) {
    const VariableExpansion* ex = nullptr;
    for (const auto& e : expansions) {
      if (e.var_index == idx) { ex = &e; break; }
    }
    if (ex == nullptr) {
      throw DomainError("monomial uses variable without an expansion");
    }
    std::vector<FactorChoice> fc;
    if (ex->alpha != 0.0) fc.push_back({ex->alpha, std::nullopt, std::nullopt});
    for (int j = 1; j <= ex->sigma; ++j) {
      fc.push_back({ex->unit_weight(j), ex->unit_ids[static_cast<std::size_t>(j - 1)],
                    std::nullopt});
    }
    if (ex->remainder_id) fc.push_back({ex->kappa, std::nullopt, *ex->remainder_id});
    choices.push_back(std::move(fc));
  }

  std::vector<Element> elements;
  double constant_sum = 0.0;
  bool has_constant = false;

  std::vector<std::size_t> pick(choices.size(), 0);
  const std::size_t nfac = choices.size();
  while (true) {
    double coeff = 1.0;
    Element el;
    for (std::size_t f = 0; f < nfac; ++f) {
      const FactorChoice& c = choices[f][pick[f]];
      coeff *= c.weight;
      if (c.unit) el.unit_vars.push_back(*c.unit);
      if (c.remainder) el.remainder_vars.push_back(*c.remainder);
    }
    if (el.unit_vars.empty() && el.remainder_vars.empty()) {
      constant_sum += coeff;
      has_constant = true;
    } else {
      el.a = el.n_r() > 0 ? coeff / el.n_r() : coeff;
      elements.push_back(std::move(el));
    }
    // lexicographic advance over factor choices
    std::size_t f = nfac;
    while (f > 0) {
      --f;
      if (++pick[f] < choices[f].size()) break;
      pick[f] = 0;
      if (f == 0) { f = nfac + 1; break; }
    }
    if (nfac == 0 || f == nfac + 1) break;
  }

  if (has_constant) {
    Element c;
    c.a = constant_sum;
    elements.insert(elements.begin(), std::move(c));
  }
  return elements;
}

UnitProductRegistry::Resolved UnitProductRegistry::resolve(
    const std::vector<LiftedId>& units, std::optional<LiftedId> remainder) {
  std::set<LiftedId> uset(units.begin(), units.end());
  Resolved out;
  if (uset.empty() && !remainder) {
    out.is_constant = true;
    return out;
  }
  if (uset.empty()) {
    out.id = *remainder;
    return out;
  }
  if (uset.size() == 1 && !remainder) {
    out.id = *uset.begin();
    return out;
  }
  std::lock_guard<std::mutex> lock(mu_);
  auto key = std::make_pair(uset, remainder);
  auto it = index_.find(key);
  if (it != index_.end()) {
    out.id = products_[it->second].id;
    return out;
  }
  UnitProduct up;
  up.id = next_id_++;
  up.unit_vars = std::move(uset);
  up.remainder = remainder;
  index_.emplace(std::move(key), products_.size());
  products_.push_back(std::move(up));
  out.id = products_.back().id;
  return out;
}

LinearExpr linearize_element(const Element& elem, UnitProductRegistry& registry) {
  LinearExpr out;
  if (elem.n_u() == 0 && elem.n_r() == 0) {
    out.constant = elem.a;
    return out;
  }
  if (elem.n_r() == 0) {
    auto res = registry.resolve(elem.unit_vars, std::nullopt);
    out.add(res.id, elem.a);
    return out;
  }
  for (LiftedId r : elem.remainder_vars) {
    auto res = registry.resolve(elem.unit_vars, r);
    out.add(res.id, elem.a);
  }
  return out;
}

std::vector<LinearConstraintRow> product_constraints(const UnitProduct& up) {
  std::vector<LinearConstraintRow> rows;
  const int nu = static_cast<int>(up.unit_vars.size());
  for (LiftedId u : up.unit_vars) {
    LinearConstraintRow row;     // y - u <= 0
    row.expr.add(up.id, 1.0);
    row.expr.add(u, -1.0);
    rows.push_back(std::move(row));
  }
  if (up.remainder) {
    LinearConstraintRow lower;   // r + sum u - y <= n_u
    lower.expr.add(*up.remainder, 1.0);
    for (LiftedId u : up.unit_vars) lower.expr.add(u, 1.0);
    lower.expr.add(up.id, -1.0);
    lower.rhs = nu;
    rows.push_back(std::move(lower));
    LinearConstraintRow cap;     // y - r <= 0
    cap.expr.add(up.id, 1.0);
    cap.expr.add(*up.remainder, -1.0);
    rows.push_back(std::move(cap));
  } else {
    LinearConstraintRow lower;   // sum u - y <= n_u - 1; y <= 1 is the var bound
    for (LiftedId u : up.unit_vars) lower.expr.add(u, 1.0);
    lower.expr.add(up.id, -1.0);
    lower.rhs = nu - 1;
    rows.push_back(std::move(lower));
  }
  return rows;
}

LinearizedPolynomial linearize_polynomial(const Polynomial& poly,
                                          const std::vector<VariableExpansion>& expansions,
                                          UnitProductRegistry& registry,
                                          ReformCounts* counts) {
  LinearizedPolynomial out;
  for (const auto& [mono, c] : poly.terms()) {
    for (const Element& el : expand_monomial(mono, expansions)) {
      if (counts != nullptr) {
        counts->elements += 1;
        counts->unit_products += el.n_kl();
        counts->product_constraints +=
            static_cast<long long>(el.n_kl()) * (el.n_u() + 1);
      }
      if (el.n_r() >= 2) {
        const double contrib = c * el.a * (el.n_kl() - 1);
        if (contrib > 0) out.err.errub += contrib;
        else out.err.errlb += contrib;
      }
      LinearExpr lin = linearize_element(el, registry);
      lin.constant *= c;
      for (auto& [id, v] : lin.terms) v *= c;
      out.lin.constant += lin.constant;
      for (const auto& [id, v] : lin.terms) out.lin.add(id, v);
    }
  }
  return out;
}

std::pair<LinearExpr, LinearExpr> linear_bounds(const LinearExpr& lin,
                                                const ErrorBounds& eb) {
  LinearExpr llb = lin;
  llb.constant -= eb.errub;
  LinearExpr lub = lin;
  lub.constant -= eb.errlb;
  return {std::move(llb), std::move(lub)};
}

bool appears_only_linearly(const PolynomialProgram& pp, int var_index) {
  auto scan = [&](const Polynomial& p) {
    for (const auto& [m, c] : p.terms()) {
      if (m.contains(var_index) && m.degree() > 1) return false;
    }
    return true;
  };
  if (!scan(pp.objective)) return false;
  for (const auto& g : pp.constraints) {
    if (!scan(g.poly)) return false;
  }
  return true;
}

ResolvedParams resolve_params(const PolynomialProgram& pp, const ReformParams& params) {
  const std::size_t n = pp.variables.size();
  ResolvedParams out;
  out.sigma.assign(n, 0);
  out.kappa.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& v = pp.variables[i];
    if (v.is_fixed() || v.lower == v.upper) continue;
    auto it = params.per_variable.find(static_cast<int>(i));
    const VariableParam* vp = it == params.per_variable.end() ? nullptr : &it->second;
    if (vp != nullptr && vp->sigma && vp->kappa) {
      throw DomainError("variable '" + v.name + "': give sigma or kappa, not both");
    }
    if (v.is_discrete()) {
      // Step is the error limit; overrides would move values off the grid.
      if (vp != nullptr && (vp->sigma || vp->kappa)) {
        const bool ok = (vp->kappa && std::abs(*vp->kappa - v.step) <= 1e-12) ||
                        (vp->sigma &&
                         *vp->sigma == sigma_from_kappa(v.lower, v.upper, v.step, true));
        if (!ok) {
          throw DomainError("variable '" + v.name +
                            "': discrete variables take their step as kappa");
        }
      }
      out.kappa[i] = v.step;
      out.sigma[i] = sigma_from_kappa(v.lower, v.upper, v.step, true);
      continue;
    }
    if (vp != nullptr && vp->sigma) {
      out.sigma[i] = *vp->sigma;
      out.kappa[i] = kappa_from_sigma(v.lower, v.upper, *vp->sigma, false);
    } else if (vp != nullptr && vp->kappa) {
      out.kappa[i] = *vp->kappa;
      out.sigma[i] = sigma_from_kappa(v.lower, v.upper, *vp->kappa, false);
    } else if (appears_only_linearly(pp, static_cast<int>(i))) {
      out.sigma[i] = 0;
      out.kappa[i] = v.upper - v.lower;
    } else {
      out.sigma[i] = params.default_sigma;
      out.kappa[i] = kappa_from_sigma(v.lower, v.upper, params.default_sigma, false);
    }
  }
  return out;
}

}  // namespace polybound
