#include "polybound/parse.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <memory>
#include <sstream>
#include <unordered_map>

namespace polybound {

ParseError::ParseError(std::string message, int line, int column)
    : std::runtime_error("parse error at " + std::to_string(line) + ":" +
                         std::to_string(column) + ": " + std::move(message)),
      line_(line),
      column_(column) {}

namespace {

enum class Tok {
  Ident, Number, Plus, Minus, Star, Caret, LParen, RParen,
  LBracket, RBracket, LBrace, RBrace, Comma, Semi,
  LessEq, GreaterEq, Assign, End
};

struct Token {
  Tok kind;
  std::string text;
  double value = 0.0;
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token t = next();
      out.push_back(t);
      if (t.kind == Tok::End) break;
    }
    return out;
  }

 private:
  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {  // comment to end of line
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else if (c == '\n') {
        ++pos_; ++line_; col_ = 1;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_; ++col_;
      } else {
        break;
      }
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, line_, col_);
  }

  Token next() {
    Token t;
    t.line = line_;
    t.col = col_;
    if (pos_ >= src_.size()) {
      t.kind = Tok::End;
      return t;
    }
    char c = src_[pos_];
    auto single = [&](Tok k) {
      t.kind = k;
      t.text = std::string(1, c);
      ++pos_; ++col_;
      return t;
    };
    switch (c) {
      case '+': return single(Tok::Plus);
      case '-': return single(Tok::Minus);
      case '*': return single(Tok::Star);
      case '^': return single(Tok::Caret);
      case '(': return single(Tok::LParen);
      case ')': return single(Tok::RParen);
      case '[': return single(Tok::LBracket);
      case ']': return single(Tok::RBracket);
      case '{': return single(Tok::LBrace);
      case '}': return single(Tok::RBrace);
      case ',': return single(Tok::Comma);
      case ';': return single(Tok::Semi);
      case '/': fail("division is not supported (fractional objectives are rejected)");
      case '=': return single(Tok::Assign);
      case '<':
      case '>': {
        if (pos_ + 1 >= src_.size() || src_[pos_ + 1] != '=') {
          fail(std::string("expected '") + c + "='");
        }
        t.kind = (c == '<') ? Tok::LessEq : Tok::GreaterEq;
        t.text = std::string(1, c) + "=";
        pos_ += 2; col_ += 2;
        return t;
      }
      default: break;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_')) {
        ++pos_; ++col_;
      }
      t.kind = Tok::Ident;
      t.text = src_.substr(start, pos_ - start);
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isdigit(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '.')) {
        ++pos_; ++col_;
      }
      if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
        std::size_t save = pos_;
        ++pos_; ++col_;
        if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) {
          ++pos_; ++col_;
        }
        if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          while (pos_ < src_.size() &&
                 std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
            ++pos_; ++col_;
          }
        } else {
          col_ -= static_cast<int>(pos_ - save);
          pos_ = save;
        }
      }
      t.kind = Tok::Number;
      t.text = src_.substr(start, pos_ - start);
      try {
        t.value = std::stod(t.text);
      } catch (const std::exception&) {
        fail("malformed number '" + t.text + "'");
      }
      return t;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// Expression AST; names resolve once all declarations are known.
struct Expr {
  enum class Kind { Num, Var, Add, Sub, Neg, Mul, Pow } kind;
  double value = 0.0;       // Num
  std::string name;         // Var
  int line = 1, col = 1;
  int exponent = 0;         // Pow
  std::unique_ptr<Expr> a, b;
};

using ExprPtr = std::unique_ptr<Expr>;

class Parser {
 public:
  explicit Parser(std::vector<Token> toks, std::string name)
      : toks_(std::move(toks)), name_(std::move(name)) {}

  PolynomialProgram run() {
    while (cur().kind != Tok::End) statement();
    if (!objective_) {
      throw ParseError("missing objective (minimize/maximize)", 1, 1);
    }
    PolynomialProgram pp;
    pp.name = name_;
    pp.variables = variables_;
    pp.objective = resolve(*objective_);
    if (maximize_) pp.objective = -pp.objective;
    for (const auto& [lhs, rel, rhs] : raw_constraints_) {
      Constraint c;
      c.relation = rel;
      c.poly = resolve(*lhs) - resolve(*rhs);
      pp.constraints.push_back(std::move(c));
    }
    pp.validate();
    return pp;
  }

 private:
  const Token& cur() const { return toks_[idx_]; }
  const Token& peek() const {
    return toks_[std::min(idx_ + 1, toks_.size() - 1)];
  }
  Token eat() { return toks_[idx_++]; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, cur().line, cur().col);
  }

  Token expect(Tok k, const std::string& what) {
    if (cur().kind != k) fail("expected " + what);
    return eat();
  }

  bool at_keyword(const std::string& kw) const {
    return cur().kind == Tok::Ident && cur().text == kw;
  }

  void statement() {
    if (at_keyword("minimize") || at_keyword("maximize")) {
      if (objective_) fail("duplicate objective");
      maximize_ = at_keyword("maximize");
      eat();
      objective_ = expr();
      expect(Tok::Semi, "';'");
    } else if (at_keyword("subject")) {
      eat();
      if (!at_keyword("to")) fail("expected 'to' after 'subject'");
      eat();
      do {
        constraint();
      } while (starts_expression());
    } else if (at_keyword("var")) {
      eat();
      var_decl();
    } else if (at_keyword("const")) {
      eat();
      const_decl();
    } else {
      fail("expected a statement (minimize, subject to, var, const)");
    }
  }

  bool starts_expression() const {
    switch (cur().kind) {
      case Tok::Number:
      case Tok::Minus:
      case Tok::Plus:
      case Tok::LParen:
        return true;
      case Tok::Ident:
        return cur().text != "minimize" && cur().text != "maximize" &&
               cur().text != "subject" && cur().text != "var" &&
               cur().text != "const";
      default:
        return false;
    }
  }

  void constraint() {
    ExprPtr lhs = expr();
    Relation rel;
    if (cur().kind == Tok::LessEq) rel = Relation::LessEqual;
    else if (cur().kind == Tok::GreaterEq) rel = Relation::GreaterEqual;
    else if (cur().kind == Tok::Assign) rel = Relation::Equal;
    else fail("expected <=, >= or = in constraint");
    eat();
    ExprPtr rhs = expr();
    expect(Tok::Semi, "';'");
    raw_constraints_.emplace_back(std::move(lhs), rel, std::move(rhs));
  }

  void declare(VariableSpec spec, int line, int col) {
    for (const auto& v : variables_) {
      if (v.name == spec.name) {
        throw ParseError("duplicate declaration of '" + spec.name + "'", line, col);
      }
    }
    try {
      spec.validate();
    } catch (const DomainError& e) {
      throw ParseError(e.what(), line, col);
    }
    variables_.push_back(std::move(spec));
  }

  void var_decl() {
    Token name = expect(Tok::Ident, "variable name");
    if (!at_keyword("in")) fail("expected 'in'");
    eat();
    VariableSpec spec;
    spec.name = name.text;
    if (cur().kind == Tok::LBracket) {
      eat();
      spec.lower = signed_number();
      expect(Tok::Comma, "','");
      spec.upper = signed_number();
      expect(Tok::RBracket, "']'");
      spec.kind = VarKind::Continuous;
    } else if (cur().kind == Tok::LBrace) {
      Token brace = eat();
      std::vector<double> values;
      values.push_back(signed_number());
      while (cur().kind == Tok::Comma) {
        eat();
        values.push_back(signed_number());
      }
      expect(Tok::RBrace, "'}'");
      discrete_from_values(spec, values, brace.line, brace.col);
    } else {
      fail("expected '[' or '{' after 'in'");
    }
    expect(Tok::Semi, "';'");
    declare(std::move(spec), name.line, name.col);
  }

  void discrete_from_values(VariableSpec& spec, const std::vector<double>& values,
                            int line, int col) {
    if (values.size() == 1) {
      spec.kind = VarKind::Fixed;
      spec.lower = spec.upper = values[0];
      return;
    }
    for (std::size_t i = 1; i < values.size(); ++i) {
      if (values[i] <= values[i - 1]) {
        throw ParseError("discrete values must be strictly increasing", line, col);
      }
    }
    const double step = values[1] - values[0];
    for (std::size_t i = 1; i < values.size(); ++i) {
      const double gap = values[i] - values[i - 1];
      if (std::abs(gap - step) > 1e-9 * std::max(1.0, std::abs(step))) {
        throw ParseError("discrete values must be evenly spaced", line, col);
      }
    }
    spec.kind = VarKind::Discrete;
    spec.lower = values.front();
    spec.upper = values.back();
    spec.step = step;
  }

  void const_decl() {
    Token name = expect(Tok::Ident, "constant name");
    expect(Tok::Assign, "'='");
    VariableSpec spec;
    spec.name = name.text;
    spec.kind = VarKind::Fixed;
    spec.lower = spec.upper = signed_number();
    expect(Tok::Semi, "';'");
    declare(std::move(spec), name.line, name.col);
  }

  double signed_number() {
    double sign = 1.0;
    while (cur().kind == Tok::Minus || cur().kind == Tok::Plus) {
      if (eat().kind == Tok::Minus) sign = -sign;
    }
    Token t = expect(Tok::Number, "number");
    return sign * t.value;
  }

  // expr := term (('+'|'-') term)*
  ExprPtr expr() {
    ExprPtr lhs = term();
    while (cur().kind == Tok::Plus || cur().kind == Tok::Minus) {
      bool plus = eat().kind == Tok::Plus;
      auto node = std::make_unique<Expr>();
      node->kind = plus ? Expr::Kind::Add : Expr::Kind::Sub;
      node->a = std::move(lhs);
      node->b = term();
      lhs = std::move(node);
    }
    return lhs;
  }

  // term := unary ('*' unary)*
  ExprPtr term() {
    ExprPtr lhs = unary();
    while (cur().kind == Tok::Star) {
      eat();
      auto node = std::make_unique<Expr>();
      node->kind = Expr::Kind::Mul;
      node->a = std::move(lhs);
      node->b = unary();
      lhs = std::move(node);
    }
    return lhs;
  }

  ExprPtr unary() {
    if (cur().kind == Tok::Minus) {
      Token t = eat();
      auto node = std::make_unique<Expr>();
      node->kind = Expr::Kind::Neg;
      node->line = t.line;
      node->col = t.col;
      node->a = unary();
      return node;
    }
    if (cur().kind == Tok::Plus) {
      eat();
      return unary();
    }
    return power();
  }

  ExprPtr power() {
    ExprPtr base = primary();
    if (cur().kind == Tok::Caret) {
      eat();
      if (cur().kind == Tok::Minus) {
        fail("exponent must be a nonnegative integer");
      }
      Token t = expect(Tok::Number, "integer exponent");
      double e = t.value;
      if (e < 0 || e != std::floor(e) || t.text.find('.') != std::string::npos ||
          t.text.find('e') != std::string::npos || t.text.find('E') != std::string::npos) {
        throw ParseError("exponent must be a nonnegative integer", t.line, t.col);
      }
      auto node = std::make_unique<Expr>();
      node->kind = Expr::Kind::Pow;
      node->exponent = static_cast<int>(e);
      node->a = std::move(base);
      return node;
    }
    return base;
  }

  ExprPtr primary() {
    if (cur().kind == Tok::Number) {
      Token t = eat();
      auto node = std::make_unique<Expr>();
      node->kind = Expr::Kind::Num;
      node->value = t.value;
      return node;
    }
    if (cur().kind == Tok::Ident) {
      Token t = eat();
      auto node = std::make_unique<Expr>();
      node->kind = Expr::Kind::Var;
      node->name = t.text;
      node->line = t.line;
      node->col = t.col;
      return node;
    }
    if (cur().kind == Tok::LParen) {
      eat();
      ExprPtr inner = expr();
      expect(Tok::RParen, "')'");
      return inner;
    }
    fail("expected a number, variable, or '('");
  }

  Polynomial resolve(const Expr& e) const {
    switch (e.kind) {
      case Expr::Kind::Num:
        return Polynomial::constant(e.value);
      case Expr::Kind::Var: {
        for (std::size_t i = 0; i < variables_.size(); ++i) {
          if (variables_[i].name == e.name) {
            return Polynomial::var(static_cast<int>(i));
          }
        }
        throw ParseError("undeclared variable '" + e.name + "'", e.line, e.col);
      }
      case Expr::Kind::Add:
        return resolve(*e.a) + resolve(*e.b);
      case Expr::Kind::Sub:
        return resolve(*e.a) - resolve(*e.b);
      case Expr::Kind::Neg:
        return -resolve(*e.a);
      case Expr::Kind::Mul:
        return resolve(*e.a) * resolve(*e.b);
      case Expr::Kind::Pow: {
        Polynomial base = resolve(*e.a);
        Polynomial out = Polynomial::constant(1.0);
        for (int i = 0; i < e.exponent; ++i) out = out * base;
        return out;
      }
    }
    throw ParseError("internal: bad expression node", e.line, e.col);
  }

  std::vector<Token> toks_;
  std::string name_;
  std::size_t idx_ = 0;
  std::vector<VariableSpec> variables_;
  ExprPtr objective_;
  bool maximize_ = false;
  std::vector<std::tuple<ExprPtr, Relation, ExprPtr>> raw_constraints_;
};

}  // namespace

std::string format_double(double v) {
  char buf[64];
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    std::snprintf(buf, sizeof(buf), "%.0f", v);
    return buf;
  }
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  // trim to the shortest representation that round-trips
  for (int prec = 1; prec < 17; ++prec) {
    char shorter[64];
    std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
    if (std::stod(shorter) == v) return shorter;
  }
  return buf;
}

PolynomialProgram parse_program(const std::string& source, const std::string& name) {
  Lexer lex(source);
  Parser parser(lex.run(), name);
  return parser.run();
}

std::string print_polynomial(const Polynomial& poly,
                             const std::vector<VariableSpec>& vars) {
  if (poly.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : poly.terms()) {
    double coeff = c;
    if (first) {
      if (coeff < 0) { os << "-"; coeff = -coeff; }
      first = false;
    } else {
      os << (coeff < 0 ? " - " : " + ");
      coeff = std::abs(coeff);
    }
    bool wrote = false;
    if (coeff != 1.0 || m.is_constant()) {
      os << format_double(coeff);
      wrote = true;
    }
    for (const auto& [idx, pow] : m.exponents()) {
      if (wrote) os << "*";
      os << vars[static_cast<std::size_t>(idx)].name;
      if (pow > 1) os << "^" << pow;
      wrote = true;
    }
  }
  return os.str();
}

std::string print_program(const PolynomialProgram& pp) {
  std::ostringstream os;
  os << "minimize " << print_polynomial(pp.objective, pp.variables) << ";\n";
  if (!pp.constraints.empty()) {
    os << "subject to\n";
    for (const auto& g : pp.constraints) {
      os << "  " << print_polynomial(g.poly, pp.variables);
      switch (g.relation) {
        case Relation::LessEqual: os << " <= 0"; break;
        case Relation::GreaterEqual: os << " >= 0"; break;
        case Relation::Equal: os << " = 0"; break;
      }
      os << ";\n";
    }
  }
  for (const auto& v : pp.variables) {
    switch (v.kind) {
      case VarKind::Continuous:
        os << "var " << v.name << " in [" << format_double(v.lower) << ", "
           << format_double(v.upper) << "];\n";
        break;
      case VarKind::Discrete: {
        os << "var " << v.name << " in {";
        const int count = static_cast<int>(std::round((v.upper - v.lower) / v.step));
        for (int i = 0; i <= count; ++i) {
          if (i) os << ", ";
          os << format_double(v.lower + i * v.step);
        }
        os << "};\n";
        break;
      }
      case VarKind::Fixed:
        os << "const " << v.name << " = " << format_double(v.lower) << ";\n";
        break;
    }
  }
  return os.str();
}

}  // namespace polybound
