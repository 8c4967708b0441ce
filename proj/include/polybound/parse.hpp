#pragma once

#include <string>

#include "polybound/poly.hpp"

namespace polybound {

/// Syntax or semantic error in a .pp source, with 1-based position.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Parse the modeling format:
///
///   minimize <polyexpr> ;
///   subject to <polyexpr> (<=|>=|=) <polyexpr> ; ...
///   var <name> in [lo, hi] ;
///   var <name> in {v1, v2, ...} ;     (evenly spaced values)
///   const <name> = v ;
///
/// Expressions support + - * ^ with nonnegative integer exponents and
/// parentheses.  `maximize` is accepted and negates the objective.
/// Statements may appear in any order; names resolve after the whole
/// source is read.
PolynomialProgram parse_program(const std::string& source,
                                const std::string& name = "");

/// Canonical text form; parse(print_program(pp)) == parse-equal pp.
std::string print_program(const PolynomialProgram& pp);

std::string print_polynomial(const Polynomial& poly,
                             const std::vector<VariableSpec>& vars);

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

}  // namespace polybound
