#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "phlift/jetexpr.hpp"
#include "phlift/opalg.hpp"

namespace phlift {

struct SourcePos {
  int line = 1;
  int col = 1;
};

// Syntax error with position and the token class that was expected. When the
// failure is an identifier that resolved to nothing, unknown_name carries it
// so callers can distinguish undeclared names from malformed input.
class ParseError : public std::runtime_error {
 public:
  ParseError(SourcePos pos, const std::string& message, std::string expected = "");
  SourcePos pos;
  std::string expected;
  std::string unknown_name;
};

// Identifier resolution context for expression parsing. Parameters are
// substituted at parse time, so downstream algebra sees rationals only.
struct ExprSymbols {
  std::vector<std::string> state_names;  // position i resolves to state i+1
  std::map<std::string, Rat> params;
  bool allow_z = true;
  bool allow_states = true;
  bool allow_d = false;          // operator entries use d as the derivative symbol
  bool implicit_x_names = true;  // x1, x2, ... resolve even without declared names
};

// Jet expression: states, dz(state), dz<k>(state), z, rationals, + - * / ^.
// Division requires a constant divisor.
JetPolynomial parse_jet_expression(const std::string& text, const ExprSymbols& sym,
                                   SourcePos origin = {});

// Operator matrix [[entry, ...], ...] with entries polynomial in d.
MatDiffOp parse_operator_matrix(const std::string& text, const ExprSymbols& sym,
                                SourcePos origin = {});

}  // namespace phlift
