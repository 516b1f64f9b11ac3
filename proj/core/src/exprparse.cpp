#include "phlift/parse.hpp"

#include <cctype>
#include <optional>

namespace phlift {

ParseError::ParseError(SourcePos p, const std::string& message, std::string exp)
    : std::runtime_error("line " + std::to_string(p.line) + ", col " + std::to_string(p.col) + ": " + message),
      pos(p),
      expected(std::move(exp)) {}

namespace {

enum class Tok { number, ident, plus, minus, star, slash, caret, lparen, rparen, lbracket, rbracket, comma, end };

struct Token {
  Tok kind;
  std::string text;
  SourcePos pos;
};

class Lexer {
 public:
  Lexer(const std::string& text, SourcePos origin) : s_(text), line_(origin.line), col_(origin.col) { advance(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t' || s_[i_] == '\n' || s_[i_] == '\r')) step();
    SourcePos pos{line_, col_};
    if (i_ >= s_.size()) {
      tok_ = {Tok::end, "", pos};
      return;
    }
    char c = s_[i_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string num;
      while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
        num += s_[i_];
        step();
      }
      tok_ = {Tok::number, num, pos};
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string id;
      while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) {
        id += s_[i_];
        step();
      }
      tok_ = {Tok::ident, id, pos};
      return;
    }
    Tok k;
    switch (c) {
      case '+': k = Tok::plus; break;
      case '-': k = Tok::minus; break;
      case '*': k = Tok::star; break;
      case '/': k = Tok::slash; break;
      case '^': k = Tok::caret; break;
      case '(': k = Tok::lparen; break;
      case ')': k = Tok::rparen; break;
      case '[': k = Tok::lbracket; break;
      case ']': k = Tok::rbracket; break;
      case ',': k = Tok::comma; break;
      default:
        throw ParseError(pos, std::string("unexpected character '") + c + "'", "expression token");
    }
    step();
    tok_ = {k, std::string(1, c), pos};
  }

  void step() {
    if (s_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  const std::string& s_;
  std::size_t i_ = 0;
  int line_;
  int col_;
  Token tok_{Tok::end, "", {1, 1}};
};

// Internal marker variable for the derivative symbol in operator entries.
// Never escapes this translation unit: entries are converted to coefficient
// lists before returning.
const JetVar kDerivSymbol{-1, 0};

class Parser {
 public:
  Parser(Lexer& lx, const ExprSymbols& sym) : lx_(lx), sym_(sym) {}

  JetPolynomial expression() {
    JetPolynomial acc = term();
    while (lx_.peek().kind == Tok::plus || lx_.peek().kind == Tok::minus) {
      Tok op = lx_.take().kind;
      JetPolynomial rhs = term();
      acc = (op == Tok::plus) ? acc + rhs : acc - rhs;
    }
    return acc;
  }

 private:
  JetPolynomial term() {
    JetPolynomial acc = factor();
    while (lx_.peek().kind == Tok::star || lx_.peek().kind == Tok::slash) {
      Token op = lx_.take();
      JetPolynomial rhs = factor();
      if (op.kind == Tok::star) {
        acc = acc * rhs;
      } else {
        if (!rhs.is_constant())
          throw ParseError(op.pos, "division is only defined by a nonzero constant", "constant divisor");
        Rat c = rhs.constant_value();
        if (c == 0) throw ParseError(op.pos, "division by zero", "nonzero constant");
        acc = acc.scaled(Rat(1) / c);
      }
    }
    return acc;
  }

  JetPolynomial factor() {
    if (lx_.peek().kind == Tok::minus) {
      Token t = lx_.take();
      return -factor();
    }
    if (lx_.peek().kind == Tok::plus) {
      lx_.take();
      return factor();
    }
    JetPolynomial base = primary();
    if (lx_.peek().kind == Tok::caret) {
      Token caret = lx_.take();
      if (lx_.peek().kind != Tok::number)
        throw ParseError(lx_.peek().pos, "exponent must be a nonnegative integer", "integer");
      Token e = lx_.take();
      long exp = std::stol(e.text);
      return base.pow(static_cast<int>(exp));
    }
    return base;
  }

  JetPolynomial primary() {
    Token t = lx_.peek();
    switch (t.kind) {
      case Tok::number: {
        lx_.take();
        Rat v(t.text, 10);
        return JetPolynomial::constant(v);
      }
      case Tok::lparen: {
        lx_.take();
        JetPolynomial inner = expression();
        expect(Tok::rparen, ")");
        return inner;
      }
      case Tok::ident:
        lx_.take();
        return resolve_identifier(t);
      default:
        throw ParseError(t.pos, "expected a number, name, or parenthesized expression", "primary expression");
    }
  }

  JetPolynomial resolve_identifier(const Token& t) {
    const std::string& id = t.text;
    // derivative wrapper dz(...) / dz<k>(...)
    if (id.size() >= 2 && id[0] == 'd' && id[1] == 'z') {
      std::string suffix = id.substr(2);
      bool all_digits = !suffix.empty();
      for (char c : suffix)
        if (!std::isdigit(static_cast<unsigned char>(c))) all_digits = false;
      if ((suffix.empty() || all_digits) && lx_.peek().kind == Tok::lparen) {
        if (!sym_.allow_states)
          throw ParseError(t.pos, "state derivatives are not allowed in this context", "constant or z");
        int order = suffix.empty() ? 1 : std::stoi(suffix);
        lx_.take();  // (
        Token inner = lx_.peek();
        if (inner.kind != Tok::ident)
          throw ParseError(inner.pos, "dz(...) takes a state name", "state name");
        lx_.take();
        std::optional<int> st = state_index(inner.text);
        if (!st) {
          ParseError err(inner.pos, "unknown state '" + inner.text + "'", "state name");
          err.unknown_name = inner.text;
          throw err;
        }
        expect(Tok::rparen, ")");
        return JetPolynomial::variable(JetVar{*st, order});
      }
    }
    if (id == "z" && sym_.allow_z) return JetPolynomial::z();
    if (id == "d" && sym_.allow_d) return JetPolynomial::variable(kDerivSymbol);
    if (auto p = sym_.params.find(id); p != sym_.params.end()) return JetPolynomial::constant(p->second);
    if (sym_.allow_states) {
      if (std::optional<int> st = state_index(id)) return JetPolynomial::variable(JetVar{*st, 0});
    }
    ParseError err(t.pos, "unknown name '" + id + "'", "state, parameter, or z");
    err.unknown_name = id;
    throw err;
  }

  std::optional<int> state_index(const std::string& id) const {
    for (std::size_t i = 0; i < sym_.state_names.size(); ++i)
      if (sym_.state_names[i] == id) return static_cast<int>(i) + 1;
    if (sym_.implicit_x_names && id.size() >= 2 && id[0] == 'x') {
      bool digits = true;
      for (std::size_t i = 1; i < id.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(id[i]))) digits = false;
      if (digits) {
        int k = std::stoi(id.substr(1));
        if (k >= 1) return k;
      }
    }
    return std::nullopt;
  }

  void expect(Tok k, const std::string& what) {
    if (lx_.peek().kind != k)
      throw ParseError(lx_.peek().pos, "expected '" + what + "'", what);
    lx_.take();
  }

  Lexer& lx_;
  const ExprSymbols& sym_;
};

void check_no_deriv_symbol(const JetPolynomial& p, SourcePos pos) {
  for (const JetVar& v : jet_support(p))
    if (v == kDerivSymbol)
      throw ParseError(pos, "the derivative symbol d is not allowed in this context", "expression without d");
}

// Extract coefficients of powers of d from an entry polynomial; everything
// else must be constant.
std::map<int, Rat> entry_coefficients(const JetPolynomial& p, SourcePos pos) {
  std::map<int, Rat> out;
  for (const auto& [m, c] : p.terms()) {
    if (m.zpow != 0) throw ParseError(pos, "operator entries must be polynomials in d with constant coefficients", "polynomial in d");
    int dpow = 0;
    for (const auto& [v, e] : m.vars) {
      if (v == kDerivSymbol)
        dpow = e;
      else
        throw ParseError(pos, "operator entries must be polynomials in d with constant coefficients", "polynomial in d");
    }
    out[dpow] = c;
  }
  return out;
}

}  // namespace

JetPolynomial parse_jet_expression(const std::string& text, const ExprSymbols& sym, SourcePos origin) {
  Lexer lx(text, origin);
  Parser p(lx, sym);
  JetPolynomial out = p.expression();
  if (lx.peek().kind != Tok::end)
    throw ParseError(lx.peek().pos, "unexpected trailing input", "end of expression");
  if (!sym.allow_d) check_no_deriv_symbol(out, origin);
  return out;
}

MatDiffOp parse_operator_matrix(const std::string& text, const ExprSymbols& sym, SourcePos origin) {
  ExprSymbols entry_sym = sym;
  entry_sym.allow_d = true;
  entry_sym.allow_states = false;
  entry_sym.allow_z = false;
  Lexer lx(text, origin);
  if (lx.peek().kind != Tok::lbracket) throw ParseError(lx.peek().pos, "expected '['", "[");
  lx.take();
  std::vector<std::vector<std::map<int, Rat>>> rows;
  Parser parser(lx, entry_sym);
  bool first_row = true;
  while (true) {
    if (lx.peek().kind == Tok::rbracket && first_row) {
      break;  // empty matrix
    }
    if (lx.peek().kind != Tok::lbracket) throw ParseError(lx.peek().pos, "expected '[' to start a row", "[");
    Token row_open = lx.take();
    std::vector<std::map<int, Rat>> row;
    while (true) {
      SourcePos epos = lx.peek().pos;
      JetPolynomial e = parser.expression();
      row.push_back(entry_coefficients(e, epos));
      if (lx.peek().kind == Tok::comma) {
        lx.take();
        continue;
      }
      if (lx.peek().kind == Tok::rbracket) {
        lx.take();
        break;
      }
      throw ParseError(lx.peek().pos, "expected ',' or ']'", ", or ]");
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError(row_open.pos, "rows have different lengths", "rectangular matrix");
    rows.push_back(std::move(row));
    first_row = false;
    if (lx.peek().kind == Tok::comma) {
      lx.take();
      continue;
    }
    break;
  }
  if (lx.peek().kind != Tok::rbracket) throw ParseError(lx.peek().pos, "expected ']'", "]");
  lx.take();
  if (lx.peek().kind != Tok::end) throw ParseError(lx.peek().pos, "unexpected trailing input", "end of matrix");

  int r = static_cast<int>(rows.size());
  int c = r ? static_cast<int>(rows.front().size()) : 0;
  MatDiffOp op(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j)
      for (const auto& [k, v] : rows[i][j]) op.add_to_coeff(k, i, j, v);
  return op;
}

}  // namespace phlift
