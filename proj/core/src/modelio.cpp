#include "phlift/modelio.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "phlift/ports.hpp"

#include "CLI11.hpp"
#include "json.hpp"

using nlohmann::json;

namespace phlift {

const char* to_string(ModelErrorKind k) {
  switch (k) {
    case ModelErrorKind::bad_header: return "bad_header";
    case ModelErrorKind::syntax: return "syntax";
    case ModelErrorKind::missing_section: return "missing_section";
    case ModelErrorKind::duplicate_section: return "duplicate_section";
    case ModelErrorKind::shape_mismatch: return "shape_mismatch";
    case ModelErrorKind::undeclared_state: return "undeclared_state";
    case ModelErrorKind::non_skew_operator: return "non_skew_operator";
    case ModelErrorKind::negative_resistance: return "negative_resistance";
  }
  return "unknown";
}

ModelError::ModelError(ModelErrorKind k, SourcePos p, const std::string& message)
    : std::runtime_error("line " + std::to_string(p.line) + ", col " + std::to_string(p.col) +
                         ": " + message),
      kind(k),
      pos(p) {}

namespace {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ParseError::what() already carries the position prefix; drop it before
// re-wrapping so the message is not stamped twice.
std::string bare_message(const ParseError& e) {
  std::string prefix =
      "line " + std::to_string(e.pos.line) + ", col " + std::to_string(e.pos.col) + ": ";
  std::string w = e.what();
  if (w.rfind(prefix, 0) == 0) return w.substr(prefix.size());
  return w;
}

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

// z, d and anything shaped like a derivative wrapper would shadow expression
// syntax, so they cannot name states or parameters.
bool reserved_name(const std::string& s) {
  if (s == "z" || s == "d") return true;
  if (s.size() >= 2 && s[0] == 'd' && s[1] == 'z')
    return std::all_of(s.begin() + 2, s.end(),
                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; });
  return false;
}

struct Cursor {
  const std::string& s;
  int line;
  std::size_t i = 0;

  void skip() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool done() {
    skip();
    return i >= s.size();
  }
  SourcePos pos() {
    skip();
    return {line, static_cast<int>(i) + 1};
  }
  std::string word() {
    skip();
    std::size_t b = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    return s.substr(b, i - b);
  }
  std::string rest() {
    skip();
    std::string r = s.substr(i);
    while (!r.empty() && std::isspace(static_cast<unsigned char>(r.back()))) r.pop_back();
    i = s.size();
    return r;
  }
};

struct RawSection {
  std::string text;
  SourcePos pos;
  bool present = false;
};

Rat constant_of(const std::string& text, const std::map<std::string, Rat>& params, SourcePos pos) {
  ExprSymbols sym;
  sym.params = params;
  sym.allow_z = false;
  sym.allow_states = false;
  sym.implicit_x_names = false;
  try {
    JetPolynomial v = parse_jet_expression(text, sym, pos);
    if (!v.is_constant())
      throw ModelError(ModelErrorKind::syntax, pos, "expected a constant value");
    return v.constant_value();
  } catch (const ParseError& e) {
    throw ModelError(ModelErrorKind::syntax, e.pos, bare_message(e));
  }
}

}  // namespace

ModelDoc parse_model(const std::string& text) {
  std::vector<std::string> raw;
  {
    std::istringstream is(text);
    std::string l;
    while (std::getline(is, l)) {
      if (!l.empty() && l.back() == '\r') l.pop_back();
      auto h = l.find('#');
      if (h != std::string::npos) l.erase(h);
      raw.push_back(l);
    }
  }
  auto blank = [](const std::string& s) {
    return s.find_first_not_of(" \t") == std::string::npos;
  };

  std::size_t li = 0;
  while (li < raw.size() && blank(raw[li])) ++li;
  if (li >= raw.size())
    throw ModelError(ModelErrorKind::bad_header, {1, 1}, "missing 'phs 1' header");
  {
    Cursor c{raw[li], static_cast<int>(li) + 1};
    SourcePos hp = c.pos();
    std::string w1 = c.word();
    std::string w2 = c.word();
    if (w1 != "phs" || w2 != "1" || !c.done())
      throw ModelError(ModelErrorKind::bad_header, hp, "first line must be 'phs 1'");
    ++li;
  }

  ModelDoc doc;
  bool have_system = false, have_domain = false, have_states = false;
  SourcePos states_pos{1, 1};
  std::map<std::string, Rat> params;
  RawSection op_sec, ham_sec, g_sec, r_sec;

  // Multi-line matrix sections: take the rest of the directive line, then
  // whole lines until the brackets balance. Joining with '\n' keeps the
  // lexer's positions file-accurate.
  auto gather_matrix = [&raw](Cursor& c, std::size_t& idx) {
    RawSection out;
    out.pos = c.pos();
    std::string t = c.rest();
    int depth = 0;
    bool seen = false;
    auto count = [&depth, &seen](const std::string& s) {
      for (char ch : s) {
        if (ch == '[') {
          ++depth;
          seen = true;
        } else if (ch == ']') {
          --depth;
        }
      }
    };
    count(t);
    while ((!seen || depth > 0) && idx + 1 < raw.size()) {
      ++idx;
      t += "\n" + raw[idx];
      count(raw[idx]);
    }
    if (!seen || depth != 0)
      throw ModelError(ModelErrorKind::syntax, out.pos, "unterminated matrix");
    out.text = std::move(t);
    out.present = true;
    return out;
  };

  for (; li < raw.size(); ++li) {
    if (blank(raw[li])) continue;
    Cursor c{raw[li], static_cast<int>(li) + 1};
    SourcePos dpos = c.pos();
    std::string key = c.word();
    if (key == "system") {
      if (have_system)
        throw ModelError(ModelErrorKind::duplicate_section, dpos, "duplicate system line");
      SourcePos np = c.pos();
      std::string nm = c.word();
      if (!valid_name(nm))
        throw ModelError(ModelErrorKind::syntax, np, "system needs a name");
      if (!c.done())
        throw ModelError(ModelErrorKind::syntax, c.pos(), "unexpected text after system name");
      doc.name = nm;
      have_system = true;
    } else if (key == "domain") {
      if (have_domain)
        throw ModelError(ModelErrorKind::duplicate_section, dpos, "duplicate domain line");
      SourcePos ap = c.pos();
      std::string wa = c.word();
      auto va = rat_from_string(wa);
      if (!va)
        throw ModelError(ModelErrorKind::syntax, ap, "domain endpoint must be a rational number");
      SourcePos bp = c.pos();
      std::string wb = c.word();
      auto vb = rat_from_string(wb);
      if (!vb)
        throw ModelError(ModelErrorKind::syntax, bp, "domain endpoint must be a rational number");
      if (!c.done())
        throw ModelError(ModelErrorKind::syntax, c.pos(), "unexpected text after domain");
      if (!(*va < *vb))
        throw ModelError(ModelErrorKind::syntax, ap, "domain requires a < b");
      doc.a = *va;
      doc.b = *vb;
      have_domain = true;
    } else if (key == "states") {
      if (have_states)
        throw ModelError(ModelErrorKind::duplicate_section, dpos, "duplicate states line");
      states_pos = dpos;
      while (!c.done()) {
        SourcePos np = c.pos();
        std::string nm = c.word();
        if (!valid_name(nm))
          throw ModelError(ModelErrorKind::syntax, np, "invalid state name '" + nm + "'");
        if (reserved_name(nm))
          throw ModelError(ModelErrorKind::syntax, np, "'" + nm + "' is reserved");
        if (std::find(doc.states.begin(), doc.states.end(), nm) != doc.states.end())
          throw ModelError(ModelErrorKind::duplicate_section, np,
                           "state '" + nm + "' declared twice");
        doc.states.push_back(nm);
      }
      if (doc.states.empty())
        throw ModelError(ModelErrorKind::syntax, dpos, "states needs at least one name");
      have_states = true;
    } else if (key == "param") {
      SourcePos np = c.pos();
      std::string nm = c.word();
      if (!valid_name(nm))
        throw ModelError(ModelErrorKind::syntax, np, "param needs a name");
      if (reserved_name(nm))
        throw ModelError(ModelErrorKind::syntax, np, "'" + nm + "' is reserved");
      if (params.count(nm))
        throw ModelError(ModelErrorKind::duplicate_section, np,
                         "param '" + nm + "' defined twice");
      SourcePos vp = c.pos();
      std::string vt = c.rest();
      if (vt.empty())
        throw ModelError(ModelErrorKind::syntax, vp, "param needs a value");
      Rat val = constant_of(vt, params, vp);
      params.emplace(nm, val);
      doc.params.emplace_back(nm, val);
    } else if (key == "operator") {
      if (op_sec.present)
        throw ModelError(ModelErrorKind::duplicate_section, dpos, "duplicate operator section");
      op_sec = gather_matrix(c, li);
    } else if (key == "hamiltonian") {
      if (ham_sec.present)
        throw ModelError(ModelErrorKind::duplicate_section, dpos,
                         "duplicate hamiltonian section");
      ham_sec.pos = c.pos();
      ham_sec.text = c.rest();
      ham_sec.present = true;
      if (ham_sec.text.empty())
        throw ModelError(ModelErrorKind::syntax, ham_sec.pos, "hamiltonian needs an expression");
    } else if (key == "dissipation") {
      SourcePos wp = c.pos();
      std::string which = c.word();
      if (which == "g") {
        if (g_sec.present)
          throw ModelError(ModelErrorKind::duplicate_section, dpos,
                           "duplicate dissipation g section");
        g_sec = gather_matrix(c, li);
      } else if (which == "r") {
        if (r_sec.present)
          throw ModelError(ModelErrorKind::duplicate_section, dpos,
                           "duplicate dissipation r section");
        r_sec.pos = c.pos();
        r_sec.text = c.rest();
        r_sec.present = true;
        if (r_sec.text.empty())
          throw ModelError(ModelErrorKind::syntax, r_sec.pos,
                           "dissipation r needs an expression");
      } else {
        throw ModelError(ModelErrorKind::syntax, wp, "dissipation section must be 'g' or 'r'");
      }
    } else {
      throw ModelError(ModelErrorKind::syntax, dpos, "unknown directive '" + key + "'");
    }
  }

  if (!have_system)
    throw ModelError(ModelErrorKind::missing_section, {1, 1}, "missing system line");
  if (!have_states)
    throw ModelError(ModelErrorKind::missing_section, {1, 1}, "missing states line");
  if (!op_sec.present)
    throw ModelError(ModelErrorKind::missing_section, {1, 1}, "missing operator section");
  if (!ham_sec.present)
    throw ModelError(ModelErrorKind::missing_section, {1, 1}, "missing hamiltonian section");
  if (r_sec.present && !g_sec.present)
    throw ModelError(ModelErrorKind::missing_section, r_sec.pos,
                     "dissipation r without dissipation g");
  for (const auto& s : doc.states)
    if (params.count(s))
      throw ModelError(ModelErrorKind::syntax, states_pos,
                       "'" + s + "' names both a state and a param");

  ExprSymbols expr_sym;
  expr_sym.state_names = doc.states;
  expr_sym.params = params;
  expr_sym.implicit_x_names = false;
  ExprSymbols op_sym;
  op_sym.params = params;
  op_sym.implicit_x_names = false;

  try {
    doc.J = parse_operator_matrix(op_sec.text, op_sym, op_sec.pos);
  } catch (const ParseError& e) {
    throw ModelError(ModelErrorKind::syntax, e.pos, bare_message(e));
  }
  const int n = doc.n();
  if (doc.J.rows() != doc.J.cols())
    throw ModelError(ModelErrorKind::shape_mismatch, op_sec.pos,
                     "operator must be square, got " + std::to_string(doc.J.rows()) + "x" +
                         std::to_string(doc.J.cols()));
  if (doc.J.rows() > n)
    throw ModelError(ModelErrorKind::undeclared_state, op_sec.pos,
                     "state x" + std::to_string(doc.J.rows()) +
                         " referenced by operator shape, only " + std::to_string(n) +
                         " states declared");
  if (doc.J.rows() < n)
    throw ModelError(ModelErrorKind::shape_mismatch, op_sec.pos,
                     "operator is " + std::to_string(doc.J.rows()) + "x" +
                         std::to_string(doc.J.cols()) + " but " + std::to_string(n) +
                         " states are declared");
  if (classify_symmetry(doc.J) != Symmetry::skew_adjoint)
    throw ModelError(ModelErrorKind::non_skew_operator, op_sec.pos,
                     "operator is not formally skew-adjoint");

  try {
    doc.density = parse_jet_expression(ham_sec.text, expr_sym, ham_sec.pos);
  } catch (const ParseError& e) {
    if (!e.unknown_name.empty())
      throw ModelError(ModelErrorKind::undeclared_state, e.pos, bare_message(e));
    throw ModelError(ModelErrorKind::syntax, e.pos, bare_message(e));
  }

  if (g_sec.present) {
    Dissipation dis;
    try {
      dis.G = parse_operator_matrix(g_sec.text, op_sym, g_sec.pos);
    } catch (const ParseError& e) {
      throw ModelError(ModelErrorKind::syntax, e.pos, bare_message(e));
    }
    if (dis.G.rows() != n || dis.G.cols() < 1)
      throw ModelError(ModelErrorKind::shape_mismatch, g_sec.pos,
                       "input map must have one row per state");
    dis.d_g = dis.G.cols();
    if (r_sec.present) {
      ExprSymbols rsym;
      rsym.params = params;
      rsym.allow_states = false;
      rsym.implicit_x_names = false;
      try {
        dis.R = parse_jet_expression(r_sec.text, rsym, r_sec.pos);
      } catch (const ParseError& e) {
        throw ModelError(ModelErrorKind::syntax, e.pos, bare_message(e));
      }
    } else {
      dis.R = JetPolynomial::constant(1);
    }
    for (int t = 0; t <= 100; ++t) {
      Rat zt = doc.a + (doc.b - doc.a) * Rat(t) / 100;
      if (eval_zpoly(dis.R, zt) < 0)
        throw ModelError(ModelErrorKind::negative_resistance,
                         r_sec.present ? r_sec.pos : g_sec.pos,
                         "resistance is negative at z = " + rat_to_string(zt));
    }
    doc.dissipation = std::move(dis);
  }

  return doc;
}

AssembledSystem ModelDoc::assemble() const {
  AssembledSystem s;
  s.name = name;
  s.state_names = states;
  s.a = a;
  s.b = b;
  s.J = J;
  s.density = make_density_profile(density);
  s.dissipation = dissipation;
  return s;
}

bool operator==(const ModelDoc& x, const ModelDoc& y) {
  if (x.name != y.name || x.a != y.a || x.b != y.b || x.states != y.states) return false;
  if (!(x.J == y.J) || x.density != y.density) return false;
  if (x.dissipation.has_value() != y.dissipation.has_value()) return false;
  if (x.dissipation) {
    if (!(x.dissipation->G == y.dissipation->G)) return false;
    if (x.dissipation->R != y.dissipation->R) return false;
    if (x.dissipation->d_g != y.dissipation->d_g) return false;
  }
  return true;
}

std::string print_model(const ModelDoc& doc) {
  std::ostringstream os;
  os << "phs 1\n";
  os << "system " << doc.name << "\n";
  os << "domain " << rat_to_string(doc.a) << " " << rat_to_string(doc.b) << "\n";
  os << "states";
  for (const auto& s : doc.states) os << " " << s;
  os << "\n";
  for (const auto& [k, v] : doc.params) os << "param " << k << " " << rat_to_string(v) << "\n";
  os << "operator " << to_string(doc.J) << "\n";
  os << "hamiltonian " << to_string(doc.density, doc.states) << "\n";
  if (doc.dissipation) {
    os << "dissipation g " << to_string(doc.dissipation->G) << "\n";
    os << "dissipation r " << to_string(doc.dissipation->R) << "\n";
  }
  return os.str();
}

namespace {

struct BundledModel {
  const char* name;
  const char* text;
};

const BundledModel kBundled[] = {
    {"kdv",
     R"phs(phs 1
# Korteweg-de Vries in first-order Hamiltonian form.
system kdv
domain 0 1
states x
operator [[d]]
hamiltonian 1/6*x^3 - 1/2*dz(x)^2
)phs"},
    {"boussinesq",
     R"phs(phs 1
# Nonlinear water-wave approximation. The linearized problem is ill posed,
# so time integration is only meaningful on short horizons.
system boussinesq
domain 0 1
states x1 x2
operator [[0, d], [d, 0]]
hamiltonian 4/9*x1^3 + 1/2*x2^2 - 1/6*dz(x1)^2
)phs"},
    {"elastic_rod",
     R"phs(phs 1
# One-dimensional elastic rod with unit material constants.
system elastic_rod
domain 0 1
states w p
param rhoA 1
param k 1
param T 1
operator [[0, 1], [-1, 0]]
hamiltonian 1/2*p^2/rhoA + 1/2*k*w^2 + 1/2*T*dz(w)^2
)phs"},
    {"allen_cahn",
     R"phs(phs 1
# Allen-Cahn relaxation with a double-well potential and unit mobility.
system allen_cahn
domain 0 10
states phi
param kappa 1
param gamma_phi 1
operator [[0]]
hamiltonian 1/4*(phi^2 - 1)^2 + 1/2*kappa*dz(phi)^2
dissipation g [[1]]
dissipation r gamma_phi
)phs"},
};

}  // namespace

std::vector<std::string> bundled_model_names() {
  std::vector<std::string> out;
  for (const auto& m : kBundled) out.emplace_back(m.name);
  return out;
}

std::string bundled_model_text(const std::string& name) {
  for (const auto& m : kBundled)
    if (name == m.name) return m.text;
  throw IoError("no bundled model named '" + name + "'");
}

ModelDoc load_model(const std::string& ref) {
  if (ref.find('/') == std::string::npos) {
    std::string key = ref;
    if (key.size() > 4 && key.compare(key.size() - 4, 4, ".phs") == 0)
      key.erase(key.size() - 4);
    for (const auto& m : kBundled)
      if (key == m.name) return parse_model(m.text);
  }
  std::ifstream f(ref);
  if (!f)
    throw IoError("cannot open model '" + ref + "': not a bundled name or a readable file");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_model(ss.str());
}

std::vector<std::string> lifted_state_names(const std::vector<std::string>& states,
                                            const LiftSpec& spec) {
  std::vector<std::string> out;
  std::set<std::string> used(states.begin(), states.end());
  for (const auto& e : spec.entries) {
    std::string base = (e.state >= 1 && e.state <= static_cast<int>(states.size()))
                           ? states[e.state - 1]
                           : "x" + std::to_string(e.state);
    std::string nm = base;
    for (int j = 0; j < e.order; ++j) nm += "_z";
    if (e.order > 0) {
      while (used.count(nm)) nm += "_";
      used.insert(nm);
    }
    out.push_back(nm);
  }
  return out;
}

ModelDoc lifted_model_doc(const ModelDoc& original) {
  AssembledSystem sys = original.assemble();
  LiftSpec spec = infer_lift_spec(sys.density, sys.n());
  ModelDoc out;
  out.name = original.name + "_lifted";
  out.a = original.a;
  out.b = original.b;
  out.states = lifted_state_names(original.states, spec);
  if (sys.dissipation) {
    DissipativeLift dl = lift_dissipative(sys.J, sys.dissipation->G, sys.density, spec);
    out.J = dl.lifted.Jbar;
    out.density = dl.lifted.density_bar.density;
    out.dissipation = Dissipation{dl.Gbar, sys.dissipation->R, sys.dissipation->d_g};
  } else {
    LiftedSystem ls = lift_hamiltonian(sys.J, sys.density, spec);
    out.J = ls.Jbar;
    out.density = ls.density_bar.density;
  }
  return out;
}

void write_trajectory_csv(std::ostream& os, const SemiDiscreteSystem& sd, const Trajectory& traj) {
  const auto& names = sd.system().state_names;
  const int N = sd.grid().N;
  os << "t";
  for (const auto& s : names)
    for (int g = 0; g < N; ++g) os << "," << s << "[" << g << "]";
  os << ",H,port_power,dissipated,defect\n";
  os << std::setprecision(17);
  for (std::size_t r = 0; r < traj.times.size(); ++r) {
    os << traj.times[r];
    for (double v : traj.snapshots[r]) os << "," << v;
    os << "," << traj.H[r] << "," << traj.port_power[r] << "," << traj.dissipated[r] << ","
       << traj.defect[r] << "\n";
  }
}

namespace {

json mat_json(const RatMat& A) {
  json rows = json::array();
  for (int i = 0; i < A.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < A.cols(); ++j) row.push_back(rat_to_string(A.at(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json op_json(const MatDiffOp& A) {
  json coeffs = json::array();
  for (const auto& [k, Ak] : A.coeffs())
    coeffs.push_back({{"order", k}, {"matrix", mat_json(Ak)}});
  return {{"rows", A.rows()}, {"cols", A.cols()}, {"coefficients", std::move(coeffs)},
          {"text", to_string(A)}};
}

void emit_diag(const json& extra) {
  json d = {{"schema", "phlift-diagnostic/1"}};
  d.update(extra);
  std::cerr << d.dump(2) << "\n";
}

int fail_usage(const std::string& msg) {
  emit_diag({{"error", "usage"}, {"message", msg}});
  return 2;
}

MatDiffOp effort_operator(const AssembledSystem& sys) {
  if (sys.dissipation) return composite_operator(sys.J, sys.dissipation->G);
  return sys.J;
}

std::vector<double> bump_profile(const Grid& g) {
  std::vector<double> eta(g.N, 0.0);
  for (int j = 0; j < g.N; ++j) {
    double s = g.N > 1 ? static_cast<double>(j) / (g.N - 1) : 0.0;
    double w = 2 * s - 1;
    if (std::abs(w) < 1) eta[j] = std::exp(1.0 - 1.0 / (1.0 - w * w));
  }
  return eta;
}

bool check_skew(const AssembledSystem& sys, json& details) {
  Symmetry cls = classify_symmetry(sys.J);
  details["symmetry"] =
      cls == Symmetry::skew_adjoint
          ? "skew_adjoint"
          : (cls == Symmetry::self_adjoint ? "self_adjoint" : "neither");
  json orders = json::array();
  for (const auto& [k, Ak] : sys.J.coeffs()) {
    RatMat T = Ak.transposed();
    bool ok = (k % 2 == 0) ? (Ak == T.negated()) : (Ak == T);
    orders.push_back({{"order", k},
                      {"required", k % 2 == 0 ? "skew-symmetric" : "symmetric"},
                      {"ok", ok}});
  }
  details["coefficients"] = std::move(orders);
  bool pass = cls == Symmetry::skew_adjoint;
  if (sys.dissipation) {
    bool comp = classify_symmetry(effort_operator(sys)) == Symmetry::skew_adjoint;
    details["composite_skew_adjoint"] = comp;
    pass = pass && comp;
  }
  details["pass"] = pass;
  return pass;
}

bool check_lift_consistency(const AssembledSystem& sys, json& details) {
  LiftSpec spec = infer_lift_spec(sys.density, sys.n());
  LiftedSystem ls = lift_hamiltonian(sys.J, sys.density, spec);
  json entries = json::array();
  for (const auto& e : spec.entries)
    entries.push_back({{"state", e.state}, {"order", e.order}});
  details["lift"] = std::move(entries);

  bool coeffs_match = coefficients_closed_form(sys.J, spec) == ls.Jbar.coeffs();
  bool density_free = max_deriv_order(ls.density_bar.density) == 0;
  bool jbar_skew = classify_symmetry(ls.Jbar) == Symmetry::skew_adjoint;
  auto residual = lift_roundtrip_residual(sys.J, sys.density, spec);
  bool residual_zero =
      std::all_of(residual.begin(), residual.end(), [](const JetPolynomial& p) { return p.is_zero(); });
  details["closed_form_matches_composition"] = coeffs_match;
  details["lifted_density_derivative_free"] = density_free;
  details["lifted_operator_skew_adjoint"] = jbar_skew;
  details["roundtrip_residual_zero"] = residual_zero;
  bool pass = coeffs_match && density_free && jbar_skew && residual_zero;
  if (sys.dissipation) {
    DissipativeLift dl = lift_dissipative(sys.J, sys.dissipation->G, sys.density, spec);
    bool g_match = g_coefficients_closed_form(sys.dissipation->G, spec) == dl.Gbar.coeffs();
    bool comp_skew = classify_symmetry(dl.composite) == Symmetry::skew_adjoint;
    details["input_map_closed_form_matches"] = g_match;
    details["composite_skew_adjoint"] = comp_skew;
    pass = pass && g_match && comp_skew;
  }
  details["pass"] = pass;
  return pass;
}

bool check_euler(const AssembledSystem& sys, json& details) {
  const double ad = rat_to_double(sys.a), bd = rat_to_double(sys.b);
  Grid g = Grid::bounded(ad, bd, 401);
  std::vector<std::vector<double>> x(sys.n());
  for (int i = 0; i < sys.n(); ++i) x[i] = manufactured_profile(g, i);
  std::vector<double> eta = bump_profile(g);
  const std::vector<double> sweep = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  double worst = 0;
  json per_state = json::array();
  for (int s = 1; s <= sys.n(); ++s) {
    GateauxReport rep = check_euler_vs_gateaux(sys.density, x, eta, s, ad, bd, sweep);
    per_state.push_back({{"state", s}, {"relative_error", rep.best}});
    worst = std::max(worst, rep.best);
  }
  details["per_state"] = std::move(per_state);
  details["max_relative_error"] = worst;
  details["tolerance"] = 1e-6;
  bool pass = worst <= 1e-6;
  details["pass"] = pass;
  return pass;
}

bool check_ports(const AssembledSystem& sys, json& details) {
  MatDiffOp E = effort_operator(sys);
  PortFrame frame = build_port_frame(E);
  details["uses_composite"] = sys.dissipation.has_value();
  details["order"] = frame.m;
  details["components"] = E.rows();
  bool pass = true;
  if (frame.empty()) {
    details["note"] = "operator order is zero: no boundary ports";
  } else {
    bool q_sym = frame.Q == frame.Q.transposed();
    std::vector<JetPolynomial> e;
    for (int i = 0; i < E.rows(); ++i) e.push_back(JetPolynomial::variable({i + 1, 0}));
    bool telescoping = telescoping_residual(E, frame, e).is_zero();
    std::vector<JetPolynomial> e1, e2;
    for (int i = 0; i < E.rows(); ++i) {
      e1.push_back(JetPolynomial::z().pow(frame.m + 1).scaled(i + 1) + JetPolynomial::z());
      e2.push_back(JetPolynomial::z().pow(frame.m) -
                   JetPolynomial::z().pow(2).scaled(Rat(i + 2)));
    }
    bool pairing = pairing_residual(E, frame, e1, e2, sys.a, sys.b) == 0 &&
                   pairing_residual(E, frame, e1, e1, sys.a, sys.b) == 0;
    details["Q_symmetric"] = q_sym;
    details["telescoping_identity"] = telescoping;
    details["pairing_identity"] = pairing;
    details["Q"] = mat_json(frame.Q);
    details["W"] = mat_json(frame.W_block);
    details["scale"] = "1/sqrt(2)";
    pass = q_sym && telescoping && pairing;
  }
  details["pass"] = pass;
  return pass;
}

int do_lift(const std::string& ref, bool with_composite, const std::string& out_path) {
  ModelDoc doc = load_model(ref);
  AssembledSystem sys = doc.assemble();
  if (with_composite && !sys.dissipation)
    return fail_usage("--dissipative requires a model with a dissipation section");
  ModelDoc lifted = lifted_model_doc(doc);
  LiftSpec spec = infer_lift_spec(sys.density, sys.n());

  json j;
  j["schema"] = "phlift-lift/1";
  j["model"] = doc.name;
  j["states"] = doc.states;
  j["lifted_states"] = lifted.states;
  json entries = json::array();
  for (int k = 0; k < spec.size(); ++k)
    entries.push_back({{"state", spec.entries[k].state},
                       {"order", spec.entries[k].order},
                       {"name", lifted.states[k]}});
  j["lift"] = std::move(entries);
  j["operator"] = op_json(lifted.J);
  j["density"] = to_string(lifted.density, lifted.states);
  if (lifted.dissipation) {
    j["input_map"] = op_json(lifted.dissipation->G);
    if (with_composite)
      j["composite"] = op_json(composite_operator(lifted.J, lifted.dissipation->G));
  }
  std::string text = print_model(lifted);
  j["model_text"] = text;
  if (!out_path.empty()) {
    std::ofstream f(out_path);
    if (!f) throw IoError("cannot write '" + out_path + "'");
    f << text;
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

int do_check(const std::string& ref, const std::string& which) {
  ModelDoc doc = load_model(ref);
  AssembledSystem sys = doc.assemble();
  json details;
  bool pass = false;
  if (which == "skew")
    pass = check_skew(sys, details);
  else if (which == "lift-consistency")
    pass = check_lift_consistency(sys, details);
  else if (which == "euler")
    pass = check_euler(sys, details);
  else
    pass = check_ports(sys, details);
  json j;
  j["schema"] = "phlift-check/1";
  j["model"] = doc.name;
  j["check"] = which;
  j["details"] = std::move(details);
  j["pass"] = pass;
  std::cout << j.dump(2) << "\n";
  return pass ? 0 : 1;
}

int do_ports(const std::string& ref) {
  ModelDoc doc = load_model(ref);
  AssembledSystem sys = doc.assemble();
  MatDiffOp E = effort_operator(sys);
  PortFrame frame = build_port_frame(E);
  json j;
  j["schema"] = "phlift-ports/1";
  j["model"] = doc.name;
  j["uses_composite"] = sys.dissipation.has_value();
  j["order"] = frame.m;
  j["components"] = E.rows();
  j["trace_size"] = frame.trace_size();
  if (frame.empty()) {
    j["note"] = "operator order is zero: no boundary ports";
  } else {
    j["Q"] = mat_json(frame.Q);
    j["W"] = mat_json(frame.W_block);
    j["scale"] = "1/sqrt(2)";
    j["input_order"] = {"tau_b", "tau_a"};
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

int do_simulate(const std::string& ref, int nx, double dt, double t_end, bool periodic,
                bool lifted, const std::string& out_path, int record_every) {
  if (nx < 2) return fail_usage("--nx must be at least 2");
  if (!(dt > 0)) return fail_usage("--dt must be positive");
  if (!(t_end >= dt)) return fail_usage("--t-end must be at least one step");
  ModelDoc doc = load_model(ref);
  AssembledSystem base = doc.assemble();
  const double ad = rat_to_double(base.a), bd = rat_to_double(base.b);
  Grid grid = periodic ? Grid::make_periodic(ad, bd, nx) : Grid::bounded(ad, bd, nx);

  AssembledSystem target = base;
  std::vector<double> x0;
  if (lifted) {
    LiftSpec spec = infer_lift_spec(base.density, base.n());
    x0 = prolong_state(default_initial_state(base, grid), base.n(), spec, grid);
    target = lifted_model_doc(doc).assemble();
  } else {
    x0 = default_initial_state(base, grid);
  }
  SemiDiscreteSystem sd(target, grid);

  long steps = std::lround(t_end / dt);
  IntegrateOptions opts;
  opts.record_every =
      record_every > 0 ? record_every : static_cast<int>(std::max(1L, steps / 500));
  Trajectory traj = integrate(sd, x0, dt, t_end, opts);

  double max_increase = 0;
  bool first = true;
  for (std::size_t i = 1; i < traj.H.size(); ++i) {
    double d = traj.H[i] - traj.H[i - 1];
    if (first || d > max_increase) max_increase = d;
    first = false;
  }
  double max_defect = 0, min_phi_F = 0;
  for (std::size_t i = 0; i < traj.defect.size(); ++i) {
    max_defect = std::max(max_defect, std::abs(traj.defect[i]));
    min_phi_F = std::min(min_phi_F, traj.min_phi_F[i]);
  }

  json summary;
  summary["schema"] = "phlift-simulate/1";
  summary["model"] = doc.name;
  summary["lifted"] = lifted;
  summary["bc"] = periodic ? "periodic" : "bounded";
  summary["grid"] = {{"a", ad}, {"b", bd}, {"nx", nx}};
  summary["dt"] = dt;
  summary["t_end"] = t_end;
  summary["steps_taken"] = traj.steps_taken;
  summary["rows"] = traj.times.size();
  summary["cfl"] = {{"estimate", traj.cfl_estimate}, {"warning", traj.cfl_warning}};
  if (!traj.H.empty())
    summary["energy"] = {{"initial", traj.H.front()},
                         {"final", traj.H.back()},
                         {"max_step_increase", traj.H.size() > 1 ? max_increase : 0.0}};
  summary["balance"] = {{"max_abs_defect", max_defect}, {"min_phi_F", min_phi_F}};
  summary["aborted"] = traj.aborted;
  if (traj.aborted) summary["abort_reason"] = traj.abort_reason;
  summary["csv"] = out_path.empty() ? "stdout" : out_path;

  if (!out_path.empty()) {
    std::ofstream f(out_path);
    if (!f) throw IoError("cannot write '" + out_path + "'");
    write_trajectory_csv(f, sd, traj);
    std::cout << summary.dump(2) << "\n";
  } else {
    write_trajectory_csv(std::cout, sd, traj);
    std::cerr << summary.dump(2) << "\n";
  }
  return traj.aborted ? 1 : 0;
}

int do_report(const std::string& ref) {
  ModelDoc doc = load_model(ref);
  AssembledSystem sys = doc.assemble();
  json rep;
  rep["schema"] = "phlift-report/1";
  rep["model"] = doc.name;
  rep["domain"] = {rat_to_string(doc.a), rat_to_string(doc.b)};
  rep["states"] = doc.states;
  rep["dissipative"] = doc.dissipation.has_value();

  json d_skew, d_lift, d_euler, d_ports;
  bool ok_skew = check_skew(sys, d_skew);
  bool ok_lift = check_lift_consistency(sys, d_lift);
  bool ok_euler = check_euler(sys, d_euler);
  bool ok_ports = check_ports(sys, d_ports);

  ModelDoc lifted = lifted_model_doc(doc);
  d_lift["lifted_states"] = lifted.states;
  d_lift["operator"] = op_json(lifted.J);
  d_lift["density"] = to_string(lifted.density, lifted.states);
  if (lifted.dissipation) {
    d_lift["input_map"] = op_json(lifted.dissipation->G);
    d_lift["composite"] = op_json(composite_operator(lifted.J, lifted.dissipation->G));
  }
  rep["skew"] = std::move(d_skew);
  rep["lift"] = std::move(d_lift);
  rep["euler"] = std::move(d_euler);
  rep["ports"] = std::move(d_ports);

  const double ad = rat_to_double(sys.a), bd = rat_to_double(sys.b);
  Grid grid = Grid::bounded(ad, bd, 201);
  SemiDiscreteSystem sd(sys, grid);
  std::vector<double> x0 = default_initial_state(sys, grid);
  BalanceSample bal = sd.balance(x0);
  double rho = sd.spectral_radius_estimate(x0);
  bool finite = std::isfinite(bal.dH_dt) && std::isfinite(bal.port_power) &&
                std::isfinite(bal.dissipated) && std::isfinite(bal.defect) && std::isfinite(rho);
  rep["discrete_balance"] = {{"bc", "bounded"},
                             {"nx", grid.N},
                             {"dH_dt", bal.dH_dt},
                             {"port_power", bal.port_power},
                             {"dissipated", bal.dissipated},
                             {"defect", bal.defect},
                             {"min_phi_F", bal.min_phi_F},
                             {"spectral_radius", rho},
                             {"stable_dt_estimate", rho > 0 ? 2.78 / rho : 0.0},
                             {"finite", finite}};

  bool pass = ok_skew && ok_lift && ok_euler && ok_ports && finite;
  rep["pass"] = pass;
  std::cout << rep.dump(2) << "\n";
  return pass ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Jet-space lifting and numerical verification for 1-D port-Hamiltonian models"};
  app.name("phlift");

  std::string lift_model, lift_out;
  bool lift_diss = false;
  CLI::App* lift_cmd =
      app.add_subcommand("lift", "Rewrite a model in jet coordinates and emit the lifted system");
  lift_cmd->add_option("model", lift_model, "Bundled model name or path to a .phs file")
      ->required();
  lift_cmd->add_flag("--dissipative", lift_diss,
                     "Also emit the composite operator with the resistive port");
  lift_cmd->add_option("--out", lift_out, "Write the lifted model DSL to this file");

  std::string check_model, check_which;
  CLI::App* check_cmd = app.add_subcommand("check", "Run a verification suite against a model");
  check_cmd->add_option("model", check_model, "Bundled model name or path to a .phs file")
      ->required();
  check_cmd->add_option("suite", check_which, "skew, lift-consistency, euler, or ports")
      ->required()
      ->check(CLI::IsMember({"skew", "lift-consistency", "euler", "ports"}));

  std::string ports_model;
  CLI::App* ports_cmd = app.add_subcommand("ports", "Emit the boundary port frame Q and W");
  ports_cmd->add_option("model", ports_model, "Bundled model name or path to a .phs file")
      ->required();

  std::string sim_model, sim_bc, sim_out;
  int sim_nx = 0, sim_record = 0;
  double sim_dt = 0, sim_tend = 0;
  bool sim_lifted = false;
  CLI::App* sim_cmd = app.add_subcommand(
      "simulate", "Integrate a model and emit a trajectory CSV plus a balance summary");
  sim_cmd->add_option("model", sim_model, "Bundled model name or path to a .phs file")
      ->required();
  sim_cmd->add_option("--nx", sim_nx, "Number of grid points")->required();
  sim_cmd->add_option("--dt", sim_dt, "Time step")->required();
  sim_cmd->add_option("--t-end", sim_tend, "Final time")->required();
  sim_cmd->add_option("--bc", sim_bc, "Boundary handling")
      ->required()
      ->check(CLI::IsMember({"periodic", "bounded"}));
  sim_cmd->add_flag("--lifted", sim_lifted,
                    "Integrate the lifted system from prolonged initial data");
  sim_cmd->add_option("--out", sim_out, "Write the CSV here; the summary then goes to stdout");
  sim_cmd->add_option("--record-every", sim_record,
                      "Record cadence in steps (default aims for about 500 rows)");

  std::string report_model;
  CLI::App* report_cmd =
      app.add_subcommand("report", "Emit the full verification certificate as JSON");
  report_cmd->add_option("model", report_model, "Bundled model name or path to a .phs file")
      ->required();

  app.require_subcommand(1);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_diag({{"error", "usage"}, {"message", e.what()}});
    return 2;
  }

  try {
    if (*lift_cmd) return do_lift(lift_model, lift_diss, lift_out);
    if (*check_cmd) return do_check(check_model, check_which);
    if (*ports_cmd) return do_ports(ports_model);
    if (*sim_cmd)
      return do_simulate(sim_model, sim_nx, sim_dt, sim_tend, sim_bc == "periodic", sim_lifted,
                         sim_out, sim_record);
    if (*report_cmd) return do_report(report_model);
    return fail_usage("no subcommand selected");
  } catch (const ModelError& e) {
    emit_diag({{"error", "model"},
               {"kind", to_string(e.kind)},
               {"line", e.pos.line},
               {"col", e.pos.col},
               {"message", e.what()}});
    return 2;
  } catch (const ParseError& e) {
    emit_diag({{"error", "model"},
               {"kind", "syntax"},
               {"line", e.pos.line},
               {"col", e.pos.col},
               {"message", e.what()}});
    return 2;
  } catch (const IoError& e) {
    emit_diag({{"error", "io"}, {"message", e.what()}});
    return 2;
  } catch (const std::invalid_argument& e) {
    emit_diag({{"error", "usage"}, {"message", e.what()}});
    return 2;
  } catch (const std::exception& e) {
    emit_diag({{"error", "internal"}, {"message", e.what()}});
    return 2;
  }
}

}  // namespace phlift
