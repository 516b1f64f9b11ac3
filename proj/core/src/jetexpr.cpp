#include "phlift/jetexpr.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "phlift/stencil.hpp"

namespace phlift {

int Monomial::degree() const {
  int d = zpow;
  for (const auto& [v, e] : vars) d += e;
  return d;
}

int Monomial::exponent_of(const JetVar& v) const {
  for (const auto& [w, e] : vars)
    if (w == v) return e;
  return 0;
}

Monomial Monomial::multiply(const Monomial& o) const {
  Monomial r;
  r.zpow = zpow + o.zpow;
  r.vars.reserve(vars.size() + o.vars.size());
  std::size_t i = 0, j = 0;
  while (i < vars.size() && j < o.vars.size()) {
    if (vars[i].first == o.vars[j].first) {
      r.vars.emplace_back(vars[i].first, vars[i].second + o.vars[j].second);
      ++i;
      ++j;
    } else if (vars[i].first < o.vars[j].first) {
      r.vars.push_back(vars[i++]);
    } else {
      r.vars.push_back(o.vars[j++]);
    }
  }
  while (i < vars.size()) r.vars.push_back(vars[i++]);
  while (j < o.vars.size()) r.vars.push_back(o.vars[j++]);
  return r;
}

bool Monomial::operator<(const Monomial& o) const {
  int da = degree(), db = o.degree();
  if (da != db) return da < db;
  std::size_t i = 0;
  for (; i < vars.size() && i < o.vars.size(); ++i) {
    if (vars[i].first != o.vars[i].first) return vars[i].first < o.vars[i].first;
    if (vars[i].second != o.vars[i].second) return vars[i].second < o.vars[i].second;
  }
  if (vars.size() != o.vars.size()) return vars.size() < o.vars.size();
  return zpow < o.zpow;
}

JetPolynomial JetPolynomial::constant(Rat c) {
  JetPolynomial p;
  if (c != 0) p.terms_.emplace(Monomial{}, std::move(c));
  return p;
}

JetPolynomial JetPolynomial::variable(JetVar v) {
  JetPolynomial p;
  Monomial m;
  m.vars.emplace_back(v, 1);
  p.terms_.emplace(std::move(m), Rat(1));
  return p;
}

JetPolynomial JetPolynomial::z() {
  JetPolynomial p;
  Monomial m;
  m.zpow = 1;
  p.terms_.emplace(std::move(m), Rat(1));
  return p;
}

bool JetPolynomial::is_constant() const {
  if (terms_.empty()) return true;
  return terms_.size() == 1 && terms_.begin()->first == Monomial{};
}

Rat JetPolynomial::constant_value() const {
  if (terms_.empty()) return Rat(0);
  if (!is_constant()) throw std::logic_error("JetPolynomial: constant_value on non-constant");
  return terms_.begin()->second;
}

void JetPolynomial::add_term(const Monomial& m, const Rat& c) {
  if (c == 0) return;
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(m, c);
  } else {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

JetPolynomial JetPolynomial::operator+(const JetPolynomial& o) const {
  JetPolynomial r = *this;
  for (const auto& [m, c] : o.terms_) r.add_term(m, c);
  return r;
}

JetPolynomial JetPolynomial::operator-(const JetPolynomial& o) const {
  JetPolynomial r = *this;
  for (const auto& [m, c] : o.terms_) r.add_term(m, -c);
  return r;
}

JetPolynomial JetPolynomial::operator-() const {
  JetPolynomial r;
  for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
  return r;
}

JetPolynomial JetPolynomial::operator*(const JetPolynomial& o) const {
  JetPolynomial r;
  for (const auto& [ma, ca] : terms_)
    for (const auto& [mb, cb] : o.terms_) r.add_term(ma.multiply(mb), ca * cb);
  return r;
}

JetPolynomial JetPolynomial::scaled(const Rat& s) const {
  JetPolynomial r;
  if (s == 0) return r;
  for (const auto& [m, c] : terms_) r.terms_.emplace(m, c * s);
  return r;
}

JetPolynomial JetPolynomial::pow(int e) const {
  if (e < 0) throw std::invalid_argument("JetPolynomial: negative exponent");
  JetPolynomial r = constant(1);
  for (int i = 0; i < e; ++i) r = r * (*this);
  return r;
}

JetPolynomial total_derivative(const JetPolynomial& p) {
  JetPolynomial r;
  for (const auto& [m, c] : p.terms()) {
    // z factor
    if (m.zpow > 0) {
      Monomial d = m;
      d.zpow -= 1;
      r.add_term(d, c * m.zpow);
    }
    // each jet variable factor
    for (std::size_t k = 0; k < m.vars.size(); ++k) {
      const auto [v, e] = m.vars[k];
      Monomial d = m;
      if (e == 1) {
        d.vars.erase(d.vars.begin() + static_cast<std::ptrdiff_t>(k));
      } else {
        d.vars[k].second -= 1;
      }
      JetVar up{v.state, v.order + 1};
      Monomial shifted;
      shifted.vars.emplace_back(up, 1);
      r.add_term(d.multiply(shifted), c * e);
    }
  }
  return r;
}

JetPolynomial total_derivative(const JetPolynomial& p, int times) {
  JetPolynomial r = p;
  for (int i = 0; i < times; ++i) r = total_derivative(r);
  return r;
}

JetPolynomial partial_derivative(const JetPolynomial& p, JetVar v) {
  JetPolynomial r;
  for (const auto& [m, c] : p.terms()) {
    for (std::size_t k = 0; k < m.vars.size(); ++k) {
      if (!(m.vars[k].first == v)) continue;
      int e = m.vars[k].second;
      Monomial d = m;
      if (e == 1) {
        d.vars.erase(d.vars.begin() + static_cast<std::ptrdiff_t>(k));
      } else {
        d.vars[k].second -= 1;
      }
      r.add_term(d, c * e);
      break;
    }
  }
  return r;
}

JetPolynomial partial_derivative_z(const JetPolynomial& p) {
  JetPolynomial r;
  for (const auto& [m, c] : p.terms()) {
    if (m.zpow == 0) continue;
    Monomial d = m;
    d.zpow -= 1;
    r.add_term(d, c * m.zpow);
  }
  return r;
}

std::vector<JetVar> jet_support(const JetPolynomial& p) {
  std::set<JetVar> s;
  for (const auto& [m, c] : p.terms())
    for (const auto& [v, e] : m.vars) s.insert(v);
  return {s.begin(), s.end()};
}

int max_deriv_order(const JetPolynomial& p) {
  int m = 0;
  for (const auto& [mon, c] : p.terms())
    for (const auto& [v, e] : mon.vars) m = std::max(m, v.order);
  return m;
}

int max_state_index(const JetPolynomial& p) {
  int n = 0;
  for (const auto& [mon, c] : p.terms())
    for (const auto& [v, e] : mon.vars) n = std::max(n, v.state);
  return n;
}

bool depends_on_z(const JetPolynomial& p) {
  for (const auto& [m, c] : p.terms())
    if (m.zpow > 0) return true;
  return false;
}

JetPolynomial rename_variables(const JetPolynomial& p, const std::map<JetVar, JetVar>& images) {
  JetPolynomial r;
  for (const auto& [m, c] : p.terms()) {
    Monomial out;
    out.zpow = m.zpow;
    for (const auto& [v, e] : m.vars) {
      auto it = images.find(v);
      if (it == images.end()) throw std::invalid_argument("rename_variables: no image for a support variable");
      Monomial f;
      f.vars.emplace_back(it->second, e);
      out = out.multiply(f);
    }
    r.add_term(out, c);
  }
  return r;
}

JetPolynomial substitute_prolonged(const JetPolynomial& p, const std::vector<JetPolynomial>& states_of_z) {
  JetPolynomial r;
  for (const auto& [m, c] : p.terms()) {
    JetPolynomial term = JetPolynomial::constant(c) * JetPolynomial::z().pow(m.zpow);
    for (const auto& [v, e] : m.vars) {
      if (v.state < 1 || v.state > static_cast<int>(states_of_z.size()))
        throw std::invalid_argument("substitute_prolonged: missing substitute for a state");
      term = term * total_derivative(states_of_z[v.state - 1], v.order).pow(e);
    }
    r = r + term;
  }
  return r;
}

Rat eval_zpoly(const JetPolynomial& p, const Rat& z) {
  Rat out(0);
  for (const auto& [m, c] : p.terms()) {
    if (!m.vars.empty()) throw std::invalid_argument("eval_zpoly: polynomial has jet variables");
    Rat zp(1);
    for (int i = 0; i < m.zpow; ++i) zp *= z;
    out += c * zp;
  }
  return out;
}

JetPolynomial antiderivative_z(const JetPolynomial& p) {
  JetPolynomial r;
  for (const auto& [m, c] : p.terms()) {
    if (!m.vars.empty()) throw std::invalid_argument("antiderivative_z: polynomial has jet variables");
    Monomial up = m;
    up.zpow += 1;
    r.add_term(up, c / Rat(up.zpow));
  }
  return r;
}

Rat integrate_zpoly(const JetPolynomial& p, const Rat& a, const Rat& b) {
  JetPolynomial F = antiderivative_z(p);
  return eval_zpoly(F, b) - eval_zpoly(F, a);
}

DensityProfile make_density_profile(JetPolynomial density) {
  DensityProfile d;
  d.support = jet_support(density);
  d.max_order = max_deriv_order(density);
  d.density = std::move(density);
  return d;
}

JetPolynomial euler_derivative(const DensityProfile& d, int state_index) {
  if (state_index < 1) throw std::invalid_argument("euler_derivative: state_index must be >= 1");
  JetPolynomial acc;
  for (int j = 0; j <= d.max_order; ++j) {
    JetPolynomial pj = partial_derivative(d.density, JetVar{state_index, j});
    if (pj.is_zero()) continue;
    JetPolynomial term = total_derivative(pj, j);
    if (j % 2 == 1) term = -term;
    acc = acc + term;
  }
  return acc;
}

std::string to_string(const JetPolynomial& p, const std::vector<std::string>& state_names) {
  if (p.is_zero()) return "0";
  auto var_name = [&](const JetVar& v) {
    std::string base;
    if (v.state >= 1 && v.state <= static_cast<int>(state_names.size()))
      base = state_names[v.state - 1];
    else
      base = "x" + std::to_string(v.state);
    if (v.order == 0) return base;
    if (v.order == 1) return "dz(" + base + ")";
    return "dz" + std::to_string(v.order) + "(" + base + ")";
  };
  std::ostringstream os;
  bool first = true;
  // print highest-degree terms first for readability
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    const auto& [m, c] = *it;
    Rat abs = c < 0 ? Rat(-c) : c;
    if (first) {
      if (c < 0) os << "-";
      first = false;
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    std::vector<std::string> factors;
    if (abs != 1 || (m.vars.empty() && m.zpow == 0)) factors.push_back(rat_to_string(abs));
    for (const auto& [v, e] : m.vars) {
      std::string f = var_name(v);
      if (e != 1) f += "^" + std::to_string(e);
      factors.push_back(f);
    }
    if (m.zpow > 0) {
      std::string f = "z";
      if (m.zpow != 1) f += "^" + std::to_string(m.zpow);
      factors.push_back(f);
    }
    for (std::size_t i = 0; i < factors.size(); ++i) {
      if (i) os << "*";
      os << factors[i];
    }
  }
  return os.str();
}

std::vector<double> evaluate_on_samples(const JetPolynomial& p, const SampleTable& t) {
  std::size_t N = t.z.size();
  if (N == 0 && !t.u.empty()) N = t.u.begin()->second.size();
  std::vector<double> out(N, 0.0);
  for (const auto& [m, c] : p.terms()) {
    double cd = rat_to_double(c);
    std::vector<const std::vector<double>*> fields;
    std::vector<int> exps;
    for (const auto& [v, e] : m.vars) {
      auto it = t.u.find({v.state, v.order});
      if (it == t.u.end() || it->second.size() != N)
        throw std::invalid_argument("evaluate_on_samples: missing samples for a jet variable");
      fields.push_back(&it->second);
      exps.push_back(e);
    }
    if (m.zpow > 0 && t.z.size() != N)
      throw std::invalid_argument("evaluate_on_samples: missing z samples");
    for (std::size_t i = 0; i < N; ++i) {
      double v = cd;
      for (std::size_t k = 0; k < fields.size(); ++k) v *= std::pow((*fields[k])[i], exps[k]);
      if (m.zpow > 0) v *= std::pow(t.z[i], m.zpow);
      out[i] += v;
    }
  }
  return out;
}

GateauxReport check_euler_vs_gateaux(const DensityProfile& d,
                                     const std::vector<std::vector<double>>& x_samples,
                                     const std::vector<double>& eta, int eta_state,
                                     double a, double b,
                                     const std::vector<double>& eps_sweep) {
  const int n = static_cast<int>(x_samples.size());
  if (eta_state < 1 || eta_state > n)
    throw std::invalid_argument("check_euler_vs_gateaux: eta_state out of range");
  const int N = static_cast<int>(x_samples[0].size());
  const double h = (b - a) / (N - 1);
  const int interior_order = 4;
  // The Euler derivative carries jet variables up to twice the density's
  // order, so the sample table must go that deep.
  JetPolynomial delta = euler_derivative(d, eta_state);
  const int jet_order = std::max(d.max_order, max_deriv_order(delta));
  if (N < 4 * (jet_order + interior_order))
    throw std::invalid_argument("check_euler_vs_gateaux: grid too coarse for the density's derivative order");

  std::vector<DifferenceOp> D(static_cast<std::size_t>(jet_order) + 1);
  for (int j = 1; j <= jet_order; ++j) D[j] = derivative_op_bounded(N, h, j, interior_order);

  auto build_table = [&](const std::vector<std::vector<double>>& fields) {
    SampleTable t;
    t.z.resize(N);
    for (int i = 0; i < N; ++i) t.z[i] = a + i * h;
    for (int s = 1; s <= n; ++s) {
      t.u[{s, 0}] = fields[s - 1];
      for (int j = 1; j <= jet_order; ++j) t.u[{s, j}] = D[j].apply(fields[s - 1]);
    }
    return t;
  };

  std::vector<double> quad = quadrature_weights(N, h, false);
  auto functional = [&](const std::vector<std::vector<double>>& fields) {
    std::vector<double> dens = evaluate_on_samples(d.density, build_table(fields));
    double s = 0;
    for (int i = 0; i < N; ++i) s += quad[i] * dens[i];
    return s;
  };

  SampleTable base = build_table(x_samples);
  std::vector<double> delta_samples = evaluate_on_samples(delta, base);
  double paired = 0;
  for (int i = 0; i < N; ++i) paired += quad[i] * delta_samples[i] * eta[i];

  GateauxReport rep;
  rep.best = std::numeric_limits<double>::infinity();
  for (double eps : eps_sweep) {
    std::vector<std::vector<double>> plus = x_samples, minus = x_samples;
    for (int i = 0; i < N; ++i) {
      plus[eta_state - 1][i] += eps * eta[i];
      minus[eta_state - 1][i] -= eps * eta[i];
    }
    double fd = (functional(plus) - functional(minus)) / (2 * eps);
    double denom = std::max(std::abs(paired), 1e-300);
    double rel = std::abs(fd - paired) / denom;
    rep.per_eps.emplace_back(eps, rel);
    rep.best = std::min(rep.best, rel);
  }
  return rep;
}

}  // namespace phlift
