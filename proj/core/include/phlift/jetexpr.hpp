#pragma once

#include <compare>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "phlift/rational.hpp"

namespace phlift {

// Jet variable u_{i,j} = j-th spatial derivative of state i. State indices
// are 1-based throughout.
struct JetVar {
  int state = 1;
  int order = 0;
  auto operator<=>(const JetVar&) const = default;
};

// Monomial: product of jet-variable powers and a power of z. Variables are
// kept sorted by (state, order); exponents are >= 1.
struct Monomial {
  std::vector<std::pair<JetVar, int>> vars;
  int zpow = 0;

  int degree() const;
  int exponent_of(const JetVar& v) const;
  Monomial multiply(const Monomial& o) const;

  // Graded order: total degree first, then lexicographic over the variable
  // sequence keyed by (state, order, exponent), z-power last. Any fixed total
  // order gives a unique canonical form; this one is documented in the DSL
  // notes so printed output is reproducible.
  bool operator<(const Monomial& o) const;
  bool operator==(const Monomial&) const = default;
};

// Exact multivariate polynomial in jet variables and z. Canonical: the term
// map never stores a zero coefficient, so structural equality is
// mathematical equality.
class JetPolynomial {
 public:
  JetPolynomial() = default;

  static JetPolynomial constant(Rat c);
  static JetPolynomial variable(JetVar v);
  static JetPolynomial z();

  const std::map<Monomial, Rat>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Rat constant_value() const;  // 0 for the zero polynomial; requires is_constant()

  void add_term(const Monomial& m, const Rat& c);

  JetPolynomial operator+(const JetPolynomial& o) const;
  JetPolynomial operator-(const JetPolynomial& o) const;
  JetPolynomial operator-() const;
  JetPolynomial operator*(const JetPolynomial& o) const;
  JetPolynomial scaled(const Rat& s) const;
  JetPolynomial pow(int e) const;

  friend bool operator==(const JetPolynomial& a, const JetPolynomial& b) { return a.terms_ == b.terms_; }
  friend bool operator!=(const JetPolynomial& a, const JetPolynomial& b) { return !(a == b); }

 private:
  std::map<Monomial, Rat> terms_;
};

// Total spatial derivative D_z: D_z u_{i,j} = u_{i,j+1}, D_z z = 1, Leibniz.
JetPolynomial total_derivative(const JetPolynomial& p);
JetPolynomial total_derivative(const JetPolynomial& p, int times);

// Formal partial derivative treating each jet variable as an independent
// coordinate.
JetPolynomial partial_derivative(const JetPolynomial& p, JetVar v);
JetPolynomial partial_derivative_z(const JetPolynomial& p);

// Jet variables the polynomial genuinely depends on (nonzero partial).
std::vector<JetVar> jet_support(const JetPolynomial& p);
int max_deriv_order(const JetPolynomial& p);
int max_state_index(const JetPolynomial& p);
bool depends_on_z(const JetPolynomial& p);

// Variable renaming; every support variable must have an image.
JetPolynomial rename_variables(const JetPolynomial& p, const std::map<JetVar, JetVar>& images);

// Substitutes state i -> given z-polynomial, realizing u_{i,j} as the j-th
// z-derivative of the substitute. All states present must have a substitute.
JetPolynomial substitute_prolonged(const JetPolynomial& p, const std::vector<JetPolynomial>& states_of_z);

// For z-only polynomials.
Rat eval_zpoly(const JetPolynomial& p, const Rat& z);
JetPolynomial antiderivative_z(const JetPolynomial& p);
Rat integrate_zpoly(const JetPolynomial& p, const Rat& a, const Rat& b);

// Density plus the cached facts the lift needs.
struct DensityProfile {
  JetPolynomial density;
  int max_order = 0;               // highest deriv_order in the support
  std::vector<JetVar> support;     // sorted by (state, order)
};

DensityProfile make_density_profile(JetPolynomial density);

// Variational derivative of the functional with density d with respect to
// state state_index: sum over j from 0 to max_order of (-D_z)^j applied to
// the partial with respect to u_{state_index,j}. The j = 0 term is required;
// dropping it would kill every underived variable's contribution.
JetPolynomial euler_derivative(const DensityProfile& d, int state_index);

// Canonical text form, parseable by parse_jet_expression. State names are
// "x<i>" unless a name table is supplied.
std::string to_string(const JetPolynomial& p, const std::vector<std::string>& state_names = {});

// Numeric evaluation over grid samples. The table must provide samples for
// every (state, order) pair the polynomial uses, all of length N.
struct SampleTable {
  std::vector<double> z;
  std::map<std::pair<int, int>, std::vector<double>> u;
};
std::vector<double> evaluate_on_samples(const JetPolynomial& p, const SampleTable& t);

// Finite-difference check of euler_derivative against the definition
// d/de H[x + e*eta] = integral of <delta_x H, eta>. eta must vanish (with
// enough derivatives) near both endpoints. eps_sweep lists the centered
// difference steps to try.
struct GateauxReport {
  std::vector<std::pair<double, double>> per_eps;  // (eps, relative error)
  double best = 0.0;
};
GateauxReport check_euler_vs_gateaux(const DensityProfile& d,
                                     const std::vector<std::vector<double>>& x_samples,
                                     const std::vector<double>& eta, int eta_state,
                                     double a, double b,
                                     const std::vector<double>& eps_sweep);

}  // namespace phlift
