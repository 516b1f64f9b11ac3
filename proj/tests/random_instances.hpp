#pragma once

// Deterministic random builders shared by the property tests. Everything is
// seeded explicitly so failures reproduce.

#include <algorithm>
#include <random>
#include <vector>

#include "phlift/jetexpr.hpp"
#include "phlift/lift.hpp"
#include "phlift/matrix.hpp"
#include "phlift/opalg.hpp"

namespace testgen {

using phlift::JetPolynomial;
using phlift::JetVar;
using phlift::LiftEntry;
using phlift::LiftSpec;
using phlift::MatDiffOp;
using phlift::Monomial;
using phlift::Rat;
using phlift::RatMat;

using Rng = std::mt19937;

inline Rat random_rat(Rng& rng, int num_span = 9, int den_max = 6) {
  std::uniform_int_distribution<int> num(-num_span, num_span);
  std::uniform_int_distribution<int> den(1, den_max);
  return Rat(num(rng)) / Rat(den(rng));
}

inline Rat random_nonzero_rat(Rng& rng) {
  for (;;) {
    Rat r = random_rat(rng);
    if (r != 0) return r;
  }
}

inline JetPolynomial random_poly(Rng& rng, int n_states, int max_order, int max_terms,
                                 int max_degree, bool allow_z = true) {
  std::uniform_int_distribution<int> nterms(1, max_terms);
  std::uniform_int_distribution<int> nvars(0, 2);
  std::uniform_int_distribution<int> state(1, n_states);
  std::uniform_int_distribution<int> order(0, max_order);
  std::uniform_int_distribution<int> expo(1, max_degree);
  std::uniform_int_distribution<int> zp(0, allow_z ? 2 : 0);
  JetPolynomial p;
  const int t = nterms(rng);
  for (int i = 0; i < t; ++i) {
    Monomial m;
    const int v = nvars(rng);
    for (int j = 0; j < v; ++j) {
      JetVar jv{state(rng), order(rng)};
      JetPolynomial factor = JetPolynomial::variable(jv).pow(expo(rng));
      // merge through polynomial multiplication so repeated picks combine
      m = m.multiply(factor.terms().begin()->first);
    }
    m.zpow = zp(rng);
    p.add_term(m, random_rat(rng));
  }
  return p;
}

inline RatMat random_mat(Rng& rng, int rows, int cols) {
  RatMat A(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) A.at(i, j) = random_rat(rng, 5, 4);
  return A;
}

// Formally skew-adjoint operator: even-order coefficients antisymmetric,
// odd-order coefficients symmetric.
inline MatDiffOp random_skew_op(Rng& rng, int n, int max_ord) {
  MatDiffOp J(n, n);
  std::uniform_int_distribution<int> keep(0, 2);
  for (int k = 0; k <= max_ord; ++k) {
    if (k > 0 && keep(rng) == 0) continue;
    RatMat A = random_mat(rng, n, n);
    RatMat P = (k % 2 == 0) ? A - A.transposed() : A + A.transposed();
    J.set_coeff(k, P);
  }
  if (J.is_zero()) J.set_coeff(1, RatMat::identity(n));
  return J;
}

inline MatDiffOp random_general_op(Rng& rng, int rows, int cols, int max_ord) {
  MatDiffOp A(rows, cols);
  std::uniform_int_distribution<int> keep(0, 2);
  for (int k = 0; k <= max_ord; ++k) {
    if (keep(rng) == 0 && k > 0) continue;
    A.set_coeff(k, random_mat(rng, rows, cols));
  }
  if (A.is_zero()) A.set_coeff(0, random_mat(rng, rows, cols));
  return A;
}

// Admissible lift index set: every zero-order coordinate plus a random
// selection of higher derivatives, in (order, state) order.
inline LiftSpec random_lift_spec(Rng& rng, int n, int max_jet_order) {
  std::uniform_int_distribution<int> coin(0, 2);
  std::vector<LiftEntry> entries;
  for (int i = 1; i <= n; ++i) entries.push_back({i, 0});
  for (int j = 1; j <= max_jet_order; ++j)
    for (int i = 1; i <= n; ++i)
      if (coin(rng) == 0) entries.push_back({i, j});
  std::sort(entries.begin(), entries.end());
  LiftSpec spec;
  spec.entries = entries;
  return spec;
}

// Density supported exactly on the spec's variables, so the spec is
// admissible for it by construction.
inline phlift::DensityProfile density_over_spec(Rng& rng, const LiftSpec& spec) {
  JetPolynomial d;
  for (const auto& e : spec.entries) {
    JetPolynomial v = JetPolynomial::variable({e.state, e.order});
    d = d + v * v.scaled(random_nonzero_rat(rng)) + v.scaled(random_rat(rng));
  }
  return phlift::make_density_profile(d);
}

}  // namespace testgen
