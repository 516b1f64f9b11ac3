#pragma once

#include <map>
#include <vector>

#include "phlift/jetexpr.hpp"
#include "phlift/opalg.hpp"

namespace phlift {

// One lifted coordinate: the order-th spatial derivative of the given state.
struct LiftEntry {
  int state = 1;
  int order = 0;

  friend bool operator==(const LiftEntry& a, const LiftEntry& b) {
    return a.state == b.state && a.order == b.order;
  }
  // Vectorization order: by derivative order first, then by state index.
  friend bool operator<(const LiftEntry& a, const LiftEntry& b) {
    if (a.order != b.order) return a.order < b.order;
    return a.state < b.state;
  }
};

struct LiftSpec {
  std::vector<LiftEntry> entries;  // sorted, pairwise distinct

  int size() const { return static_cast<int>(entries.size()); }
  int max_order() const;
  // 0-based position of (state, order), or -1.
  int index_of(int state, int order) const;
};

// Coordinates to lift: the density support plus the zero-order coordinate of
// every state, so the lifted state always determines the original one.
LiftSpec infer_lift_spec(const DensityProfile& d, int n_states);

struct LiftedSystem {
  MatDiffOp Jbar;              // l x l, formally skew-adjoint
  DensityProfile density_bar;  // in lifted coordinates, derivative-free
  MatDiffOp D_plus;            // diag(dz^{j_k})
  MatDiffOp D_minus;           // diag((-dz)^{j_k})
  LiftSpec spec;
};

// Rewrites the system in the lifted coordinates: Jbar = D+ o J_sub o D- with
// (J_sub)_{kk'} = J_{i_k i_{k'}}, and the density with each derivative
// variable renamed to its zero-order lifted coordinate.
LiftedSystem lift_hamiltonian(const MatDiffOp& J, const DensityProfile& d, const LiftSpec& spec);

// Coefficient matrices of Jbar computed directly, without composing
// operators: entry (k,k') of the order-(u + j_k + j_{k'}) coefficient picks
// up (-1)^{j_{k'}} (P_u)_{i_k i_{k'}}. The sign uses the column entry's
// derivative order; must agree with lift_hamiltonian exactly.
std::map<int, RatMat> coefficients_closed_form(const MatDiffOp& J, const LiftSpec& spec);

// Same summation with the sign taken from the row entry's derivative order
// instead. Does NOT reproduce the composition in general (it flips the sign
// of mixed-order blocks); kept so the difference stays documented by a
// regression test.
std::map<int, RatMat> coefficients_row_sign_variant(const MatDiffOp& J, const LiftSpec& spec);

// Input-map coefficients of Gbar = D+ o G_rows: the order-(u + j_k)
// coefficient's row k picks up row i_k of G_u. No sign: only D+ acts.
std::map<int, RatMat> g_coefficients_closed_form(const MatDiffOp& G, const LiftSpec& spec);

struct DissipativeLift {
  LiftedSystem lifted;
  MatDiffOp Gbar;       // l x d_g
  MatDiffOp composite;  // (l + d_g)^2 skew block operator
};

DissipativeLift lift_dissipative(const MatDiffOp& J, const MatDiffOp& G, const DensityProfile& d,
                                 const LiftSpec& spec);

// [[Jbar, Gbar], [-Gbar*, 0]]. The bottom-left coefficient at order k is
// (-1)^{k+1} Gbar_k^T, which is what -Gbar* expands to; the whole block
// operator is formally skew-adjoint whenever Jbar is.
MatDiffOp composite_operator(const MatDiffOp& Jbar, const MatDiffOp& Gbar);

// Gradient of the lifted density with respect to each lifted coordinate.
// Equal to its Euler derivative because the density is derivative-free.
std::vector<JetPolynomial> lifted_gradient(const LiftedSystem& ls);

// Symbolic residual of the lifted dynamics against the prolonged original
// dynamics: component k is (Jbar gradbar)_k at the prolonged state minus
// D_z^{j_k} (J delta)_{i_k}. All components vanish identically iff the lift
// preserves the equations of motion on the jet algebra.
std::vector<JetPolynomial> lift_roundtrip_residual(const MatDiffOp& J, const DensityProfile& d,
                                                   const LiftSpec& spec);

}  // namespace phlift
