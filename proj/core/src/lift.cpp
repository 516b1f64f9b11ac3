#include "phlift/lift.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace phlift {

int LiftSpec::max_order() const {
  int m = 0;
  for (const LiftEntry& e : entries) m = std::max(m, e.order);
  return m;
}

int LiftSpec::index_of(int state, int order) const {
  for (std::size_t k = 0; k < entries.size(); ++k)
    if (entries[k].state == state && entries[k].order == order) return static_cast<int>(k);
  return -1;
}

LiftSpec infer_lift_spec(const DensityProfile& d, int n_states) {
  std::set<LiftEntry> entries;
  for (const JetVar& v : d.support) {
    if (v.state > n_states)
      throw std::invalid_argument("density references state " + std::to_string(v.state) +
                                  " but the system has " + std::to_string(n_states));
    entries.insert(LiftEntry{v.state, v.order});
  }
  for (int i = 1; i <= n_states; ++i) entries.insert(LiftEntry{i, 0});
  LiftSpec spec;
  spec.entries.assign(entries.begin(), entries.end());
  return spec;
}

namespace {

void require_admissible(const MatDiffOp& J, const DensityProfile& d, const LiftSpec& spec) {
  if (J.rows() != J.cols()) throw std::invalid_argument("operator must be square");
  if (classify_symmetry(J) != Symmetry::skew_adjoint)
    throw std::invalid_argument("operator is not formally skew-adjoint");
  for (const LiftEntry& e : spec.entries)
    if (e.state < 1 || e.state > J.rows() || e.order < 0)
      throw std::invalid_argument("lift entry out of range");
  if (!std::is_sorted(spec.entries.begin(), spec.entries.end()))
    throw std::invalid_argument("lift entries must be sorted by (order, state)");
  for (std::size_t k = 1; k < spec.entries.size(); ++k)
    if (spec.entries[k] == spec.entries[k - 1])
      throw std::invalid_argument("duplicate lift entry");
  for (const JetVar& v : d.support)
    if (spec.index_of(v.state, v.order) < 0)
      throw std::invalid_argument("lift is missing density variable (state " +
                                  std::to_string(v.state) + ", order " + std::to_string(v.order) +
                                  ")");
}

MatDiffOp diag_derivative(const LiftSpec& spec, bool negative) {
  int l = spec.size();
  MatDiffOp D(l, l);
  for (int k = 0; k < l; ++k) {
    int j = spec.entries[k].order;
    Rat sign = (negative && j % 2 == 1) ? Rat(-1) : Rat(1);
    D.add_to_coeff(j, k, k, sign);
  }
  return D;
}

}  // namespace

LiftedSystem lift_hamiltonian(const MatDiffOp& J, const DensityProfile& d, const LiftSpec& spec) {
  require_admissible(J, d, spec);
  int l = spec.size();

  MatDiffOp D_plus = diag_derivative(spec, false);
  MatDiffOp D_minus = diag_derivative(spec, true);

  MatDiffOp J_sub(l, l);
  for (const auto& [u, Pu] : J.coeffs()) {
    for (int k = 0; k < l; ++k)
      for (int kp = 0; kp < l; ++kp) {
        const Rat& c = Pu.at(spec.entries[k].state - 1, spec.entries[kp].state - 1);
        if (c != 0) J_sub.add_to_coeff(u, k, kp, c);
      }
  }

  MatDiffOp Jbar = compose(D_plus, compose(J_sub, D_minus));

  std::map<JetVar, JetVar> images;
  for (int k = 0; k < l; ++k)
    images[JetVar{spec.entries[k].state, spec.entries[k].order}] = JetVar{k + 1, 0};

  LiftedSystem out;
  out.Jbar = Jbar;
  out.density_bar = make_density_profile(rename_variables(d.density, images));
  out.D_plus = D_plus;
  out.D_minus = D_minus;
  out.spec = spec;
  return out;
}

namespace {

std::map<int, RatMat> coefficients_with_sign(const MatDiffOp& J, const LiftSpec& spec,
                                             bool column_sign) {
  int l = spec.size();
  std::map<int, RatMat> out;
  for (const auto& [u, Pu] : J.coeffs()) {
    for (int k = 0; k < l; ++k)
      for (int kp = 0; kp < l; ++kp) {
        const Rat& c = Pu.at(spec.entries[k].state - 1, spec.entries[kp].state - 1);
        if (c == 0) continue;
        int sign_order = column_sign ? spec.entries[kp].order : spec.entries[k].order;
        Rat signed_c = c;
        if (sign_order % 2 == 1) signed_c = -signed_c;
        int target = u + spec.entries[k].order + spec.entries[kp].order;
        auto it = out.find(target);
        if (it == out.end()) it = out.emplace(target, RatMat(l, l)).first;
        it->second.at(k, kp) += signed_c;
      }
  }
  for (auto it = out.begin(); it != out.end();)
    it = it->second.is_zero() ? out.erase(it) : std::next(it);
  return out;
}

}  // namespace

std::map<int, RatMat> coefficients_closed_form(const MatDiffOp& J, const LiftSpec& spec) {
  return coefficients_with_sign(J, spec, true);
}

std::map<int, RatMat> coefficients_row_sign_variant(const MatDiffOp& J, const LiftSpec& spec) {
  return coefficients_with_sign(J, spec, false);
}

std::map<int, RatMat> g_coefficients_closed_form(const MatDiffOp& G, const LiftSpec& spec) {
  int l = spec.size();
  int dg = G.cols();
  std::map<int, RatMat> out;
  for (const auto& [u, Gu] : G.coeffs()) {
    for (int k = 0; k < l; ++k) {
      int target = u + spec.entries[k].order;
      for (int c = 0; c < dg; ++c) {
        const Rat& g = Gu.at(spec.entries[k].state - 1, c);
        if (g == 0) continue;
        auto it = out.find(target);
        if (it == out.end()) it = out.emplace(target, RatMat(l, dg)).first;
        it->second.at(k, c) += g;
      }
    }
  }
  for (auto it = out.begin(); it != out.end();)
    it = it->second.is_zero() ? out.erase(it) : std::next(it);
  return out;
}

MatDiffOp composite_operator(const MatDiffOp& Jbar, const MatDiffOp& Gbar) {
  if (Jbar.rows() != Jbar.cols() || Jbar.rows() != Gbar.rows())
    throw std::invalid_argument("block shapes do not match");
  int l = Jbar.rows();
  int dg = Gbar.cols();
  MatDiffOp Gstar = formal_adjoint(Gbar);  // dg x l
  MatDiffOp out(l + dg, l + dg);
  for (const auto& [k, Jk] : Jbar.coeffs())
    for (int i = 0; i < l; ++i)
      for (int j = 0; j < l; ++j)
        if (Jk.at(i, j) != 0) out.add_to_coeff(k, i, j, Jk.at(i, j));
  for (const auto& [k, Gk] : Gbar.coeffs())
    for (int i = 0; i < l; ++i)
      for (int c = 0; c < dg; ++c)
        if (Gk.at(i, c) != 0) out.add_to_coeff(k, i, l + c, Gk.at(i, c));
  for (const auto& [k, Sk] : Gstar.coeffs())
    for (int c = 0; c < dg; ++c)
      for (int i = 0; i < l; ++i)
        if (Sk.at(c, i) != 0) out.add_to_coeff(k, l + c, i, -Sk.at(c, i));
  return out;
}

DissipativeLift lift_dissipative(const MatDiffOp& J, const MatDiffOp& G, const DensityProfile& d,
                                 const LiftSpec& spec) {
  if (G.rows() != J.rows()) throw std::invalid_argument("input map rows must match state count");
  DissipativeLift out;
  out.lifted = lift_hamiltonian(J, d, spec);

  int l = spec.size();
  int dg = G.cols();
  MatDiffOp G_sub(l, dg);
  for (const auto& [u, Gu] : G.coeffs()) {
    for (int k = 0; k < l; ++k)
      for (int c = 0; c < dg; ++c) {
        const Rat& g = Gu.at(spec.entries[k].state - 1, c);
        if (g != 0) G_sub.add_to_coeff(u, k, c, g);
      }
  }
  out.Gbar = compose(out.lifted.D_plus, G_sub);
  out.composite = composite_operator(out.lifted.Jbar, out.Gbar);
  return out;
}

std::vector<JetPolynomial> lifted_gradient(const LiftedSystem& ls) {
  std::vector<JetPolynomial> grad;
  grad.reserve(ls.spec.size());
  for (int k = 0; k < ls.spec.size(); ++k)
    grad.push_back(partial_derivative(ls.density_bar.density, JetVar{k + 1, 0}));
  return grad;
}

std::vector<JetPolynomial> lift_roundtrip_residual(const MatDiffOp& J, const DensityProfile& d,
                                                   const LiftSpec& spec) {
  LiftedSystem ls = lift_hamiltonian(J, d, spec);
  int n = J.rows();

  std::vector<JetPolynomial> delta;
  delta.reserve(n);
  for (int i = 1; i <= n; ++i) delta.push_back(euler_derivative(d, i));
  std::vector<JetPolynomial> rhs = phlift::apply(J, delta);

  // Lifted gradient pulled back to the original jet variables.
  std::map<JetVar, JetVar> back;
  for (int k = 0; k < spec.size(); ++k)
    back[JetVar{k + 1, 0}] = JetVar{spec.entries[k].state, spec.entries[k].order};
  std::vector<JetPolynomial> grad = lifted_gradient(ls);
  for (JetPolynomial& g : grad) g = rename_variables(g, back);

  std::vector<JetPolynomial> lifted_rhs = phlift::apply(ls.Jbar, grad);

  std::vector<JetPolynomial> res;
  res.reserve(spec.size());
  for (int k = 0; k < spec.size(); ++k) {
    const LiftEntry& e = spec.entries[k];
    res.push_back(lifted_rhs[k] - total_derivative(rhs[e.state - 1], e.order));
  }
  return res;
}

}  // namespace phlift
