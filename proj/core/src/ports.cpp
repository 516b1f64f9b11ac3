#include "phlift/ports.hpp"

#include <cmath>
#include <stdexcept>

namespace phlift {

PortFrame build_port_frame(const MatDiffOp& J) {
  if (J.rows() != J.cols()) throw std::invalid_argument("port frame needs a square operator");
  if (classify_symmetry(J) != Symmetry::skew_adjoint)
    throw std::invalid_argument("port frame needs a formally skew-adjoint operator");
  PortFrame frame;
  frame.m = J.order();
  frame.n = J.rows();
  if (frame.m == 0) return frame;

  int m = frame.m, n = frame.n, p = m * n;
  frame.Q = RatMat(p, p);
  for (int I = 1; I <= m; ++I)
    for (int Jb = 1; Jb <= m; ++Jb) {
      int k = I + Jb - 1;
      if (k > m) continue;
      RatMat Pk = J.coeff(k);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
          Rat v = Pk.at(r, c);
          if (I % 2 == 0) v = -v;
          frame.Q.at((I - 1) * n + r, (Jb - 1) * n + c) = v;
        }
    }
  if (frame.Q != frame.Q.transposed())
    throw std::logic_error("boundary pairing failed to come out symmetric");

  frame.W_block = RatMat(2 * p, 2 * p);
  for (int r = 0; r < p; ++r)
    for (int c = 0; c < p; ++c) {
      frame.W_block.at(r, c) = frame.Q.at(r, c);
      frame.W_block.at(r, p + c) = -frame.Q.at(r, c);
    }
  for (int r = 0; r < p; ++r) {
    frame.W_block.at(p + r, r) = 1;
    frame.W_block.at(p + r, p + r) = 1;
  }
  return frame;
}

PortSample evaluate_ports(const PortFrame& frame, const std::vector<double>& tau_a,
                          const std::vector<double>& tau_b) {
  int p = frame.trace_size();
  if (static_cast<int>(tau_a.size()) != p || static_cast<int>(tau_b.size()) != p)
    throw std::invalid_argument("trace vectors must have length m*n");
  PortSample s;
  s.f_boundary.assign(p, 0.0);
  s.e_boundary.assign(p, 0.0);
  const double scale = 1.0 / std::sqrt(2.0);
  for (int r = 0; r < p; ++r) {
    double f = 0;
    for (int c = 0; c < p; ++c) f += rat_to_double(frame.Q.at(r, c)) * (tau_b[c] - tau_a[c]);
    s.f_boundary[r] = scale * f;
    s.e_boundary[r] = scale * (tau_b[r] + tau_a[r]);
  }
  for (int r = 0; r < p; ++r) s.power += s.e_boundary[r] * s.f_boundary[r];
  return s;
}

std::vector<JetPolynomial> symbolic_trace(const PortFrame& frame,
                                          const std::vector<JetPolynomial>& e) {
  if (static_cast<int>(e.size()) != frame.n)
    throw std::invalid_argument("effort vector length must match state dimension");
  std::vector<JetPolynomial> tau;
  tau.reserve(frame.trace_size());
  for (int I = 0; I < frame.m; ++I)
    for (int r = 0; r < frame.n; ++r) tau.push_back(total_derivative(e[r], I));
  return tau;
}

JetPolynomial trace_quadratic_form(const PortFrame& frame, const std::vector<JetPolynomial>& tau1,
                                   const std::vector<JetPolynomial>& tau2) {
  int p = frame.trace_size();
  if (static_cast<int>(tau1.size()) != p || static_cast<int>(tau2.size()) != p)
    throw std::invalid_argument("trace vectors must have length m*n");
  JetPolynomial q;
  for (int r = 0; r < p; ++r)
    for (int c = 0; c < p; ++c) {
      const Rat& w = frame.Q.at(r, c);
      if (w != 0) q = q + (tau1[r] * tau2[c]).scaled(w);
    }
  return q;
}

JetPolynomial telescoping_residual(const MatDiffOp& J, const PortFrame& frame,
                                   const std::vector<JetPolynomial>& e) {
  std::vector<JetPolynomial> Je = phlift::apply(J, e);
  JetPolynomial interior;
  for (std::size_t i = 0; i < e.size(); ++i) interior = interior + (e[i] * Je[i]).scaled(Rat(2));
  if (frame.empty()) return interior;
  std::vector<JetPolynomial> tau = symbolic_trace(frame, e);
  return interior - total_derivative(trace_quadratic_form(frame, tau, tau));
}

Rat pairing_residual(const MatDiffOp& J, const PortFrame& frame,
                     const std::vector<JetPolynomial>& e1, const std::vector<JetPolynomial>& e2,
                     const Rat& a, const Rat& b) {
  std::vector<JetPolynomial> Je1 = phlift::apply(J, e1);
  std::vector<JetPolynomial> Je2 = phlift::apply(J, e2);
  JetPolynomial interior;
  for (std::size_t i = 0; i < e1.size(); ++i)
    interior = interior + e1[i] * Je2[i] + Je1[i] * e2[i];
  Rat lhs = integrate_zpoly(interior, a, b);
  if (frame.empty()) return lhs;
  JetPolynomial q =
      trace_quadratic_form(frame, symbolic_trace(frame, e1), symbolic_trace(frame, e2));
  Rat rhs = eval_zpoly(q, b) - eval_zpoly(q, a);
  return lhs - rhs;
}

JetPolynomial density_time_derivative(const DensityProfile& d,
                                      const std::vector<JetPolynomial>& rhs) {
  JetPolynomial out;
  for (const JetVar& v : d.support) {
    if (v.state > static_cast<int>(rhs.size()))
      throw std::invalid_argument("velocity vector is shorter than the density's state range");
    out = out + partial_derivative(d.density, v) * total_derivative(rhs[v.state - 1], v.order);
  }
  return out;
}

JetPolynomial energy_balance_residual(const MatDiffOp& J, const DensityProfile& density,
                                      const PortFrame& frame) {
  if (density.max_order != 0)
    throw std::invalid_argument("energy balance residual expects a derivative-free density");
  std::vector<JetPolynomial> grad;
  grad.reserve(J.rows());
  for (int i = 1; i <= J.rows(); ++i)
    grad.push_back(partial_derivative(density.density, JetVar{i, 0}));
  return telescoping_residual(J, frame, grad).scaled(Rat(1, 2));
}

FirstOrderBalance first_order_boundary_balance(const DensityProfile& d, const MatDiffOp& J,
                                               const std::vector<JetPolynomial>& states_of_z,
                                               const Rat& a, const Rat& b) {
  if (d.max_order > 1)
    throw std::invalid_argument("boundary balance requires a density of derivative order <= 1");
  int n = J.rows();
  if (static_cast<int>(states_of_z.size()) != n)
    throw std::invalid_argument("need one z-polynomial per state");

  std::vector<JetPolynomial> delta;
  delta.reserve(n);
  for (int i = 1; i <= n; ++i) delta.push_back(euler_derivative(d, i));
  std::vector<JetPolynomial> rhs = phlift::apply(J, delta);

  auto at_x = [&](const JetPolynomial& p) { return substitute_prolonged(p, states_of_z); };

  std::vector<JetPolynomial> rhs_x, delta_x;
  for (int i = 0; i < n; ++i) {
    rhs_x.push_back(at_x(rhs[i]));
    delta_x.push_back(at_x(delta[i]));
  }

  FirstOrderBalance out;

  JetPolynomial dens_rate;
  for (const JetVar& v : d.support)
    dens_rate =
        dens_rate + at_x(partial_derivative(d.density, v)) * total_derivative(rhs_x[v.state - 1], v.order);
  out.dH_dt = integrate_zpoly(dens_rate, a, b);

  PortFrame frame = build_port_frame(J);
  if (!frame.empty()) {
    std::vector<JetPolynomial> tau = symbolic_trace(frame, delta_x);
    JetPolynomial q = trace_quadratic_form(frame, tau, tau);
    out.port_power = (eval_zpoly(q, b) - eval_zpoly(q, a)) / Rat(2);
  }
  out.defect = out.dH_dt - out.port_power;

  JetPolynomial flux, effort;
  for (int i = 1; i <= n; ++i) {
    JetPolynomial dH_dxz = partial_derivative(d.density, JetVar{i, 1});
    if (!dH_dxz.is_zero()) flux = flux + at_x(dH_dxz) * rhs_x[i - 1];
    effort = effort + at_x(JetPolynomial::variable(JetVar{i, 1})) * delta_x[i - 1];
  }
  out.flux_bracket = eval_zpoly(flux, b) - eval_zpoly(flux, a);
  out.effort_bracket = eval_zpoly(effort, b) - eval_zpoly(effort, a);
  return out;
}

}  // namespace phlift
