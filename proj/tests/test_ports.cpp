#include <doctest.h>

#include <cmath>
#include <random>

#include "phlift/jetexpr.hpp"
#include "phlift/lift.hpp"
#include "phlift/opalg.hpp"
#include "phlift/parse.hpp"
#include "phlift/ports.hpp"
#include "random_instances.hpp"

using namespace phlift;

namespace {

JetPolynomial var(int i, int j) { return JetPolynomial::variable({i, j}); }

MatDiffOp op_of(const std::string& text) {
  ExprSymbols sym;
  sym.allow_states = false;
  sym.allow_z = false;
  sym.allow_d = true;
  return parse_operator_matrix(text, sym);
}

std::vector<JetPolynomial> generic_efforts(int n) {
  std::vector<JetPolynomial> e;
  for (int i = 1; i <= n; ++i) e.push_back(var(i, 0));
  return e;
}

}  // namespace

TEST_CASE("boundary pairing matrices of the worked operators") {
  PortFrame f1 = build_port_frame(op_of("[[0, d], [d, 0]]"));
  CHECK(f1.m == 1);
  CHECK(f1.n == 2);
  RatMat Q1(2, 2);
  Q1.at(0, 1) = 1;
  Q1.at(1, 0) = 1;
  CHECK(f1.Q == Q1);

  PortFrame rod = build_port_frame(op_of("[[0, 1, 0], [-1, 0, d], [0, d, 0]]"));
  CHECK(rod.m == 1);
  RatMat Qrod(3, 3);
  Qrod.at(1, 2) = 1;
  Qrod.at(2, 1) = 1;
  CHECK(rod.Q == Qrod);

  PortFrame kdv = build_port_frame(op_of("[[d]]"));
  CHECK(kdv.m == 1);
  CHECK(kdv.Q.at(0, 0) == 1);
}

TEST_CASE("second-order pairing stacks signed coefficient blocks") {
  MatDiffOp J = op_of("[[0, d, 0], [d, 0, -d^2], [0, d^2, 0]]");
  PortFrame f = build_port_frame(J);
  CHECK(f.m == 2);
  CHECK(f.n == 3);
  CHECK(f.trace_size() == 6);
  REQUIRE(f.Q.rows() == 6);
  // blocks: [[P1, P2], [-P2, 0]]
  RatMat P1 = J.coeff(1), P2 = J.coeff(2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      CHECK(f.Q.at(i, j) == P1.at(i, j));
      CHECK(f.Q.at(i, 3 + j) == P2.at(i, j));
      CHECK(f.Q.at(3 + i, j) == -P2.at(i, j));
      CHECK(f.Q.at(3 + i, 3 + j) == 0);
    }
  CHECK(f.Q == f.Q.transposed());
}

TEST_CASE("pairing matrix is symmetric for every skew-adjoint operator") {
  testgen::Rng rng(601);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    const int m = 1 + static_cast<int>(rng() % 3);
    MatDiffOp J = testgen::random_skew_op(rng, n, m);
    if (J.order() == 0) continue;
    PortFrame f = build_port_frame(J);
    CHECK(f.Q == f.Q.transposed());
  }
}

TEST_CASE("order-zero operators carry no boundary ports") {
  PortFrame f = build_port_frame(op_of("[[0, 1], [-1, 0]]"));
  CHECK(f.empty());
  CHECK(f.trace_size() == 0);
}

TEST_CASE("port frames require skew-adjoint input") {
  CHECK_THROWS_AS(build_port_frame(op_of("[[1, d], [d, 0]]")), std::invalid_argument);
  CHECK_THROWS_AS(build_port_frame(op_of("[[d^2]]")), std::invalid_argument);
}

TEST_CASE("port evaluation implements the difference pairing") {
  PortFrame f = build_port_frame(op_of("[[0, d, 0], [d, 0, -d^2], [0, d^2, 0]]"));
  std::mt19937 rng(602);
  std::uniform_real_distribution<double> U(-2, 2);
  auto Qd = [&](const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0;
    for (int i = 0; i < f.Q.rows(); ++i)
      for (int j = 0; j < f.Q.cols(); ++j) s += rat_to_double(f.Q.at(i, j)) * x[i] * y[j];
    return s;
  };
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> ta(6), tb(6);
    for (auto& v : ta) v = U(rng);
    for (auto& v : tb) v = U(rng);
    PortSample s = evaluate_ports(f, ta, tb);
    REQUIRE(s.f_boundary.size() == 6);
    REQUIRE(s.e_boundary.size() == 6);
    double dot = 0;
    for (int i = 0; i < 6; ++i) dot += s.f_boundary[i] * s.e_boundary[i];
    CHECK(s.power == doctest::Approx(dot).epsilon(1e-12));
    CHECK(s.power == doctest::Approx(0.5 * (Qd(tb, tb) - Qd(ta, ta))).epsilon(1e-10));
  }

  PortSample same = evaluate_ports(f, std::vector<double>(6, 0.7), std::vector<double>(6, 0.7));
  for (double v : same.f_boundary) CHECK(v == doctest::Approx(0.0));
  CHECK(same.power == doctest::Approx(0.0));

  PortSample zero = evaluate_ports(f, std::vector<double>(6, 0.0), std::vector<double>(6, 0.0));
  CHECK(zero.power == 0.0);

  CHECK_THROWS_AS(evaluate_ports(f, std::vector<double>(5, 0.0), std::vector<double>(6, 0.0)),
                  std::invalid_argument);
}

TEST_CASE("symbolic traces stack derivatives by order") {
  MatDiffOp J = op_of("[[d, -d^2], [d^2, -d^3]]");
  PortFrame f = build_port_frame(J);
  CHECK(f.m == 3);
  auto e = generic_efforts(2);
  auto tau = symbolic_trace(f, e);
  REQUIRE(tau.size() == 6);
  CHECK(tau[0] == var(1, 0));
  CHECK(tau[1] == var(2, 0));
  CHECK(tau[2] == var(1, 1));
  CHECK(tau[3] == var(2, 1));
  CHECK(tau[4] == var(1, 2));
  CHECK(tau[5] == var(2, 2));
}

TEST_CASE("telescoping identity holds identically") {
  std::vector<std::string> ops = {
      "[[d]]",
      "[[0, d], [d, 0]]",
      "[[0, 1, 0], [-1, 0, d], [0, d, 0]]",
      "[[0, d, 0], [d, 0, -d^2], [0, d^2, 0]]",
      "[[d, -d^2], [d^2, -d^3]]",
      "[[0, 0, 1], [0, 0, d], [-1, d, 0]]",
  };
  for (const auto& text : ops) {
    MatDiffOp J = op_of(text);
    PortFrame f = build_port_frame(J);
    CAPTURE(text);
    CHECK(telescoping_residual(J, f, generic_efforts(J.rows())).is_zero());
  }

  testgen::Rng rng(603);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 3);
    MatDiffOp J = testgen::random_skew_op(rng, n, 3);
    if (J.order() == 0) continue;
    PortFrame f = build_port_frame(J);
    std::vector<JetPolynomial> e;
    for (int i = 0; i < n; ++i) e.push_back(testgen::random_poly(rng, n, 1, 3, 2, false));
    CHECK(telescoping_residual(J, f, e).is_zero());
  }
}

TEST_CASE("polarized pairing residual vanishes for polynomial efforts") {
  testgen::Rng rng(604);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 3);
    MatDiffOp J = testgen::random_skew_op(rng, n, 3);
    if (J.order() == 0) continue;
    PortFrame f = build_port_frame(J);
    std::vector<JetPolynomial> e1, e2;
    for (int i = 0; i < n; ++i) {
      JetPolynomial a, b;
      for (int k = 0; k <= 3; ++k) {
        a = a + JetPolynomial::z().pow(k).scaled(testgen::random_rat(rng));
        b = b + JetPolynomial::z().pow(k).scaled(testgen::random_rat(rng));
      }
      e1.push_back(a);
      e2.push_back(b);
    }
    Rat a = testgen::random_rat(rng);
    Rat t = testgen::random_rat(rng);
    Rat b = a + 1 + t * t;
    CHECK(pairing_residual(J, f, e1, e2, a, b) == 0);
  }
}

TEST_CASE("chain-rule time derivative") {
  auto d1 = make_density_profile(var(1, 0).pow(2));
  CHECK(density_time_derivative(d1, {var(1, 1)}) == var(1, 0).scaled(2) * var(1, 1));

  auto d2 = make_density_profile(var(1, 1).pow(2));
  JetPolynomial r = var(1, 0) * var(1, 0);
  CHECK(density_time_derivative(d2, {r}) == var(1, 1).scaled(2) * total_derivative(r));
}

TEST_CASE("derivative-free densities balance exactly against their ports") {
  struct Case {
    std::string op;
    JetPolynomial density;
  };
  std::vector<Case> cases;
  cases.push_back({"[[0, 1, 0], [-1, 0, d], [0, d, 0]]",
                   (var(1, 0).pow(2) + var(2, 0).pow(2) + var(3, 0).pow(2)).scaled(Rat(1) / 2)});
  cases.push_back({"[[0, d, 0], [d, 0, -d^2], [0, d^2, 0]]",
                   var(1, 0).pow(3).scaled(Rat(4) / 9) + var(2, 0).pow(2).scaled(Rat(1) / 2) -
                       var(3, 0).pow(2).scaled(Rat(1) / 6)});
  cases.push_back({"[[d, -d^2], [d^2, -d^3]]",
                   var(1, 0).pow(3).scaled(Rat(1) / 6) - var(2, 0).pow(2).scaled(Rat(1) / 2)});
  for (const auto& c : cases) {
    MatDiffOp J = op_of(c.op);
    PortFrame f = build_port_frame(J);
    CAPTURE(c.op);
    CHECK(energy_balance_residual(J, make_density_profile(c.density), f).is_zero());
  }
}

TEST_CASE("first-order boundary balance closes with the flux bracket") {
  // scalar third-order flow with a first-derivative density
  auto d = make_density_profile(var(1, 0).pow(3).scaled(Rat(1) / 6) -
                                var(1, 1).pow(2).scaled(Rat(1) / 2));
  MatDiffOp J = op_of("[[d]]");

  // x(z) = z^2 + 1 on [0, 1]
  std::vector<JetPolynomial> state = {JetPolynomial::z().pow(2) + JetPolynomial::constant(1)};
  FirstOrderBalance bal = first_order_boundary_balance(d, J, state, 0, 1);
  CHECK(bal.defect == bal.dH_dt - bal.port_power);
  CHECK(bal.defect == bal.flux_bracket);
  CHECK(bal.defect != bal.effort_bracket);

  // compactly supported-looking polynomial state: z^2 (1-z)^2 kills the
  // zeroth and first traces at both ends, so every bracket vanishes
  JetPolynomial zz = JetPolynomial::z();
  std::vector<JetPolynomial> flat = {zz.pow(2) * (JetPolynomial::constant(1) - zz).pow(2)};
  FirstOrderBalance bal0 = first_order_boundary_balance(d, J, flat, 0, 1);
  CHECK(bal0.flux_bracket == 0);
  CHECK(bal0.defect == 0);
  CHECK(bal0.dH_dt == bal0.port_power);

  // the identity is not tied to one state: sweep a few polynomials
  testgen::Rng rng(605);
  for (int trial = 0; trial < 10; ++trial) {
    JetPolynomial x;
    for (int k = 0; k <= 3; ++k)
      x = x + JetPolynomial::z().pow(k).scaled(testgen::random_rat(rng));
    FirstOrderBalance b = first_order_boundary_balance(d, J, {x}, Rat(-1) / 2, Rat(3) / 4);
    CHECK(b.defect == b.flux_bracket);
  }
}
