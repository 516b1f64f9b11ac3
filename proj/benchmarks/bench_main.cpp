#include <benchmark/benchmark.h>

#include <vector>

#include "phlift/jetexpr.hpp"
#include "phlift/lift.hpp"
#include "phlift/modelio.hpp"
#include "phlift/numerics.hpp"
#include "phlift/opalg.hpp"

namespace {

using namespace phlift;

JetPolynomial var(int i, int j) { return JetPolynomial::variable({i, j}); }

JetPolynomial dense_poly(int phase) {
  JetPolynomial p = JetPolynomial::constant(Rat(phase + 1, 3));
  for (int i = 1; i <= 3; ++i)
    for (int j = 0; j <= 2; ++j)
      p = p + var(i, j).pow(1 + (i + j + phase) % 3).scaled(Rat(2 * i - j, 5)) +
          var(i, j) * JetPolynomial::z().scaled(Rat(phase - j, 7));
  return p;
}

// Three-state system with jets up to second order, the shape the lift deals
// with in practice.
struct LiftFixture {
  MatDiffOp J{3, 3};
  LiftSpec spec;
  DensityProfile density;

  LiftFixture() {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        if (i < j) {
          J.add_to_coeff(0, i, j, Rat(i + j, 2));
          J.add_to_coeff(0, j, i, Rat(-(i + j), 2));
        }
        J.add_to_coeff(1, i, j, Rat(1));
      }
    J.add_to_coeff(2, 0, 1, Rat(1, 3));
    J.add_to_coeff(2, 1, 0, Rat(-1, 3));
    spec.entries = {{1, 0}, {2, 0}, {3, 0}, {1, 1}, {2, 1}, {1, 2}};
    JetPolynomial d;
    for (const auto& e : spec.entries) {
      JetPolynomial v = var(e.state, e.order);
      d = d + v * v + v.scaled(Rat(e.order + 1, 2));
    }
    density = make_density_profile(d);
  }
};

void BM_polynomial_product(benchmark::State& state) {
  JetPolynomial a = dense_poly(0), b = dense_poly(1);
  for (auto _ : state) benchmark::DoNotOptimize(a * b);
}
BENCHMARK(BM_polynomial_product);

void BM_total_derivative(benchmark::State& state) {
  JetPolynomial p = dense_poly(0) * dense_poly(1);
  for (auto _ : state) benchmark::DoNotOptimize(total_derivative(p));
}
BENCHMARK(BM_total_derivative);

void BM_euler_derivative(benchmark::State& state) {
  DensityProfile d = make_density_profile(dense_poly(0) * dense_poly(1));
  for (auto _ : state) benchmark::DoNotOptimize(euler_derivative(d, 1));
}
BENCHMARK(BM_euler_derivative);

void BM_lift_hamiltonian(benchmark::State& state) {
  LiftFixture fx;
  for (auto _ : state) benchmark::DoNotOptimize(lift_hamiltonian(fx.J, fx.density, fx.spec));
}
BENCHMARK(BM_lift_hamiltonian);

void BM_closed_form_coefficients(benchmark::State& state) {
  LiftFixture fx;
  for (auto _ : state) benchmark::DoNotOptimize(coefficients_closed_form(fx.J, fx.spec));
}
BENCHMARK(BM_closed_form_coefficients);

void BM_parse_model(benchmark::State& state) {
  std::string text = bundled_model_text("elastic_rod");
  for (auto _ : state) benchmark::DoNotOptimize(parse_model(text));
}
BENCHMARK(BM_parse_model);

void BM_semidiscrete_rhs_n401(benchmark::State& state) {
  AssembledSystem sys = lifted_model_doc(parse_model(bundled_model_text("kdv"))).assemble();
  Grid g = Grid::bounded(0, 1, 401);
  SemiDiscreteSystem sd(sys, g);
  std::vector<double> x;
  for (int c = 0; c < sys.n(); ++c) {
    std::vector<double> comp = manufactured_profile(g, c);
    x.insert(x.end(), comp.begin(), comp.end());
  }
  for (auto _ : state) benchmark::DoNotOptimize(sd.rhs(x));
}
BENCHMARK(BM_semidiscrete_rhs_n401);

}  // namespace

BENCHMARK_MAIN();
