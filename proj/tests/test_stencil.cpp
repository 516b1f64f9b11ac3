#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "phlift/stencil.hpp"

using namespace phlift;

namespace {

std::vector<double> sampled(int N, double h, double a, double (*f)(double)) {
  std::vector<double> x(N);
  for (int i = 0; i < N; ++i) x[i] = f(a + i * h);
  return x;
}

double max_abs_diff(const std::vector<double>& x, const std::vector<double>& y) {
  double m = 0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

}  // namespace

TEST_CASE("finite-difference weights reproduce classical stencils") {
  const double h = 0.1;
  auto w1 = fd_weights({-h, 0.0, h}, 1);
  REQUIRE(w1.size() == 3);
  CHECK(w1[0] == doctest::Approx(-1 / (2 * h)).epsilon(1e-12));
  CHECK(w1[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(w1[2] == doctest::Approx(1 / (2 * h)).epsilon(1e-12));

  auto w2 = fd_weights({-h, 0.0, h}, 2);
  CHECK(w2[0] == doctest::Approx(1 / (h * h)).epsilon(1e-12));
  CHECK(w2[1] == doctest::Approx(-2 / (h * h)).epsilon(1e-12));
  CHECK(w2[2] == doctest::Approx(1 / (h * h)).epsilon(1e-12));
}

TEST_CASE("bounded derivative stencils are exact on low-degree polynomials") {
  const int N = 41;
  const double h = 1.0 / (N - 1);

  auto D1 = derivative_op_bounded(N, h, 1);
  auto x2 = sampled(N, h, 0.0, +[](double s) { return s * s; });
  auto d1 = D1.apply(x2);
  for (int i = 0; i < N; ++i) CHECK(d1[i] == doctest::Approx(2 * (i * h)).epsilon(1e-10));

  auto D2 = derivative_op_bounded(N, h, 2);
  auto x3 = sampled(N, h, 0.0, +[](double s) { return s * s * s; });
  auto d2 = D2.apply(x3);
  for (int i = 0; i < N; ++i) CHECK(d2[i] == doctest::Approx(6 * (i * h)).epsilon(1e-8));
}

TEST_CASE("periodic first difference converges at second order") {
  double errs[2];
  int idx = 0;
  for (int N : {64, 128}) {
    const double h = 1.0 / N;
    auto D = derivative_op_periodic(N, h, 1);
    std::vector<double> x(N), want(N);
    for (int i = 0; i < N; ++i) {
      x[i] = std::sin(2 * std::numbers::pi * i * h);
      want[i] = 2 * std::numbers::pi * std::cos(2 * std::numbers::pi * i * h);
    }
    errs[idx++] = max_abs_diff(D.apply(x), want);
  }
  CHECK(errs[0] / errs[1] == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("composed operator equals repeated first differences") {
  for (bool periodic : {false, true}) {
    const int N = 50;
    const double h = 1.0 / (periodic ? N : (N - 1));
    auto D1 = periodic ? derivative_op_periodic(N, h, 1) : derivative_op_bounded(N, h, 1);
    auto C2 = composed_derivative_op(N, h, 2, periodic);
    std::mt19937 rng(301);
    std::uniform_real_distribution<double> U(-1, 1);
    std::vector<double> x(N);
    for (auto& v : x) v = U(rng);
    auto once = D1.apply(D1.apply(x));
    auto composed = C2.apply(x);
    CHECK(max_abs_diff(once, composed) <= 1e-9);

    auto fused = compose(D1, D1).apply(x);
    CHECK(max_abs_diff(once, fused) <= 1e-9);
  }
}

TEST_CASE("composed and direct second derivatives differ at second order") {
  double diffs[2];
  int idx = 0;
  for (int N : {65, 129}) {
    const double h = 1.0 / (N - 1);
    auto direct = derivative_op_bounded(N, h, 2);
    auto comp = composed_derivative_op(N, h, 2, false);
    std::vector<double> x(N);
    for (int i = 0; i < N; ++i) x[i] = std::sin(3.0 * i * h) + 0.5 * std::cos(5.0 * i * h);
    // compare on the interior; the composed form loses accuracy near the ends
    auto a = direct.apply(x);
    auto b = comp.apply(x);
    double m = 0;
    for (int i = N / 4; i < 3 * N / 4; ++i) m = std::max(m, std::abs(a[i] - b[i]));
    diffs[idx++] = m;
  }
  CHECK(diffs[0] > 0);
  CHECK(diffs[0] / diffs[1] == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("periodic centered difference is skew-symmetric") {
  const int N = 32;
  const double h = 1.0 / N;
  auto D = derivative_op_periodic(N, h, 1);
  std::mt19937 rng(302);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> x(N), y(N);
    for (auto& v : x) v = U(rng);
    for (auto& v : y) v = U(rng);
    auto Dx = D.apply(x), Dy = D.apply(y);
    double s = 0;
    for (int i = 0; i < N; ++i) s += Dx[i] * y[i] + x[i] * Dy[i];
    CHECK(std::abs(s) <= 1e-12);
  }
}

TEST_CASE("one-sided boundary traces are exact on quadratics") {
  const int N = 21;
  const double h = 1.0 / (N - 1);
  auto x2 = sampled(N, h, 0.0, +[](double s) { return s * s; });
  CHECK(onesided_trace(x2, 0, h, true) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(onesided_trace(x2, 0, h, false) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(onesided_trace(x2, 1, h, true) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(onesided_trace(x2, 1, h, false) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("quadrature weights integrate exactly what they should") {
  const int N = 33;
  {
    const double h = 1.0 / (N - 1);
    auto w = quadrature_weights(N, h, false);
    double total = 0, lin = 0;
    for (int i = 0; i < N; ++i) {
      total += w[i];
      lin += w[i] * (i * h);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(lin == doctest::Approx(0.5).epsilon(1e-13));
  }
  {
    const double h = 1.0 / N;
    auto w = quadrature_weights(N, h, true);
    double total = 0;
    for (int i = 0; i < N; ++i) total += w[i];
    CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
  }
}
