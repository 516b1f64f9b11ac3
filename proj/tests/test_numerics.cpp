#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "phlift/lift.hpp"
#include "phlift/numerics.hpp"
#include "phlift/system.hpp"

using namespace phlift;

namespace {

JetPolynomial var(int i, int j) { return JetPolynomial::variable({i, j}); }

AssembledSystem rod_system() {
  AssembledSystem s;
  s.name = "rod";
  s.state_names = {"w", "p"};
  s.J = MatDiffOp(2, 2);
  s.J.add_to_coeff(0, 0, 1, 1);
  s.J.add_to_coeff(0, 1, 0, -1);
  s.density = make_density_profile(
      (var(2, 0).pow(2) + var(1, 0).pow(2) + var(1, 1).pow(2)).scaled(Rat(1) / 2));
  return s;
}

AssembledSystem phase_field_system() {
  AssembledSystem s;
  s.name = "phase";
  s.state_names = {"phi"};
  s.a = 0;
  s.b = 10;
  s.J = MatDiffOp(1, 1);
  JetPolynomial phi = var(1, 0);
  JetPolynomial well = phi * phi - JetPolynomial::constant(1);
  s.density = make_density_profile(well * well.scaled(Rat(1) / 4) +
                                   var(1, 1).pow(2).scaled(Rat(1) / 2));
  Dissipation dis;
  dis.G = MatDiffOp(1, 1);
  dis.G.add_to_coeff(0, 0, 0, 1);
  dis.R = JetPolynomial::constant(1);
  dis.d_g = 1;
  s.dissipation = dis;
  return s;
}

}  // namespace

TEST_CASE("grid construction") {
  Grid b = Grid::bounded(0.0, 2.0, 5);
  CHECK(b.h == doctest::Approx(0.5));
  auto pts = b.points();
  REQUIRE(pts.size() == 5);
  CHECK(pts.front() == doctest::Approx(0.0));
  CHECK(pts.back() == doctest::Approx(2.0));

  Grid p = Grid::make_periodic(0.0, 2.0, 4);
  CHECK(p.h == doctest::Approx(0.5));
  auto ppts = p.points();
  REQUIRE(ppts.size() == 4);
  CHECK(ppts.back() == doctest::Approx(1.5));
}

TEST_CASE("semidiscrete right-hand side matches a hand-coded discretization") {
  AssembledSystem rod = rod_system();
  const int N = 201;
  Grid g = Grid::make_periodic(0.0, 1.0, N);
  SemiDiscreteSystem sd(rod, g);
  CHECK(sd.dof() == 2 * N);

  std::vector<double> x(2 * N);
  for (int i = 0; i < N; ++i) {
    const double s = i * g.h;
    x[i] = std::sin(2 * std::numbers::pi * s) + 0.4 * std::cos(4 * std::numbers::pi * s);
    x[N + i] = std::cos(2 * std::numbers::pi * s);
  }
  auto rhs = sd.rhs(x);
  REQUIRE(static_cast<int>(rhs.size()) == 2 * N);

  // centered first difference applied twice, periodic wrap
  auto D = [&](const std::vector<double>& v) {
    std::vector<double> out(N);
    for (int i = 0; i < N; ++i)
      out[i] = (v[(i + 1) % N] - v[(i + N - 1) % N]) / (2 * g.h);
    return out;
  };
  std::vector<double> w(x.begin(), x.begin() + N);
  auto wzz = D(D(w));
  for (int i = 0; i < N; ++i) {
    CHECK(rhs[i] == doctest::Approx(x[N + i]).epsilon(1e-12));
    CHECK(rhs[N + i] == doctest::Approx(-w[i] + wzz[i]).epsilon(1e-8));
  }
}

TEST_CASE("hamiltonian quadrature") {
  AssembledSystem rod = rod_system();
  Grid g = Grid::bounded(0.0, 1.0, 33);
  SemiDiscreteSystem sd(rod, g);
  std::vector<double> x(2 * 33, 0.0);
  for (int i = 0; i < 33; ++i) x[i] = 0.5;  // constant displacement, zero momentum
  CHECK(sd.hamiltonian(x) == doctest::Approx(0.5 * 0.25).epsilon(1e-12));
}

TEST_CASE("zero state stays zero") {
  AssembledSystem rod = rod_system();
  Grid g = Grid::make_periodic(0.0, 1.0, 64);
  SemiDiscreteSystem sd(rod, g);
  std::vector<double> x0(sd.dof(), 0.0);
  auto traj = integrate(sd, x0, 1e-3, 0.05);
  CHECK_FALSE(traj.aborted);
  for (const auto& snap : traj.snapshots)
    for (double v : snap) CHECK(v == 0.0);
}

TEST_CASE("skew flow conserves the discrete energy on a periodic grid") {
  AssembledSystem rod = rod_system();
  Grid g = Grid::make_periodic(0.0, 1.0, 101);
  SemiDiscreteSystem sd(rod, g);
  auto x0 = default_initial_state(rod, g);
  auto traj = integrate(sd, x0, 1e-4, 1.0, {.record_every = 100});
  REQUIRE_FALSE(traj.aborted);
  REQUIRE(traj.H.size() >= 2);
  const double H0 = traj.H.front();
  double drift = 0;
  for (double H : traj.H) drift = std::max(drift, std::abs(H - H0));
  CHECK(drift / std::abs(H0) <= 1e-8);
  for (double d : traj.defect) CHECK(std::abs(d) <= 1e-9);
}

TEST_CASE("resistive flow dissipates monotonically with nonnegative interior power") {
  AssembledSystem ac = phase_field_system();
  // periodic so the discrete gradient flow inherits the exact Lyapunov
  // property; on a bounded grid the truncation terms need not have a sign
  Grid g = Grid::make_periodic(0.0, 10.0, 81);
  SemiDiscreteSystem sd(ac, g);
  auto x0 = default_initial_state(ac, g);
  auto traj = integrate(sd, x0, 1e-3, 0.3, {.record_every = 1});
  REQUIRE_FALSE(traj.aborted);
  REQUIRE(traj.H.size() > 100);
  for (std::size_t i = 1; i < traj.H.size(); ++i)
    CHECK(traj.H[i] <= traj.H[i - 1] + 1e-10);
  for (double m : traj.min_phi_F) CHECK(m >= -1e-15);
  for (double d : traj.dissipated) CHECK(d >= 0.0);
}

TEST_CASE("integration reports non-finite states instead of crashing") {
  AssembledSystem s;
  s.name = "blowup";
  s.state_names = {"q", "v"};
  s.J = MatDiffOp(2, 2);
  s.J.add_to_coeff(0, 0, 1, 1);
  s.J.add_to_coeff(0, 1, 0, -1);
  s.density = make_density_profile(var(2, 0).pow(2).scaled(Rat(1) / 2) -
                                   var(1, 0).pow(4).scaled(Rat(1) / 4));
  Grid g = Grid::make_periodic(0.0, 1.0, 32);
  SemiDiscreteSystem sd(s, g);
  std::vector<double> x0(sd.dof(), 0.0);
  for (int i = 0; i < 32; ++i) x0[i] = 3.0;
  auto traj = integrate(sd, x0, 1e-2, 50.0);
  CHECK(traj.aborted);
  CHECK(traj.abort_reason.find("non-finite") != std::string::npos);
}

TEST_CASE("step and wall-clock caps abort cleanly") {
  AssembledSystem rod = rod_system();
  Grid g = Grid::make_periodic(0.0, 1.0, 32);
  SemiDiscreteSystem sd(rod, g);
  auto x0 = default_initial_state(rod, g);
  IntegrateOptions opts;
  opts.max_steps = 10;
  auto traj = integrate(sd, x0, 1e-4, 1.0, opts);
  CHECK(traj.aborted);
  CHECK(traj.steps_taken == 10);
  CHECK(traj.abort_reason.find("step cap") != std::string::npos);
}

TEST_CASE("cfl estimate grows with resolution and flags oversized steps") {
  AssembledSystem rod = rod_system();
  auto rho_at = [&](int N) {
    Grid g = Grid::make_periodic(0.0, 1.0, N);
    SemiDiscreteSystem sd(rod, g);
    return sd.spectral_radius_estimate(default_initial_state(rod, g));
  };
  const double r1 = rho_at(101), r2 = rho_at(201);
  CHECK(r1 > 0);
  CHECK(std::isfinite(r1));
  CHECK(r2 / r1 == doctest::Approx(2.0).epsilon(0.3));

  Grid g = Grid::make_periodic(0.0, 1.0, 101);
  SemiDiscreteSystem sd(rod, g);
  auto x0 = default_initial_state(rod, g);
  auto short_traj = integrate(sd, x0, 0.5, 0.5, {.record_every = 1});
  CHECK(short_traj.cfl_warning);
  auto fine_traj = integrate(sd, x0, 1e-4, 1e-3, {.record_every = 1});
  CHECK_FALSE(fine_traj.cfl_warning);
}

TEST_CASE("discrete prolongation") {
  const int N = 64;
  Grid g = Grid::make_periodic(0.0, 1.0, N);
  std::vector<double> x(2 * N);
  for (int i = 0; i < N; ++i) {
    x[i] = std::sin(2 * std::numbers::pi * i * g.h);
    x[N + i] = std::cos(2 * std::numbers::pi * i * g.h);
  }

  LiftSpec identity;
  identity.entries = {{1, 0}, {2, 0}};
  CHECK(prolong_state(x, 2, identity, g) == x);

  LiftSpec spec;
  spec.entries = {{1, 0}, {2, 0}, {1, 1}};
  auto lifted = prolong_state(x, 2, spec, g);
  REQUIRE(static_cast<int>(lifted.size()) == 3 * N);
  for (int i = 0; i < N; ++i) {
    const double centered = (x[(i + 1) % N] - x[(i + N - 1) % N]) / (2 * g.h);
    CHECK(lifted[2 * N + i] == doctest::Approx(centered).epsilon(1e-12));
  }
}

TEST_CASE("identity lift reproduces the original trajectory exactly") {
  AssembledSystem flat;
  flat.name = "flat";
  flat.state_names = {"x1", "x2"};
  flat.J = MatDiffOp(2, 2);
  flat.J.add_to_coeff(0, 0, 1, 1);
  flat.J.add_to_coeff(0, 1, 0, -1);
  flat.density = make_density_profile((var(1, 0).pow(2) + var(2, 0).pow(2)).scaled(Rat(1) / 2));

  auto spec = infer_lift_spec(flat.density, 2);
  auto ls = lift_hamiltonian(flat.J, flat.density, spec);
  AssembledSystem lifted = flat;
  lifted.J = ls.Jbar;
  lifted.density = ls.density_bar;

  Grid g = Grid::make_periodic(0.0, 1.0, 48);
  SemiDiscreteSystem sd_orig(flat, g), sd_lift(lifted, g);
  auto x0 = default_initial_state(flat, g);
  auto t_orig = integrate(sd_orig, x0, 1e-3, 0.2, {.record_every = 10});
  auto t_lift = integrate(sd_lift, prolong_state(x0, 2, spec, g), 1e-3, 0.2, {.record_every = 10});
  auto rep = consistency_check(t_orig, t_lift, 2, spec, g);
  REQUIRE(rep.sup_per_entry.size() == 2);
  CHECK(rep.overall <= 1e-13);
}

TEST_CASE("direct periodic stencils differ from the composed family at second order") {
  AssembledSystem rod = rod_system();
  auto gap_at = [&](int N) {
    Grid g = Grid::make_periodic(0.0, 1.0, N);
    SemiDiscreteSystem cons(rod, g), dir(rod, g, StencilPolicy::direct);
    auto x0 = default_initial_state(rod, g);
    auto fc = cons.rhs(x0);
    auto fd = dir.rhs(x0);
    double m = 0;
    for (std::size_t i = 0; i < fc.size(); ++i) m = std::max(m, std::abs(fc[i] - fd[i]));
    return m;
  };
  const double g1 = gap_at(64), g2 = gap_at(128);
  CHECK(g1 > 1e-6);
  CHECK(g1 / g2 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("refinement slope fitting") {
  std::vector<double> hs = {0.1, 0.05, 0.025};
  std::vector<double> errs = {1e-2, 2.5e-3, 6.25e-4};
  CHECK(observed_order(hs, errs) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("default data respects the boundary") {
  AssembledSystem rod = rod_system();
  Grid g = Grid::bounded(0.0, 1.0, 65);
  auto x0 = default_initial_state(rod, g);
  REQUIRE(static_cast<int>(x0.size()) == 2 * 65);
  CHECK(x0[0] == 0.0);
  CHECK(x0[64] == 0.0);
  CHECK(x0[65] == 0.0);
  double mx = 0;
  for (double v : x0) mx = std::max(mx, std::abs(v));
  CHECK(mx > 0.1);

  Grid p = Grid::make_periodic(0.0, 1.0, 64);
  auto xp = default_initial_state(rod, p);
  double mp = 0;
  for (double v : xp) mp = std::max(mp, std::abs(v));
  CHECK(mp > 0.1);

  auto prof = manufactured_profile(p, 0);
  auto prof2 = manufactured_profile(p, 1);
  REQUIRE(prof.size() == 64);
  CHECK(prof != prof2);
}

TEST_CASE("too-small grids are rejected") {
  AssembledSystem rod = rod_system();
  CHECK_THROWS_AS(SemiDiscreteSystem(rod, Grid::make_periodic(0.0, 1.0, 8)),
                  std::invalid_argument);
}
