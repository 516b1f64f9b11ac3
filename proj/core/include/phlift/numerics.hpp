#pragma once

#include <map>
#include <string>
#include <vector>

#include "phlift/lift.hpp"
#include "phlift/ports.hpp"
#include "phlift/stencil.hpp"
#include "phlift/system.hpp"

namespace phlift {

struct Grid {
  double a = 0, b = 1;
  int N = 0;
  bool periodic = false;
  double h = 0;

  static Grid bounded(double a, double b, int N);
  static Grid make_periodic(double a, double b, int N);
  std::vector<double> points() const;
};

struct BalanceSample {
  double dH_dt = 0;
  double port_power = 0;
  double dissipated = 0;  // interior resistive power, >= 0 when R >= 0
  double defect = 0;      // dH_dt + dissipated - port_power
  double min_phi_F = 0;   // most negative pointwise resistive power density
};

// Stencil family used on periodic grids. `conservative` samples jet
// variables with composed powers of the centered first difference; every
// composed operator is then exactly skew-adjoint, so skew operators conserve
// the discrete Hamiltonian to integrator accuracy and resistive systems
// dissipate it monotonically. `direct` uses one compact centered window per
// derivative order instead; the two families agree to O(h^2), and that gap
// is what lifted-vs-original trajectory comparisons measure (the lifted
// realization telescopes to the composed family exactly, so comparing two
// conservative runs returns roundoff). Bounded grids always use direct
// one-window stencils; the policy has no effect there.
enum class StencilPolicy { conservative, direct };

// Method-of-lines realization of an assembled system. Jet variables are
// sampled per the stencil policy above on periodic grids and with direct
// one-window k-th-derivative stencils on bounded grids (uniformly second
// order up to the boundary); boundary traces use one-sided second-order
// stencils; the Hamiltonian uses trapezoid or rectangle quadrature. State
// vectors are flat, state-major: component i occupies [i*N, (i+1)*N).
class SemiDiscreteSystem {
 public:
  SemiDiscreteSystem(const AssembledSystem& sys, const Grid& grid,
                     StencilPolicy policy = StencilPolicy::conservative);

  const Grid& grid() const { return grid_; }
  const AssembledSystem& system() const { return sys_; }
  int dof() const { return sys_.n() * grid_.N; }

  std::vector<double> rhs(const std::vector<double>& x) const;
  double hamiltonian(const std::vector<double>& x) const;
  BalanceSample balance(const std::vector<double>& x) const;

  // Effort samples (the density gradient composed through the stencils), one
  // vector per effort component; the resistive closure appends phi.
  std::vector<std::vector<double>> effort(const std::vector<double>& x) const;

  // Spectral radius estimate of the linearized rhs at x via power iteration
  // on a centered finite-difference directional derivative.
  double spectral_radius_estimate(const std::vector<double>& x, int iters = 40) const;

 private:
  struct Fields;
  Fields evaluate_fields(const std::vector<double>& x) const;
  const DifferenceOp& op(int k) const;
  std::vector<std::vector<double>> apply_op_samples(
      const MatDiffOp& A, const std::vector<std::vector<double>>& in, bool adjoint) const;

  AssembledSystem sys_;
  Grid grid_;
  std::vector<JetPolynomial> delta_;               // symbolic effort per state
  std::vector<JetPolynomial> density_partials_;    // dH/du for each support var
  std::vector<JetVar> support_;
  std::map<int, DifferenceOp> d_ops_;              // direct stencils by order
  std::vector<double> quad_;
  std::vector<double> z_;
  std::vector<double> R_samples_;
  PortFrame frame_;        // over J, or over the composite when dissipative
  MatDiffOp effort_op_;    // J, or the composite
  int effort_dim_ = 0;     // n, or n + d_g
  int max_jet_order_ = 0;
};

struct IntegrateOptions {
  int record_every = 1;        // balance + snapshot cadence in steps
  long max_steps = 50000000;   // hard cap
  double max_wall_seconds = 600.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<double> H;
  std::vector<double> port_power;
  std::vector<double> dissipated;
  std::vector<double> defect;
  std::vector<double> min_phi_F;
  std::vector<std::vector<double>> snapshots;  // flat states at recorded times

  double cfl_estimate = 0;  // dt * spectral radius at t = 0
  bool cfl_warning = false;
  bool aborted = false;
  std::string abort_reason;
  long steps_taken = 0;
};

// Classical fixed-step RK4.
Trajectory integrate(const SemiDiscreteSystem& sd, const std::vector<double>& x0, double dt,
                     double t_end, const IntegrateOptions& opts = {});

// Discrete prolongation: lifted sample block k is the composed j_k-fold
// first-difference image of original component i_k. The composed form is
// also used for lifted initial data so both trajectories start from the
// same discrete object.
std::vector<double> prolong_state(const std::vector<double>& x_original, int n_states,
                                  const LiftSpec& spec, const Grid& grid);

struct ConsistencyReport {
  std::vector<double> sup_per_entry;  // max over recorded times and grid points
  double overall = 0;
};

// Compares a lifted trajectory against the prolongation of an original one.
// Both must be recorded on the same grid at the same times.
ConsistencyReport consistency_check(const Trajectory& original, const Trajectory& lifted,
                                    int n_states, const LiftSpec& spec, const Grid& grid);

// Least-squares slope of log(err) against log(h); the observed convergence
// order of a refinement study.
double observed_order(const std::vector<double>& hs, const std::vector<double>& errs);

// Smooth test data. Periodic grids get a phase-shifted sine per component;
// bounded grids get a compactly supported bump whose traces vanish to all
// orders at the ends.
std::vector<double> default_initial_state(const AssembledSystem& sys, const Grid& grid);

// Smooth manufactured sample of one scalar profile (used by balance
// refinement studies): s -> sin(2 pi s) + 1/3 cos(4 pi s - 1/2) mapped from
// [a,b] to s in [0,1].
std::vector<double> manufactured_profile(const Grid& grid, int component);

}  // namespace phlift
