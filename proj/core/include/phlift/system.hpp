#pragma once

#include <optional>
#include <string>
#include <vector>

#include "phlift/jetexpr.hpp"
#include "phlift/opalg.hpp"

namespace phlift {

// Resistive part of a dissipative system: input map G (n x d_g) and a scalar
// resistance field R(z) >= 0 applied to the internal port. The closure is
// phi = R F with F = -G* delta, so the dynamics read
// xdot = (J - G R G*) delta.
struct Dissipation {
  MatDiffOp G;
  JetPolynomial R;  // polynomial in z only
  int d_g = 1;
};

// A fully resolved model: parameters substituted, expressions parsed.
struct AssembledSystem {
  std::string name;
  std::vector<std::string> state_names;
  Rat a = 0, b = 1;
  MatDiffOp J;
  DensityProfile density;
  std::optional<Dissipation> dissipation;

  int n() const { return static_cast<int>(state_names.size()); }
};

}  // namespace phlift
