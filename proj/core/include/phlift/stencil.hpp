#pragma once

#include <vector>

namespace phlift {

// Banded finite-difference operator: row i applies weights w[i] to samples
// starting at column start[i] (bounded grids) or to columns (start[i] + k)
// mod N (periodic grids).
struct DifferenceOp {
  int N = 0;
  bool periodic = false;
  std::vector<int> start;
  std::vector<std::vector<double>> w;

  std::vector<double> apply(const std::vector<double>& x) const;
};

// Weights for the k-th derivative at 0 from the given sample points
// (Vandermonde solve; points are scaled by their spread for conditioning).
std::vector<double> fd_weights(const std::vector<double>& pts, int k);

// Direct k-th-derivative operator of the requested interior order. On bounded
// grids every row uses one window clamped into the grid (centered where it
// fits), so the pointwise error is uniform in the row index; this is what
// keeps boundary-quadrature defects at the interior order.
DifferenceOp derivative_op_bounded(int N, double h, int k, int order = 2);
DifferenceOp derivative_op_periodic(int N, double h, int k, int order = 2);

// k-fold composition of the first-difference operator. Kept distinct from the
// direct operator: the two differ at O(h^2) and the composed form is the one
// used for prolongation maps, so lifted and original trajectories are
// compared through the same operator family.
DifferenceOp composed_derivative_op(int N, double h, int k, bool periodic, int order = 2);

DifferenceOp compose(const DifferenceOp& A, const DifferenceOp& B);

// One-sided boundary trace of the j-th derivative, order 2 (j+2 points).
double onesided_trace(const std::vector<double>& e, int j, double h, bool at_left);

// Trapezoid (bounded) or rectangle (periodic) weights.
std::vector<double> quadrature_weights(int N, double h, bool periodic);

}  // namespace phlift
