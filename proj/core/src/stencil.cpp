#include "phlift/stencil.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace phlift {

std::vector<double> DifferenceOp::apply(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != N) throw std::invalid_argument("DifferenceOp: length mismatch");
  std::vector<double> y(N, 0.0);
  if (periodic) {
    for (int i = 0; i < N; ++i) {
      double s = 0;
      const auto& wi = w[i];
      int base = start[i];
      for (std::size_t k = 0; k < wi.size(); ++k) {
        int idx = base + static_cast<int>(k);
        idx %= N;
        if (idx < 0) idx += N;
        s += wi[k] * x[idx];
      }
      y[i] = s;
    }
  } else {
    for (int i = 0; i < N; ++i) {
      double s = 0;
      const auto& wi = w[i];
      int base = start[i];
      for (std::size_t k = 0; k < wi.size(); ++k) s += wi[k] * x[base + static_cast<int>(k)];
      y[i] = s;
    }
  }
  return y;
}

std::vector<double> fd_weights(const std::vector<double>& pts, int k) {
  const int n = static_cast<int>(pts.size());
  if (k >= n) throw std::invalid_argument("fd_weights: not enough points for the derivative order");
  // Solve V^T w = k! e_k with V the Vandermonde of the points. Points enter
  // prescaled by the caller (integer offsets), so conditioning is benign for
  // the small windows used here.
  std::vector<std::vector<double>> A(n, std::vector<double>(n + 1, 0.0));
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) A[r][c] = std::pow(pts[c], r);
    A[r][n] = 0.0;
  }
  double kfact = 1.0;
  for (int i = 2; i <= k; ++i) kfact *= i;
  A[k][n] = kfact;
  // Gaussian elimination with partial pivoting.
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
    std::swap(A[col], A[piv]);
    if (A[col][col] == 0.0) throw std::runtime_error("fd_weights: singular point set");
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      double f = A[r][col] / A[col][col];
      if (f == 0.0) continue;
      for (int c = col; c <= n; ++c) A[r][c] -= f * A[col][c];
    }
  }
  std::vector<double> wts(n);
  for (int i = 0; i < n; ++i) wts[i] = A[i][n] / A[i][i];
  return wts;
}

namespace {

int window_size(int k, int order) {
  int npts = k + order;
  if ((npts - 1) % 2 == 1) ++npts;  // odd window, so interior rows are centered
  return npts;
}

}  // namespace

DifferenceOp derivative_op_bounded(int N, double h, int k, int order) {
  if (k == 0) throw std::invalid_argument("derivative_op_bounded: k must be >= 1");
  const int npts = window_size(k, order);
  if (npts > N) throw std::invalid_argument("derivative_op_bounded: stencil wider than grid");
  DifferenceOp op;
  op.N = N;
  op.periodic = false;
  op.start.resize(N);
  op.w.resize(N);
  const int half = npts / 2;
  const double hk = std::pow(h, k);
  std::vector<std::vector<double>> cache;  // keyed by start offset relative to i
  for (int i = 0; i < N; ++i) {
    int lo = std::min(std::max(0, i - half), N - npts);
    op.start[i] = lo;
    int rel = lo - i;  // in [-(npts-1), 0]
    std::size_t key = static_cast<std::size_t>(-rel);
    if (cache.size() <= key) cache.resize(key + 1);
    if (cache[key].empty()) {
      std::vector<double> pts(npts);
      for (int j = 0; j < npts; ++j) pts[j] = rel + j;
      auto wts = fd_weights(pts, k);
      for (double& x : wts) x /= hk;
      cache[key] = std::move(wts);
    }
    op.w[i] = cache[key];
  }
  return op;
}

DifferenceOp derivative_op_periodic(int N, double h, int k, int order) {
  if (k == 0) throw std::invalid_argument("derivative_op_periodic: k must be >= 1");
  const int npts = window_size(k, order);
  if (npts > N) throw std::invalid_argument("derivative_op_periodic: stencil wider than grid");
  DifferenceOp op;
  op.N = N;
  op.periodic = true;
  op.start.resize(N);
  op.w.resize(N);
  const int half = npts / 2;
  std::vector<double> pts(npts);
  for (int j = 0; j < npts; ++j) pts[j] = j - half;
  auto wts = fd_weights(pts, k);
  const double hk = std::pow(h, k);
  for (double& x : wts) x /= hk;
  for (int i = 0; i < N; ++i) {
    op.start[i] = i - half;
    op.w[i] = wts;
  }
  return op;
}

DifferenceOp composed_derivative_op(int N, double h, int k, bool periodic, int order) {
  DifferenceOp D = periodic ? derivative_op_periodic(N, h, 1, order) : derivative_op_bounded(N, h, 1, order);
  DifferenceOp out = D;
  for (int i = 1; i < k; ++i) out = compose(D, out);
  return out;
}

DifferenceOp compose(const DifferenceOp& A, const DifferenceOp& B) {
  if (A.N != B.N || A.periodic != B.periodic) throw std::invalid_argument("compose: incompatible operators");
  const int N = A.N;
  DifferenceOp C;
  C.N = N;
  C.periodic = A.periodic;
  C.start.resize(N);
  C.w.resize(N);
  for (int i = 0; i < N; ++i) {
    // row i of A*B: sum over A's band entries j of A(i,j) * row j of B
    int lo = 0, hi = 0;
    bool init = false;
    const int abase = A.start[i];
    for (std::size_t k = 0; k < A.w[i].size(); ++k) {
      int j = abase + static_cast<int>(k);
      int jj = j;
      if (A.periodic) {
        jj %= N;
        if (jj < 0) jj += N;
      }
      // Shift B's band for row jj into the unwrapped frame of j.
      int bl = B.start[jj] + (A.periodic ? j - jj : 0);
      int bh = bl + static_cast<int>(B.w[jj].size()) - 1;
      if (!init) {
        lo = bl;
        hi = bh;
        init = true;
      } else {
        lo = std::min(lo, bl);
        hi = std::max(hi, bh);
      }
    }
    if (!A.periodic) {
      lo = std::max(lo, 0);
      hi = std::min(hi, N - 1);
    }
    C.start[i] = lo;
    C.w[i].assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
    for (std::size_t k = 0; k < A.w[i].size(); ++k) {
      int j = abase + static_cast<int>(k);
      int jj = j;
      if (A.periodic) {
        jj %= N;
        if (jj < 0) jj += N;
      }
      double aij = A.w[i][k];
      if (aij == 0.0) continue;
      int bbase = A.periodic ? B.start[jj] + (j - jj) : B.start[jj];
      for (std::size_t t = 0; t < B.w[jj].size(); ++t) {
        int col = bbase + static_cast<int>(t);
        C.w[i][static_cast<std::size_t>(col - lo)] += aij * B.w[jj][t];
      }
    }
  }
  return C;
}

double onesided_trace(const std::vector<double>& e, int j, double h, bool at_left) {
  const int N = static_cast<int>(e.size());
  if (j == 0) return at_left ? e.front() : e.back();
  const int npts = j + 2;
  if (npts > N) throw std::invalid_argument("onesided_trace: grid too coarse");
  std::vector<double> pts(npts);
  for (int i = 0; i < npts; ++i) pts[i] = i;  // boundary point first, walking inward
  auto wts = fd_weights(pts, j);
  const double hj = std::pow(h, j);
  double s = 0;
  if (at_left) {
    for (int i = 0; i < npts; ++i) s += wts[i] * e[i];
  } else {
    for (int i = 0; i < npts; ++i) s += wts[i] * e[N - 1 - i];
    if (j % 2 == 1) s = -s;  // inward direction flips odd derivatives on the right
  }
  return s / hj;
}

std::vector<double> quadrature_weights(int N, double h, bool periodic) {
  std::vector<double> w(N, h);
  if (!periodic) {
    w.front() = h / 2;
    w.back() = h / 2;
  }
  return w;
}

}  // namespace phlift
