#pragma once

#include <map>
#include <string>
#include <vector>

#include "phlift/jetexpr.hpp"
#include "phlift/matrix.hpp"

namespace phlift {

// Constant-coefficient matrix differential operator: sum over k of A_k d^k,
// d the spatial derivative. Canonical: no all-zero A_k stored, so
// coefficient-wise equality is operator equality.
class MatDiffOp {
 public:
  MatDiffOp() = default;
  MatDiffOp(int rows, int cols) : rows_(rows), cols_(cols) {}

  static MatDiffOp zero(int rows, int cols) { return MatDiffOp(rows, cols); }
  static MatDiffOp identity(int n);
  // single-entry convenience: coefficient c at (i,j) on order k
  static MatDiffOp entry(int rows, int cols, int i, int j, int k, const Rat& c);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int order() const { return coeffs_.empty() ? 0 : coeffs_.rbegin()->first; }
  bool is_zero() const { return coeffs_.empty(); }

  const std::map<int, RatMat>& coeffs() const { return coeffs_; }
  RatMat coeff(int k) const;           // zero matrix when absent
  void set_coeff(int k, RatMat A);     // drops all-zero matrices
  void add_to_coeff(int k, int i, int j, const Rat& c);

  MatDiffOp operator+(const MatDiffOp& o) const;
  MatDiffOp operator-(const MatDiffOp& o) const;
  MatDiffOp operator-() const;
  MatDiffOp scaled(const Rat& s) const;

  friend bool operator==(const MatDiffOp& a, const MatDiffOp& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.coeffs_ == b.coeffs_;
  }
  friend bool operator!=(const MatDiffOp& a, const MatDiffOp& b) { return !(a == b); }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::map<int, RatMat> coeffs_;
};

// Symbolic application to a vector of jet polynomials via the total
// derivative.
std::vector<JetPolynomial> apply(const MatDiffOp& A, const std::vector<JetPolynomial>& e);

// Cauchy product of the coefficient sequences.
MatDiffOp compose(const MatDiffOp& A, const MatDiffOp& B);

// (A*)_k = (-1)^k A_k^T.
MatDiffOp formal_adjoint(const MatDiffOp& A);

enum class Symmetry { skew_adjoint, self_adjoint, neither };
Symmetry classify_symmetry(const MatDiffOp& A);

// Matrix-of-entries text, each entry a polynomial in d with rational
// coefficients, e.g. [[0, d], [d, 0]] or [[0,1,0],[-1,0,d],[0,d,0]].
std::string to_string(const MatDiffOp& A);

}  // namespace phlift
