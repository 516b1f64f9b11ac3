#pragma once

#include <vector>

#include "phlift/rational.hpp"

namespace phlift {

// Small dense matrix over Rat. Sizes here are tiny (state dimensions),
// so no attempt at sparsity or blocking.
class RatMat {
 public:
  RatMat() = default;
  RatMat(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols) {}

  static RatMat identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  Rat& at(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  const Rat& at(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

  bool is_zero() const;
  RatMat transposed() const;
  RatMat negated() const;

  RatMat operator+(const RatMat& o) const;
  RatMat operator-(const RatMat& o) const;
  RatMat operator*(const RatMat& o) const;
  RatMat scaled(const Rat& s) const;

  friend bool operator==(const RatMat& x, const RatMat& y) {
    return x.rows_ == y.rows_ && x.cols_ == y.cols_ && x.a_ == y.a_;
  }
  friend bool operator!=(const RatMat& x, const RatMat& y) { return !(x == y); }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Rat> a_;
};

}  // namespace phlift
