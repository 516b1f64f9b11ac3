#include "phlift/matrix.hpp"

#include <stdexcept>

namespace phlift {

RatMat RatMat::identity(int n) {
  RatMat m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

bool RatMat::is_zero() const {
  for (const Rat& x : a_)
    if (x != 0) return false;
  return true;
}

RatMat RatMat::transposed() const {
  RatMat t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
  return t;
}

RatMat RatMat::negated() const {
  RatMat t(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t.at(i, j) = -at(i, j);
  return t;
}

RatMat RatMat::operator+(const RatMat& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("RatMat: shape mismatch in +");
  RatMat t(rows_, cols_);
  for (std::size_t i = 0; i < a_.size(); ++i) t.a_[i] = a_[i] + o.a_[i];
  return t;
}

RatMat RatMat::operator-(const RatMat& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("RatMat: shape mismatch in -");
  RatMat t(rows_, cols_);
  for (std::size_t i = 0; i < a_.size(); ++i) t.a_[i] = a_[i] - o.a_[i];
  return t;
}

RatMat RatMat::operator*(const RatMat& o) const {
  if (cols_ != o.rows_) throw std::invalid_argument("RatMat: shape mismatch in *");
  RatMat t(rows_, o.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      const Rat& x = at(i, k);
      if (x == 0) continue;
      for (int j = 0; j < o.cols_; ++j) t.at(i, j) += x * o.at(k, j);
    }
  return t;
}

RatMat RatMat::scaled(const Rat& s) const {
  RatMat t(rows_, cols_);
  for (std::size_t i = 0; i < a_.size(); ++i) t.a_[i] = a_[i] * s;
  return t;
}

}  // namespace phlift
