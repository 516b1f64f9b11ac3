#include "phlift/opalg.hpp"

#include <sstream>
#include <stdexcept>

namespace phlift {

MatDiffOp MatDiffOp::identity(int n) {
  MatDiffOp a(n, n);
  a.set_coeff(0, RatMat::identity(n));
  return a;
}

MatDiffOp MatDiffOp::entry(int rows, int cols, int i, int j, int k, const Rat& c) {
  MatDiffOp a(rows, cols);
  a.add_to_coeff(k, i, j, c);
  return a;
}

RatMat MatDiffOp::coeff(int k) const {
  auto it = coeffs_.find(k);
  if (it != coeffs_.end()) return it->second;
  return RatMat(rows_, cols_);
}

void MatDiffOp::set_coeff(int k, RatMat A) {
  if (A.rows() != rows_ || A.cols() != cols_) throw std::invalid_argument("MatDiffOp: coefficient shape mismatch");
  if (A.is_zero())
    coeffs_.erase(k);
  else
    coeffs_[k] = std::move(A);
}

void MatDiffOp::add_to_coeff(int k, int i, int j, const Rat& c) {
  if (c == 0) return;
  auto it = coeffs_.find(k);
  if (it == coeffs_.end()) it = coeffs_.emplace(k, RatMat(rows_, cols_)).first;
  it->second.at(i, j) += c;
  if (it->second.is_zero()) coeffs_.erase(it);
}

MatDiffOp MatDiffOp::operator+(const MatDiffOp& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("MatDiffOp: shape mismatch in +");
  MatDiffOp r = *this;
  for (const auto& [k, A] : o.coeffs_) r.set_coeff(k, r.coeff(k) + A);
  return r;
}

MatDiffOp MatDiffOp::operator-(const MatDiffOp& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("MatDiffOp: shape mismatch in -");
  MatDiffOp r = *this;
  for (const auto& [k, A] : o.coeffs_) r.set_coeff(k, r.coeff(k) - A);
  return r;
}

MatDiffOp MatDiffOp::operator-() const {
  MatDiffOp r(rows_, cols_);
  for (const auto& [k, A] : coeffs_) r.coeffs_.emplace(k, A.negated());
  return r;
}

MatDiffOp MatDiffOp::scaled(const Rat& s) const {
  MatDiffOp r(rows_, cols_);
  if (s == 0) return r;
  for (const auto& [k, A] : coeffs_) r.coeffs_.emplace(k, A.scaled(s));
  return r;
}

std::vector<JetPolynomial> apply(const MatDiffOp& A, const std::vector<JetPolynomial>& e) {
  if (static_cast<int>(e.size()) != A.cols()) throw std::invalid_argument("apply: dimension mismatch");
  std::vector<JetPolynomial> out(A.rows());
  // cache D_z^k e_j, computed incrementally
  std::vector<std::vector<JetPolynomial>> de(e.size());
  for (std::size_t j = 0; j < e.size(); ++j) de[j].push_back(e[j]);
  for (const auto& [k, Ak] : A.coeffs()) {
    for (std::size_t j = 0; j < e.size(); ++j)
      while (static_cast<int>(de[j].size()) <= k) de[j].push_back(total_derivative(de[j].back()));
    for (int i = 0; i < A.rows(); ++i)
      for (int j = 0; j < A.cols(); ++j) {
        const Rat& c = Ak.at(i, j);
        if (c == 0) continue;
        out[i] = out[i] + de[j][k].scaled(c);
      }
  }
  return out;
}

MatDiffOp compose(const MatDiffOp& A, const MatDiffOp& B) {
  if (A.cols() != B.rows()) throw std::invalid_argument("compose: dimension mismatch");
  MatDiffOp C(A.rows(), B.cols());
  for (const auto& [p, Ap] : A.coeffs())
    for (const auto& [q, Bq] : B.coeffs()) C.set_coeff(p + q, C.coeff(p + q) + Ap * Bq);
  return C;
}

MatDiffOp formal_adjoint(const MatDiffOp& A) {
  MatDiffOp S(A.cols(), A.rows());
  for (const auto& [k, Ak] : A.coeffs()) {
    RatMat T = Ak.transposed();
    S.set_coeff(k, k % 2 == 0 ? T : T.negated());
  }
  return S;
}

Symmetry classify_symmetry(const MatDiffOp& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("classify_symmetry: operator not square");
  bool skew = true, self = true;
  for (const auto& [k, Ak] : A.coeffs()) {
    RatMat T = Ak.transposed();
    bool even = (k % 2 == 0);
    // skew-adjoint: A_k = (-1)^{k+1} A_k^T ; self-adjoint: A_k = (-1)^k A_k^T
    if (Ak != (even ? T.negated() : T)) skew = false;
    if (Ak != (even ? T : T.negated())) self = false;
  }
  if (skew) return Symmetry::skew_adjoint;
  if (self) return Symmetry::self_adjoint;
  return Symmetry::neither;
}

namespace {

std::string entry_to_string(const MatDiffOp& A, int i, int j) {
  // polynomial in d, highest order first
  std::ostringstream os;
  bool first = true;
  for (auto it = A.coeffs().rbegin(); it != A.coeffs().rend(); ++it) {
    const auto& [k, Ak] = *it;
    const Rat& c = Ak.at(i, j);
    if (c == 0) continue;
    Rat abs = c < 0 ? Rat(-c) : c;
    if (first) {
      if (c < 0) os << "-";
      first = false;
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    if (k == 0) {
      os << rat_to_string(abs);
    } else {
      if (abs != 1) os << rat_to_string(abs) << "*";
      os << "d";
      if (k != 1) os << "^" << k;
    }
  }
  if (first) return "0";
  return os.str();
}

}  // namespace

std::string to_string(const MatDiffOp& A) {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < A.rows(); ++i) {
    if (i) os << ", ";
    os << "[";
    for (int j = 0; j < A.cols(); ++j) {
      if (j) os << ", ";
      os << entry_to_string(A, i, j);
    }
    os << "]";
  }
  os << "]";
  return os.str();
}

}  // namespace phlift
