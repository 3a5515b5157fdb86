#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pvk/linalg.hpp"
#include "pvk/poly.hpp"

namespace pvk {

// Square matrix with Poly entries. Carries an optional truncation cap:
// arithmetic combines caps by min (absent = exact) and truncates results, so
// objects built under a cap stay honest about what they represent.
class PolyMatrix {
public:
  PolyMatrix() : m_(0), n_(0) {}
  PolyMatrix(int size, int nvars)
      : m_(size), n_(nvars), a_(std::size_t(size) * size, Poly(nvars)) {}

  static PolyMatrix identity(int size, int nvars) {
    PolyMatrix p(size, nvars);
    for (int i = 0; i < size; ++i) p(i, i) = Poly::constant(nvars, Scalar(1));
    return p;
  }
  static PolyMatrix from_scalar(const ScalarMat& s, int nvars) {
    PolyMatrix p(s.rows(), nvars);
    for (int i = 0; i < s.rows(); ++i)
      for (int j = 0; j < s.rows(); ++j) p(i, j) = Poly::constant(nvars, s(i, j));
    return p;
  }

  int size() const { return m_; }
  int nvars() const { return n_; }
  const std::optional<int>& cap() const { return cap_; }
  PolyMatrix& set_cap(std::optional<int> cap) {
    cap_ = cap;
    if (cap_) truncate_entries(*cap_);
    return *this;
  }

  Poly& operator()(int i, int j) { return a_[std::size_t(i) * m_ + j]; }
  const Poly& operator()(int i, int j) const { return a_[std::size_t(i) * m_ + j]; }

  bool is_zero() const {
    for (const auto& p : a_)
      if (!p.is_zero()) return false;
    return true;
  }
  bool is_constant() const {
    for (const auto& p : a_)
      if (!p.is_constant()) return false;
    return true;
  }
  int degree() const {
    int d = -1;
    for (const auto& p : a_) d = std::max(d, p.degree());
    return d;
  }

  friend PolyMatrix operator+(const PolyMatrix& x, const PolyMatrix& y) {
    PolyMatrix z(x.m_, x.n_);
    for (std::size_t k = 0; k < x.a_.size(); ++k) z.a_[k] = x.a_[k] + y.a_[k];
    z.cap_ = min_cap(x.cap_, y.cap_);
    if (z.cap_) z.truncate_entries(*z.cap_);
    return z;
  }
  friend PolyMatrix operator-(const PolyMatrix& x, const PolyMatrix& y) {
    PolyMatrix z(x.m_, x.n_);
    for (std::size_t k = 0; k < x.a_.size(); ++k) z.a_[k] = x.a_[k] - y.a_[k];
    z.cap_ = min_cap(x.cap_, y.cap_);
    if (z.cap_) z.truncate_entries(*z.cap_);
    return z;
  }
  friend PolyMatrix operator-(const PolyMatrix& x) {
    PolyMatrix z(x.m_, x.n_);
    for (std::size_t k = 0; k < x.a_.size(); ++k) z.a_[k] = -x.a_[k];
    z.cap_ = x.cap_;
    return z;
  }
  friend PolyMatrix operator*(const PolyMatrix& x, const PolyMatrix& y) {
    PolyMatrix z(x.m_, x.n_);
    for (int i = 0; i < x.m_; ++i)
      for (int k = 0; k < x.m_; ++k) {
        if (x(i, k).is_zero()) continue;
        for (int j = 0; j < x.m_; ++j) {
          if (y(k, j).is_zero()) continue;
          z(i, j) += x(i, k) * y(k, j);
        }
      }
    z.cap_ = min_cap(x.cap_, y.cap_);
    if (z.cap_) z.truncate_entries(*z.cap_);
    return z;
  }
  friend PolyMatrix operator*(const Poly& f, const PolyMatrix& x) {
    PolyMatrix z(x.m_, x.n_);
    for (std::size_t k = 0; k < x.a_.size(); ++k) z.a_[k] = f * x.a_[k];
    z.cap_ = x.cap_;
    if (z.cap_) z.truncate_entries(*z.cap_);
    return z;
  }
  friend PolyMatrix operator*(const Scalar& s, const PolyMatrix& x) {
    PolyMatrix z(x.m_, x.n_);
    for (std::size_t k = 0; k < x.a_.size(); ++k) z.a_[k] = s * x.a_[k];
    z.cap_ = x.cap_;
    return z;
  }
  PolyMatrix& operator+=(const PolyMatrix& y) { return *this = *this + y; }
  PolyMatrix& operator-=(const PolyMatrix& y) { return *this = *this - y; }

  friend PolyMatrix commutator(const PolyMatrix& x, const PolyMatrix& y) {
    return x * y - y * x;
  }

  friend bool operator==(const PolyMatrix& x, const PolyMatrix& y) {
    return x.m_ == y.m_ && x.n_ == y.n_ && x.a_ == y.a_;
  }

  Poly trace() const {
    Poly t(n_);
    for (int i = 0; i < m_; ++i) t += (*this)(i, i);
    return t;
  }
  PolyMatrix transpose() const {
    PolyMatrix z(m_, n_);
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j) z(j, i) = (*this)(i, j);
    z.cap_ = cap_;
    return z;
  }
  PolyMatrix conj() const {
    PolyMatrix z(m_, n_);
    for (std::size_t k = 0; k < a_.size(); ++k) z.a_[k] = a_[k].conj();
    z.cap_ = cap_;
    return z;
  }
  // Conjugate transpose; the adjoint used by skew-Hermitian checks.
  PolyMatrix adjoint() const { return conj().transpose(); }

  PolyMatrix derivative(int var) const {
    PolyMatrix z(m_, n_);
    for (std::size_t k = 0; k < a_.size(); ++k) z.a_[k] = a_[k].derivative(var);
    z.cap_ = cap_;
    return z;
  }

  ScalarMat eval(const std::vector<Scalar>& x) const {
    ScalarMat s(m_, m_);
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j) s(i, j) = (*this)(i, j).eval(x);
    return s;
  }
  ScalarMat constant_part() const {
    ScalarMat s(m_, m_);
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j) s(i, j) = (*this)(i, j).constant_term();
    return s;
  }

  PolyMatrix truncate(int max_degree) const {
    PolyMatrix z(m_, n_);
    for (std::size_t k = 0; k < a_.size(); ++k) z.a_[k] = a_[k].truncate(max_degree);
    z.cap_ = cap_ ? std::min(*cap_, max_degree) : max_degree;
    return z;
  }
  PolyMatrix homogeneous_part(int r) const {
    PolyMatrix z(m_, n_);
    for (std::size_t k = 0; k < a_.size(); ++k) z.a_[k] = a_[k].homogeneous_part(r);
    z.cap_ = cap_;
    return z;
  }
  PolyMatrix extend_vars(int new_nvars) const {
    PolyMatrix z(m_, new_nvars);
    for (std::size_t k = 0; k < a_.size(); ++k) z.a_[k] = a_[k].extend_vars(new_nvars);
    z.cap_ = cap_;
    return z;
  }
  PolyMatrix shrink_vars(int new_nvars) const {
    PolyMatrix z(m_, new_nvars);
    for (std::size_t k = 0; k < a_.size(); ++k) z.a_[k] = a_[k].shrink_vars(new_nvars);
    z.cap_ = cap_;
    return z;
  }

  // Inverse as a truncated Neumann series around the constant term, which must
  // be invertible. Works exactly when the higher-order part is nilpotent;
  // otherwise a cap is required (from the matrix or the argument).
  PolyMatrix inverse_mod_cap(std::optional<int> cap = std::nullopt) const {
    std::optional<int> c = min_cap(cap_, cap);
    ScalarMat c0 = constant_part();
    ScalarMat c0inv = pvk::inverse(c0);  // throws NonInvertibleConstantTerm
    PolyMatrix n = PolyMatrix::from_scalar(c0inv, n_) * (*this - PolyMatrix::from_scalar(c0, n_));
    if (c) n = n.truncate(*c);
    PolyMatrix acc = PolyMatrix::identity(m_, n_);
    PolyMatrix pow = PolyMatrix::identity(m_, n_);
    int guard = c ? *c : 64;
    for (int k = 1; k <= guard; ++k) {
      pow = pow * n;
      if (c) pow = pow.truncate(*c);
      if (pow.is_zero()) break;
      if (k == guard && !c)
        throw Error(ErrorClass::Validation,
                    "polynomial matrix inverse requires a degree cap (series does not terminate)");
      acc = (k % 2 == 1) ? acc - pow : acc + pow;
    }
    PolyMatrix inv = acc * PolyMatrix::from_scalar(c0inv, n_);
    if (c) inv = inv.truncate(*c);
    inv.cap_ = c;
    return inv;
  }

  std::string str() const {
    std::string s = "[";
    for (int i = 0; i < m_; ++i) {
      s += i ? "; " : "";
      for (int j = 0; j < m_; ++j) s += (j ? ", " : "") + (*this)(i, j).str();
    }
    return s + "]";
  }

private:
  static std::optional<int> min_cap(const std::optional<int>& a, const std::optional<int>& b) {
    if (a && b) return std::min(*a, *b);
    return a ? a : b;
  }
  void truncate_entries(int cap) {
    for (auto& p : a_) p = p.truncate(cap);
  }

  int m_, n_;
  std::vector<Poly> a_;
  std::optional<int> cap_;
};

}  // namespace pvk
