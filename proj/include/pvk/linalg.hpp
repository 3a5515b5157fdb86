#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "pvk/errors.hpp"
#include "pvk/scalar.hpp"

namespace pvk {

// Small dense matrix. Row-major. T is a field-like value type.
template <class T>
class Mat {
public:
  Mat() : rows_(0), cols_(0) {}
  Mat(int rows, int cols) : rows_(rows), cols_(cols), a_(std::size_t(rows) * cols) {}

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  T& operator()(int i, int j) { return a_[std::size_t(i) * cols_ + j]; }
  const T& operator()(int i, int j) const { return a_[std::size_t(i) * cols_ + j]; }

  Mat transpose() const {
    Mat t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend Mat operator+(const Mat& a, const Mat& b) {
    Mat c(a.rows_, a.cols_);
    for (std::size_t k = 0; k < a.a_.size(); ++k) c.a_[k] = a.a_[k] + b.a_[k];
    return c;
  }
  friend Mat operator-(const Mat& a, const Mat& b) {
    Mat c(a.rows_, a.cols_);
    for (std::size_t k = 0; k < a.a_.size(); ++k) c.a_[k] = a.a_[k] - b.a_[k];
    return c;
  }
  friend Mat operator*(const Mat& a, const Mat& b) {
    Mat c(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        if (aik == T(0)) continue;
        for (int j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }
  friend Mat operator*(const T& s, const Mat& m) {
    Mat c(m.rows_, m.cols_);
    for (std::size_t k = 0; k < m.a_.size(); ++k) c.a_[k] = s * m.a_[k];
    return c;
  }
  friend bool operator==(const Mat& a, const Mat& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
  }

  bool is_zero() const {
    for (const auto& v : a_)
      if (!(v == T(0))) return false;
    return true;
  }

  T trace() const {
    T t(0);
    for (int i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
  }

  std::vector<T> row(int i) const {
    return std::vector<T>(a_.begin() + std::size_t(i) * cols_,
                          a_.begin() + std::size_t(i + 1) * cols_);
  }

private:
  int rows_, cols_;
  std::vector<T> a_;
};

using ScalarMat = Mat<Scalar>;

// Reduced row echelon form, exact. Deterministic pivot policy: scan columns
// left to right, take the first row with a nonzero entry (no magnitude
// pivoting; arithmetic is exact). Underdetermined solves zero the free
// variables, so identical inputs give byte-identical outputs.
struct Echelon {
  ScalarMat m;
  std::vector<int> pivot_cols;
  int rank = 0;
};

inline Echelon rref(ScalarMat a, int main_cols = -1) {
  const int rows = a.rows(), cols = a.cols();
  if (main_cols < 0) main_cols = cols;
  Echelon e;
  int r = 0;
  for (int c = 0; c < main_cols && r < rows; ++c) {
    int pr = -1;
    for (int i = r; i < rows; ++i)
      if (!a(i, c).is_zero()) {
        pr = i;
        break;
      }
    if (pr < 0) continue;
    if (pr != r)
      for (int j = 0; j < cols; ++j) std::swap(a(r, j), a(pr, j));
    Scalar inv = Scalar(1) / a(r, c);
    for (int j = c; j < cols; ++j) a(r, j) = inv * a(r, j);
    for (int i = 0; i < rows; ++i) {
      if (i == r || a(i, c).is_zero()) continue;
      Scalar f = a(i, c);
      for (int j = c; j < cols; ++j) a(i, j) -= f * a(r, j);
    }
    e.pivot_cols.push_back(c);
    ++r;
  }
  e.rank = r;
  e.m = std::move(a);
  return e;
}

inline int rank(const ScalarMat& a) { return rref(a).rank; }

// Solves A x = b exactly; returns nullopt when inconsistent.
inline std::optional<std::vector<Scalar>> solve_linear(const ScalarMat& a,
                                                       const std::vector<Scalar>& b) {
  ScalarMat aug(a.rows(), a.cols() + 1);
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) aug(i, j) = a(i, j);
    aug(i, a.cols()) = b[std::size_t(i)];
  }
  Echelon e = rref(std::move(aug), a.cols());
  for (int i = e.rank; i < a.rows(); ++i)
    if (!e.m(i, a.cols()).is_zero()) return std::nullopt;
  std::vector<Scalar> x(static_cast<std::size_t>(a.cols()));
  for (int r = 0; r < e.rank; ++r) x[std::size_t(e.pivot_cols[std::size_t(r)])] = e.m(r, a.cols());
  return x;
}

// Deterministic nullspace basis: one vector per free column, free entry = 1.
inline std::vector<std::vector<Scalar>> nullspace(const ScalarMat& a) {
  Echelon e = rref(a);
  std::vector<bool> is_pivot(std::size_t(a.cols()), false);
  for (int c : e.pivot_cols) is_pivot[std::size_t(c)] = true;
  std::vector<std::vector<Scalar>> basis;
  for (int c = 0; c < a.cols(); ++c) {
    if (is_pivot[std::size_t(c)]) continue;
    std::vector<Scalar> v(static_cast<std::size_t>(a.cols()));
    v[std::size_t(c)] = Scalar(1);
    for (int r = 0; r < e.rank; ++r) v[std::size_t(e.pivot_cols[std::size_t(r)])] = -e.m(r, c);
    basis.push_back(std::move(v));
  }
  return basis;
}

inline ScalarMat inverse(const ScalarMat& a) {
  const int n = a.rows();
  ScalarMat aug(n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) aug(i, j) = a(i, j);
    aug(i, n + i) = Scalar(1);
  }
  Echelon e = rref(std::move(aug), n);
  if (e.rank != n) throw NonInvertibleConstantTerm("matrix is singular");
  ScalarMat inv(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv(i, j) = e.m(i, n + j);
  return inv;
}

inline Scalar determinant(ScalarMat a) {
  const int n = a.rows();
  Scalar det(1);
  for (int c = 0; c < n; ++c) {
    int pr = -1;
    for (int i = c; i < n; ++i)
      if (!a(i, c).is_zero()) {
        pr = i;
        break;
      }
    if (pr < 0) return Scalar(0);
    if (pr != c) {
      for (int j = 0; j < n; ++j) std::swap(a(c, j), a(pr, j));
      det = -det;
    }
    det *= a(c, c);
    Scalar inv = Scalar(1) / a(c, c);
    for (int i = c + 1; i < n; ++i) {
      if (a(i, c).is_zero()) continue;
      Scalar f = inv * a(i, c);
      for (int j = c; j < n; ++j) a(i, j) -= f * a(c, j);
    }
  }
  return det;
}

}  // namespace pvk
