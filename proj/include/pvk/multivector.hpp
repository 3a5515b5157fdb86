#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pvk/poly.hpp"
#include "pvk/poly_matrix.hpp"

namespace pvk {

// Index sets {i1 < ... < ik} of wedge factors are stored as bitmasks.
using IndexMask = std::uint64_t;

inline IndexMask mask_of(const std::vector<int>& idx) {
  IndexMask m = 0;
  for (int i : idx) m |= IndexMask(1) << i;
  return m;
}

inline std::vector<int> mask_indices(IndexMask m) {
  std::vector<int> out;
  while (m) {
    out.push_back(std::countr_zero(m));
    m &= m - 1;
  }
  return out;
}

// Sign of sorting the concatenation theta_A ^ theta_B into increasing order;
// 0 when the sets intersect.
inline int wedge_sign(IndexMask a, IndexMask b) {
  if (a & b) return 0;
  int inv = 0;
  IndexMask bb = b;
  while (bb) {
    int j = std::countr_zero(bb);
    bb &= bb - 1;
    inv += std::popcount(a >> (j + 1));
  }
  return (inv % 2 == 0) ? 1 : -1;
}

// All k-subsets of {0..n-1} as ascending bitmasks.
inline std::vector<IndexMask> subsets_of_size(int n, int k) {
  std::vector<IndexMask> out;
  if (k < 0 || k > n) return out;
  std::vector<int> idx(static_cast<std::size_t>(k), 0);
  for (int i = 0; i < k; ++i) idx[std::size_t(i)] = i;
  while (true) {
    out.push_back(mask_of(idx));
    int p = k - 1;
    while (p >= 0 && idx[std::size_t(p)] == n - k + p) --p;
    if (p < 0) break;
    ++idx[std::size_t(p)];
    for (int q = p + 1; q < k; ++q) idx[std::size_t(q)] = idx[std::size_t(q - 1)] + 1;
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace detail {
inline bool value_is_zero(const Poly& p) { return p.is_zero(); }
inline bool value_is_zero(const PolyMatrix& p) { return p.is_zero(); }
}  // namespace detail

// Alternating multivector field on coordinate space with polynomial
// coefficients; V is Poly (scalar-valued) or PolyMatrix (gl(m)-valued).
// Antisymmetry is structural: only increasing index sets are stored, and
// only nonzero components.
template <class V>
class MultiVector {
public:
  MultiVector() : n_(0), grade_(0) {}
  MultiVector(int nvars, int grade, V proto)
      : n_(nvars), grade_(grade), proto_(std::move(proto)) {}

  static MultiVector zero(int nvars, int grade, V proto) {
    return MultiVector(nvars, grade, std::move(proto));
  }

  int nvars() const { return n_; }
  int grade() const { return grade_; }
  const V& prototype() const { return proto_; }
  bool is_zero() const { return comp_.empty(); }
  const std::map<IndexMask, V>& components() const { return comp_; }

  const V& component(IndexMask m) const {
    auto it = comp_.find(m);
    return it == comp_.end() ? proto_ : it->second;
  }
  const V& component(const std::vector<int>& idx) const { return component(mask_of(idx)); }

  void set_component(IndexMask m, V v) {
    if (detail::value_is_zero(v))
      comp_.erase(m);
    else
      comp_.insert_or_assign(m, std::move(v));
  }
  void add_to(IndexMask m, const V& v) {
    auto it = comp_.find(m);
    if (it == comp_.end()) {
      if (!detail::value_is_zero(v)) comp_.emplace(m, v);
    } else {
      it->second += v;
      if (detail::value_is_zero(it->second)) comp_.erase(it);
    }
  }

  // Value at a tuple of coordinate one-forms (dx_{j1},...,dx_{jk}); signed
  // lookup, zero on repeated indices.
  V eval_coords(const std::vector<int>& idx) const {
    IndexMask m = 0;
    int sign = 1;
    for (std::size_t p = 0; p < idx.size(); ++p) {
      IndexMask bit = IndexMask(1) << idx[p];
      if (m & bit) return proto_;
      int s = wedge_sign(m, bit);
      sign *= s;
      m |= bit;
    }
    const V& c = component(m);
    if (sign == 1 || detail::value_is_zero(c)) return c;
    return -c;
  }

  friend MultiVector operator+(const MultiVector& a, const MultiVector& b) {
    MultiVector r = a;
    for (const auto& [m, v] : b.comp_) r.add_to(m, v);
    return r;
  }
  friend MultiVector operator-(const MultiVector& a, const MultiVector& b) {
    MultiVector r = a;
    for (const auto& [m, v] : b.comp_) r.add_to(m, -v);
    return r;
  }
  friend MultiVector operator-(const MultiVector& a) {
    MultiVector r(a.n_, a.grade_, a.proto_);
    for (const auto& [m, v] : a.comp_) r.comp_.emplace(m, -v);
    return r;
  }
  friend MultiVector operator*(const Scalar& s, const MultiVector& a) {
    MultiVector r(a.n_, a.grade_, a.proto_);
    if (s.is_zero()) return r;
    for (const auto& [m, v] : a.comp_) r.comp_.emplace(m, s * v);
    return r;
  }
  friend MultiVector operator*(const Poly& f, const MultiVector& a) {
    MultiVector r(a.n_, a.grade_, a.proto_);
    for (const auto& [m, v] : a.comp_) r.add_to(m, f * v);
    return r;
  }
  friend bool operator==(const MultiVector& a, const MultiVector& b) {
    return a.n_ == b.n_ && a.grade_ == b.grade_ && a.comp_ == b.comp_;
  }

  MultiVector truncate(int max_degree) const {
    MultiVector r(n_, grade_, proto_);
    for (const auto& [m, v] : comp_) r.set_component(m, v.truncate(max_degree));
    return r;
  }
  MultiVector homogeneous_part(int deg) const {
    MultiVector r(n_, grade_, proto_);
    for (const auto& [m, v] : comp_) r.set_component(m, v.homogeneous_part(deg));
    return r;
  }
  int max_coeff_degree() const {
    int d = -1;
    for (const auto& [m, v] : comp_) d = std::max(d, v.degree());
    return d;
  }

  std::string str() const {
    if (comp_.empty()) return "0";
    std::string s;
    for (const auto& [m, v] : comp_) {
      if (!s.empty()) s += " + ";
      s += "(" + v.str() + ")";
      for (int i : mask_indices(m)) s += (std::string(" d") + std::to_string(i + 1));
    }
    return s;
  }

private:
  int n_, grade_;
  V proto_;  // zero value of the right shape (nvars / matrix size)
  std::map<IndexMask, V> comp_;
};

using ScalarMultiVector = MultiVector<Poly>;
using MatrixMultiVector = MultiVector<PolyMatrix>;

inline ScalarMultiVector scalar_mv(int nvars, int grade) {
  return ScalarMultiVector(nvars, grade, Poly(nvars));
}
inline MatrixMultiVector matrix_mv(int nvars, int grade, int size) {
  return MatrixMultiVector(nvars, grade, PolyMatrix(size, nvars));
}

// Schouten-Nijenhuis bracket on scalar multivectors, normalized by
//   [X, f] = X(f),  [X, Y] = Lie bracket,  [a, b] = -(-1)^{(p-1)(q-1)} [b, a],
//   [a, b ^ c] = [a, b] ^ c + (-1)^{(p-1) q} b ^ [a, c].
// In a coordinate frame, for terms f theta_I (|I| = p) and g theta_J (|J| = q):
//   [f theta_I, g theta_J] =
//       sum_m (-1)^{p-m} f (d_{i_m} g) theta_{I \ i_m} ^ theta_J
//     - (-1)^{(p-1)(q-1)} sum_m (-1)^{q+m} g (d_{j_m} f) theta_{J \ j_m} ^ theta_I.
inline ScalarMultiVector schouten_bracket(const ScalarMultiVector& a, const ScalarMultiVector& b) {
  if (a.nvars() != b.nvars())
    throw Error(ErrorClass::Validation, "schouten_bracket: variable-count mismatch");
  const int n = a.nvars(), p = a.grade(), q = b.grade();
  int grade = p + q - 1;
  if (grade < 0) return scalar_mv(n, 0);
  ScalarMultiVector out = scalar_mv(n, grade);
  if (grade > n) return out;
  int outer = ((p - 1) * (q - 1)) % 2 == 0 ? 1 : -1;
  for (const auto& [mi, f] : a.components()) {
    for (const auto& [mj, g] : b.components()) {
      auto iidx = mask_indices(mi);
      for (std::size_t m = 0; m < iidx.size(); ++m) {
        int i = iidx[m];
        Poly dg = g.derivative(i);
        if (dg.is_zero()) continue;
        IndexMask rest = mi & ~(IndexMask(1) << i);
        int ws = wedge_sign(rest, mj);
        if (ws == 0) continue;
        int sgn = ((p - int(m) - 1) % 2 == 0 ? 1 : -1) * ws;
        Poly term = f * dg;
        out.add_to(rest | mj, sgn == 1 ? term : -term);
      }
      auto jidx = mask_indices(mj);
      for (std::size_t m = 0; m < jidx.size(); ++m) {
        int j = jidx[m];
        Poly df = f.derivative(j);
        if (df.is_zero()) continue;
        IndexMask rest = mj & ~(IndexMask(1) << j);
        int ws = wedge_sign(rest, mi);
        if (ws == 0) continue;
        int sgn = -outer * ((q + int(m) + 1) % 2 == 0 ? 1 : -1) * ws;
        Poly term = g * df;
        out.add_to(rest | mi, sgn == 1 ? term : -term);
      }
    }
  }
  return out;
}

// Lie derivative along a scalar vector field X, acting on either value kind.
// For scalar values this coincides with schouten_bracket(X, T).
template <class V>
MultiVector<V> lie_derivative(const ScalarMultiVector& x, const MultiVector<V>& t) {
  if (x.grade() != 1) throw Error(ErrorClass::Validation, "lie_derivative: X must have grade 1");
  if (x.nvars() != t.nvars())
    throw Error(ErrorClass::Validation, "lie_derivative: variable-count mismatch");
  const int q = t.grade();
  MultiVector<V> out(t.nvars(), q, t.prototype());
  for (const auto& [mx, xf] : x.components()) {
    int i = mask_indices(mx)[0];
    for (const auto& [mj, v] : t.components()) {
      out.add_to(mj, xf * v.derivative(i));
      auto jidx = mask_indices(mj);
      for (std::size_t m = 0; m < jidx.size(); ++m) {
        int j = jidx[m];
        Poly dxf = xf.derivative(j);
        if (dxf.is_zero()) continue;
        IndexMask rest = mj & ~(IndexMask(1) << j);
        int ws = wedge_sign(rest, mx);
        if (ws == 0) continue;
        int sgn = -((q + int(m) + 1) % 2 == 0 ? 1 : -1) * ws;
        V term = dxf * v;
        out.add_to(rest | mx, sgn == 1 ? term : -term);
      }
    }
  }
  return out;
}

inline Poly lie_derivative_poly(const ScalarMultiVector& x, const Poly& f) {
  Poly out(f.nvars());
  for (const auto& [mx, xf] : x.components()) out += xf * f.derivative(mask_indices(mx)[0]);
  return out;
}

inline PolyMatrix lie_derivative_matrix(const ScalarMultiVector& x, const PolyMatrix& m) {
  PolyMatrix out(m.size(), m.nvars());
  for (const auto& [mx, xf] : x.components()) out += xf * m.derivative(mask_indices(mx)[0]);
  return out;
}

}  // namespace pvk
