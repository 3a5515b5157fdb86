#pragma once

#include <map>
#include <string>
#include <vector>

#include "pvk/lie.hpp"
#include "pvk/multivector.hpp"

namespace pvk {

// One-form alpha = sum alpha_i dx_i with polynomial coefficients.
class OneForm {
public:
  OneForm() = default;
  explicit OneForm(int nvars) : a_(std::size_t(nvars), Poly(nvars)) {}
  explicit OneForm(std::vector<Poly> comps) : a_(std::move(comps)) {}

  int nvars() const { return int(a_.size()); }
  Poly& operator[](int i) { return a_[std::size_t(i)]; }
  const Poly& operator[](int i) const { return a_[std::size_t(i)]; }

  static OneForm coordinate(int nvars, int i) {
    OneForm f(nvars);
    f[i] = Poly::constant(nvars, Scalar(1));
    return f;
  }

  bool is_zero() const {
    for (const auto& p : a_)
      if (!p.is_zero()) return false;
    return true;
  }

  friend OneForm operator+(const OneForm& x, const OneForm& y) {
    OneForm z(x.nvars());
    for (int i = 0; i < x.nvars(); ++i) z[i] = x[i] + y[i];
    return z;
  }
  friend OneForm operator-(const OneForm& x, const OneForm& y) {
    OneForm z(x.nvars());
    for (int i = 0; i < x.nvars(); ++i) z[i] = x[i] - y[i];
    return z;
  }
  friend OneForm operator*(const Poly& f, const OneForm& x) {
    OneForm z(x.nvars());
    for (int i = 0; i < x.nvars(); ++i) z[i] = f * x[i];
    return z;
  }
  friend bool operator==(const OneForm& x, const OneForm& y) { return x.a_ == y.a_; }

  std::vector<Scalar> eval(const std::vector<Scalar>& p) const {
    std::vector<Scalar> v;
    v.reserve(a_.size());
    for (const auto& c : a_) v.push_back(c.eval(p));
    return v;
  }

  std::string str() const {
    std::string s;
    for (int i = 0; i < nvars(); ++i) {
      if (a_[std::size_t(i)].is_zero()) continue;
      if (!s.empty()) s += " + ";
      s += "(" + a_[std::size_t(i)].str() + ")*dx" + std::to_string(i + 1);
    }
    return s.empty() ? "0" : s;
  }

private:
  std::vector<Poly> a_;
};

// Exterior derivative of a function.
inline OneForm exterior_d(const Poly& f) {
  OneForm df(f.nvars());
  for (int i = 0; i < f.nvars(); ++i) df[i] = f.derivative(i);
  return df;
}

// Cartan formula on one-forms: (L_X b)_k = X(b_k) + sum_j b_j d_k X^j.
inline OneForm lie_derivative(const ScalarMultiVector& x, const OneForm& b) {
  if (x.grade() != 1) throw Error(ErrorClass::Validation, "lie_derivative: X must have grade 1");
  const int n = b.nvars();
  OneForm out(n);
  for (int k = 0; k < n; ++k) {
    out[k] = lie_derivative_poly(x, b[k]);
    for (int j = 0; j < n; ++j) {
      if (b[j].is_zero()) continue;
      Poly xj = x.component(IndexMask(1) << j);
      if (!xj.is_zero()) out[k] += b[j] * xj.derivative(k);
    }
  }
  return out;
}

namespace detail {
inline Poly field_apply(const std::vector<Poly>& v, const Poly& f) {
  Poly out(f.nvars());
  for (int i = 0; i < int(v.size()); ++i)
    if (!v[std::size_t(i)].is_zero()) out += v[std::size_t(i)] * f.derivative(i);
  return out;
}
inline PolyMatrix field_apply(const std::vector<Poly>& v, const PolyMatrix& m) {
  PolyMatrix out(m.size(), m.nvars());
  for (int i = 0; i < int(v.size()); ++i)
    if (!v[std::size_t(i)].is_zero()) out += v[std::size_t(i)] * m.derivative(i);
  return out;
}
}  // namespace detail

// Polynomial Poisson structure. Conventions pinned by tests:
//   {f,g} = pi(df,dg),  X_f = {f,.},  pi#(df) = X_f,
//   [alpha,beta] = L_{pi#alpha}beta - L_{pi#beta}alpha - d pi(alpha,beta),
// so that [df,dg] = d{f,g} holds exactly.
class PoissonStructure {
public:
  explicit PoissonStructure(ScalarMultiVector bivector, bool validate = true)
      : pi_(std::move(bivector)) {
    if (pi_.grade() != 2) throw Error(ErrorClass::Validation, "bivector must have grade 2");
    if (validate) {
      ScalarMultiVector j = schouten_bracket(pi_, pi_);
      if (!j.is_zero())
        throw JacobiViolation(-1, -1, -1,
                              "[pi,pi] != 0: the bivector is not Poisson; first nonzero "
                              "component " +
                                  j.str());
    }
    init_cache();
  }

  static PoissonStructure from_lie_algebra(const LieAlgebra& g) {
    const int n = g.dim();
    ScalarMultiVector pi = scalar_mv(n, 2);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        Poly p(n);
        for (int k = 0; k < n; ++k) {
          const Scalar& c = g.c(i, j, k);
          if (!c.is_zero()) p += Poly::variable(n, k, c);
        }
        pi.set_component(mask_of({i, j}), p);
      }
    return PoissonStructure(std::move(pi), false);  // Jacobi holds by construction
  }

  static PoissonStructure zero(int nvars) {
    return PoissonStructure(scalar_mv(nvars, 2), false);
  }

  int nvars() const { return pi_.nvars(); }
  const ScalarMultiVector& bivector() const { return pi_; }

  // pi(dx_i, dx_j) as a polynomial, antisymmetric in (i, j).
  Poly pi_component(int i, int j) const {
    if (i == j) return Poly(nvars());
    Poly p = pi_.component(mask_of({std::min(i, j), std::max(i, j)}));
    return i < j ? p : -p;
  }

  bool is_linear() const { return linear_; }
  bool is_constant() const { return constant_; }

  Poly pairing_forms(const OneForm& a, const OneForm& b) const {
    Poly out(nvars());
    for (int i = 0; i < nvars(); ++i)
      for (int j = i + 1; j < nvars(); ++j) {
        Poly pij = pi_.component(mask_of({i, j}));
        if (pij.is_zero()) continue;
        out += pij * (a[i] * b[j] - a[j] * b[i]);
      }
    return out;
  }

  Poly poisson_bracket(const Poly& f, const Poly& g) const {
    return pairing_forms(exterior_d(f), exterior_d(g));
  }

  // Anchor pi#: components (pi# alpha)^j = sum_i alpha_i pi(dx_i, dx_j).
  std::vector<Poly> sharp_components(const OneForm& a) const {
    std::vector<Poly> v(static_cast<std::size_t>(nvars()), Poly(nvars()));
    for (int j = 0; j < nvars(); ++j)
      for (int i = 0; i < nvars(); ++i) {
        if (a[i].is_zero()) continue;
        Poly pij = pi_component(i, j);
        if (!pij.is_zero()) v[std::size_t(j)] += a[i] * pij;
      }
    return v;
  }
  ScalarMultiVector sharp(const OneForm& a) const {
    ScalarMultiVector x = scalar_mv(nvars(), 1);
    auto v = sharp_components(a);
    for (int j = 0; j < nvars(); ++j) x.set_component(IndexMask(1) << j, v[std::size_t(j)]);
    return x;
  }
  // Cached pi# dx_i.
  const std::vector<Poly>& sharp_dx(int i) const { return sharp_dx_[std::size_t(i)]; }
  ScalarMultiVector hamiltonian_field(const Poly& f) const { return sharp(exterior_d(f)); }

  OneForm lie_derivative_form(const std::vector<Poly>& field, const OneForm& b) const {
    OneForm out(nvars());
    for (int k = 0; k < nvars(); ++k) {
      out[k] = detail::field_apply(field, b[k]);
      for (int j = 0; j < nvars(); ++j)
        if (!b[j].is_zero()) out[k] += b[j] * field[std::size_t(j)].derivative(k);
    }
    return out;
  }

  OneForm one_form_bracket(const OneForm& a, const OneForm& b) const {
    OneForm lab = lie_derivative_form(sharp_components(a), b);
    OneForm lba = lie_derivative_form(sharp_components(b), a);
    OneForm dpair = exterior_d(pairing_forms(a, b));
    return lab - lba - dpair;
  }

  // Cached [dx_i, dx_j], computed through the general one-form bracket.
  const OneForm& coordinate_bracket(int i, int j) const {
    return dx_bracket_[std::size_t(i) * nvars() + j];
  }

  // <pi, d alpha>, normalized by <dx ^ dy, dx ^ dy> = 1.
  Poly pairing_with_d(const OneForm& a) const {
    Poly out(nvars());
    for (int i = 0; i < nvars(); ++i)
      for (int j = i + 1; j < nvars(); ++j) {
        Poly pij = pi_.component(mask_of({i, j}));
        if (pij.is_zero()) continue;
        out += pij * (a[j].derivative(i) - a[i].derivative(j));
      }
    return out;
  }

  // Lichnerowicz differential, Schouten route (scalar values only):
  // d_pi = -[pi, .] under our Schouten normalization. The global sign is
  // certified against the coordinate formula by the bootstrap test.
  ScalarMultiVector d_pi(const ScalarMultiVector& t) const {
    return -schouten_bracket(pi_, t);
  }

  // Lichnerowicz differential via the displayed coordinate formula
  //   (d_pi b)(a_1,...,a_k) = sum_{i<j} (-1)^{i+j-1} b([a_i,a_j], ...)
  //                         + sum_l (-1)^l L_{v_l} b(...^a_l...),
  // valid for scalar- and matrix-valued multivectors alike.
  template <class V>
  MultiVector<V> d_pi_formula(const MultiVector<V>& b) const {
    const int n = nvars();
    const int k = b.grade() + 1;
    MultiVector<V> out(n, k, b.prototype());
    if (k > n) return out;
    for (IndexMask s : subsets_of_size(n, k)) {
      std::vector<int> idx = mask_indices(s);
      V acc = b.prototype();
      for (std::size_t p = 0; p < idx.size(); ++p)
        for (std::size_t q = p + 1; q < idx.size(); ++q) {
          // positions are 1-based in the displayed formula
          int sgn = (p + q + 1) % 2 == 0 ? 1 : -1;
          const OneForm& br = coordinate_bracket(idx[p], idx[q]);
          std::vector<int> rest;
          for (std::size_t r = 0; r < idx.size(); ++r)
            if (r != p && r != q) rest.push_back(idx[r]);
          for (int c = 0; c < n; ++c) {
            if (br[c].is_zero()) continue;
            std::vector<int> args;
            args.push_back(c);
            args.insert(args.end(), rest.begin(), rest.end());
            V val = b.eval_coords(args);
            if (detail::value_is_zero(val)) continue;
            V term = br[c] * val;
            acc += sgn == 1 ? term : -term;
          }
        }
      for (std::size_t p = 0; p < idx.size(); ++p) {
        int sgn = (p + 1) % 2 == 0 ? 1 : -1;
        std::vector<int> rest;
        for (std::size_t r = 0; r < idx.size(); ++r)
          if (r != p) rest.push_back(idx[r]);
        V val = b.eval_coords(rest);
        if (detail::value_is_zero(val)) continue;
        V term = detail::field_apply(sharp_dx(idx[p]), val);
        acc += sgn == 1 ? term : -term;
      }
      out.set_component(s, std::move(acc));
    }
    return out;
  }
  MatrixMultiVector d_pi(const MatrixMultiVector& t) const { return d_pi_formula(t); }

  bool is_poisson_field(const ScalarMultiVector& x) const {
    return schouten_bracket(pi_, x).is_zero();
  }

  // Base structure plus the standard constant symplectic structure on 2m
  // extra fiber coordinates.
  PoissonStructure product(int fiber_half_dim) const {
    const int n = nvars(), nn = n + 2 * fiber_half_dim;
    ScalarMultiVector pi = scalar_mv(nn, 2);
    for (const auto& [m, p] : pi_.components()) pi.set_component(m, p.extend_vars(nn));
    for (int l = 0; l < fiber_half_dim; ++l)
      pi.set_component(mask_of({n + 2 * l, n + 2 * l + 1}), Poly::constant(nn, Scalar(1)));
    return PoissonStructure(std::move(pi), false);  // Jacobi: no cross terms
  }

  // Structure constants read back from a linear structure.
  LieAlgebra linearization() const {
    if (!is_linear()) throw NonLinearStructure("Poisson structure is not linear");
    const int n = nvars();
    std::map<std::pair<int, int>, std::vector<std::pair<int, Scalar>>> br;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        std::vector<std::pair<int, Scalar>> terms;
        Poly p = pi_.component(mask_of({i, j}));
        for (int k = 0; k < n; ++k) {
          Monomial m{std::vector<int>(std::size_t(n), 0)};
          m.e[std::size_t(k)] = 1;
          Scalar c = p.coeff(m);
          if (!c.is_zero()) terms.push_back({k, c});
        }
        if (!terms.empty()) br[{i, j}] = std::move(terms);
      }
    return LieAlgebra::from_structure_constants(n, br);
  }

  // Dimensions of H^k of the d_pi complex on polynomial multivectors of
  // coefficient degree <= cap. Requires a linear structure (the complex is
  // then degree-filtered, so the truncation is consistent).
  std::vector<int> cohomology_dims(int cap, int k_min, int k_max) const {
    if (!is_linear())
      throw NonLinearStructure("poisson_cohomology_dims requires a linear Poisson structure");
    std::vector<int> dims;
    for (int k = k_min; k <= k_max; ++k) {
      if (k < 0 || k > nvars()) {
        dims.push_back(0);
        continue;
      }
      int dim_ck = complex_dim(cap, k);
      int rank_k = d_pi_rank(cap, k);
      int rank_prev = k > 0 ? d_pi_rank(cap, k - 1) : 0;
      dims.push_back(dim_ck - rank_k - rank_prev);
    }
    return dims;
  }

  int complex_dim(int cap, int k) const {
    if (k < 0 || k > nvars()) return 0;
    return int(subsets_of_size(nvars(), k).size() * monomials_up_to_degree(nvars(), cap).size());
  }

  // Rank of d_pi : (grade k, deg <= cap) -> (grade k+1, deg <= cap).
  int d_pi_rank(int cap, int k) const {
    const int n = nvars();
    if (k >= n) return 0;
    auto dom_masks = subsets_of_size(n, k);
    auto cod_masks = subsets_of_size(n, k + 1);
    auto monos = monomials_up_to_degree(n, cap);
    std::map<Monomial, int, GrlexLess> mono_idx;
    for (int t = 0; t < int(monos.size()); ++t) mono_idx[monos[std::size_t(t)]] = t;
    std::map<IndexMask, int> cod_idx;
    for (int t = 0; t < int(cod_masks.size()); ++t) cod_idx[cod_masks[std::size_t(t)]] = t;
    ScalarMat d(int(cod_masks.size() * monos.size()), int(dom_masks.size() * monos.size()));
    int col = 0;
    for (IndexMask dm : dom_masks)
      for (const Monomial& mono : monos) {
        ScalarMultiVector basis = scalar_mv(n, k);
        basis.set_component(dm, Poly::monomial(n, mono, Scalar(1)));
        ScalarMultiVector img = d_pi(basis);
        for (const auto& [cm, p] : img.components())
          for (const auto& [m, c] : p.terms()) {
            auto it = mono_idx.find(m);
            if (it == mono_idx.end())
              throw InternalError("d_pi left the truncated complex on a linear structure");
            d(cod_idx.at(cm) * int(monos.size()) + it->second, col) = c;
          }
        ++col;
      }
    return rank(d);
  }

private:
  void init_cache() {
    const int n = nvars();
    linear_ = true;
    constant_ = true;
    for (const auto& [m, p] : pi_.components()) {
      if (!(p.is_homogeneous(1) || p.is_zero())) linear_ = false;
      if (!p.is_constant()) constant_ = false;
    }
    sharp_dx_.clear();
    for (int i = 0; i < n; ++i) sharp_dx_.push_back(sharp_components(OneForm::coordinate(n, i)));
    dx_bracket_.assign(std::size_t(n) * n, OneForm(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        dx_bracket_[std::size_t(i) * n + j] =
            one_form_bracket(OneForm::coordinate(n, i), OneForm::coordinate(n, j));
  }

  ScalarMultiVector pi_;
  bool linear_ = false, constant_ = false;
  std::vector<std::vector<Poly>> sharp_dx_;
  std::vector<OneForm> dx_bracket_;
};

}  // namespace pvk
