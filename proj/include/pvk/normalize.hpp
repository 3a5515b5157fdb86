#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pvk/bundle.hpp"

namespace pvk {

// Formal change of trivialization: a polynomial matrix whose constant term is
// invertible. The inverse is the truncated Neumann series around that term.
class GaugeTransform {
public:
  explicit GaugeTransform(PolyMatrix phi) : phi_(std::move(phi)) {
    if (determinant(phi_.constant_part()).is_zero())
      throw NonInvertibleConstantTerm("gauge transform has a singular constant term");
  }

  static GaugeTransform identity(int rank, int nvars) {
    return GaugeTransform(PolyMatrix::identity(rank, nvars));
  }

  const PolyMatrix& matrix() const { return phi_; }
  int rank() const { return phi_.size(); }
  PolyMatrix inverse(std::optional<int> cap) const { return phi_.inverse_mod_cap(cap); }

  friend GaugeTransform operator*(const GaugeTransform& a, const GaugeTransform& b) {
    return GaugeTransform(a.phi_ * b.phi_);
  }

private:
  PolyMatrix phi_;
};

// Transformation law under a change of trivialization,
//   (Phi * Xi)^i = Phi Xi^i Phi^{-1} - (L_{pi# dx_i} Phi) Phi^{-1},
// truncated at the working cap. Preserves the Maurer-Cartan residual and is
// compatible with composition: gauge(gauge(Xi,P1),P2) = gauge(Xi, P2 P1).
inline ConnectionData gauge_transform(const ConnectionData& xi, const GaugeTransform& g) {
  if (g.rank() != xi.rank())
    throw CrossRefError("/gauge", "gauge transform rank does not match bundle rank");
  std::optional<int> cap = xi.cap();
  PolyMatrix phi = xi.cap() ? g.matrix().truncate(*xi.cap()) : g.matrix();
  PolyMatrix inv = g.inverse(cap);
  std::vector<PolyMatrix> out;
  for (int i = 0; i < xi.nvars(); ++i) {
    PolyMatrix t = phi * xi.xi(i) * inv -
                   detail::field_apply(xi.poisson().sharp_dx(i), phi) * inv;
    if (cap) t = t.truncate(*cap);
    out.push_back(std::move(t));
  }
  return xi.with_components(std::move(out));
}

// Xi^(0), ..., Xi^(D) with homogeneous degree-r coefficients; they sum back
// to Xi.
inline std::vector<ConnectionData> homogeneous_parts(const ConnectionData& xi) {
  int top = std::max(xi.max_degree(), 0);
  std::vector<ConnectionData> parts;
  for (int r = 0; r <= top; ++r) {
    std::vector<PolyMatrix> comp;
    for (int i = 0; i < xi.nvars(); ++i) comp.push_back(xi.xi(i).homogeneous_part(r));
    parts.push_back(xi.with_components(std::move(comp)));
  }
  return parts;
}

// Dilation family Xi_t = sum_r t^r Xi^(r), the closed form of t phi^t_* Xi
// for polynomial data. Requires a flat datum over a linear structure.
inline ConnectionData dilation_homotopy(const ConnectionData& xi, const Scalar& t) {
  if (!xi.poisson().is_linear())
    throw NonLinearStructure("dilation_homotopy requires a linear Poisson structure");
  require_flat(xi, "dilation_homotopy");
  std::vector<PolyMatrix> comp;
  for (int i = 0; i < xi.nvars(); ++i) {
    PolyMatrix acc(xi.rank(), xi.nvars());
    Scalar tr(1);
    for (int r = 0; r <= std::max(xi.max_degree(), 0); ++r) {
      acc += tr * xi.xi(i).homogeneous_part(r);
      tr *= t;
    }
    comp.push_back(std::move(acc));
  }
  return xi.with_components(std::move(comp));
}

// Same family with t as an extra formal variable (appended last; the Poisson
// structure does not involve it). The Maurer-Cartan residual of the result is
// then a polynomial identity in t.
inline ConnectionData dilation_homotopy_symbolic(const ConnectionData& xi) {
  if (!xi.poisson().is_linear())
    throw NonLinearStructure("dilation_homotopy requires a linear Poisson structure");
  require_flat(xi, "dilation_homotopy");
  const int n = xi.nvars(), nn = n + 1;
  ScalarMultiVector pi_ext = scalar_mv(nn, 2);
  for (const auto& [m, p] : xi.poisson().bivector().components())
    pi_ext.set_component(m, p.extend_vars(nn));
  PoissonStructure pi(std::move(pi_ext), false);
  std::vector<PolyMatrix> comp;
  for (int i = 0; i < n; ++i) {
    PolyMatrix acc(xi.rank(), nn);
    for (int r = 0; r <= std::max(xi.max_degree(), 0); ++r) {
      PolyMatrix part = xi.xi(i).homogeneous_part(r).extend_vars(nn);
      Poly tr = Poly::constant(nn, Scalar(1));
      for (int s = 0; s < r; ++s) tr *= Poly::variable(nn, n);
      acc += tr * part;
    }
    comp.push_back(std::move(acc));
  }
  comp.push_back(PolyMatrix(xi.rank(), nn));  // the formal parameter direction
  // the cap would otherwise truncate powers of the formal parameter
  return ConnectionData(std::move(pi), std::move(comp), xi.field(), std::nullopt);
}

// Words over the component matrices, graded-lex order, traces frozen into a
// list. Equal lists are necessary for simultaneous conjugacy.
inline std::vector<Scalar> trace_word_invariants(const std::vector<ScalarMat>& mats, int max_len) {
  std::vector<Scalar> out;
  if (mats.empty()) return out;
  std::vector<std::vector<int>> words;
  std::vector<int> w;
  auto rec = [&](auto&& self, int len) -> void {
    if (!w.empty()) words.push_back(w);
    if (len == max_len) return;
    for (int a = 0; a < int(mats.size()); ++a) {
      w.push_back(a);
      self(self, len + 1);
      w.pop_back();
    }
  };
  rec(rec, 0);
  std::sort(words.begin(), words.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  for (const auto& word : words) {
    ScalarMat prod = mats[std::size_t(word[0])];
    for (std::size_t t = 1; t < word.size(); ++t) prod = prod * mats[std::size_t(word[t])];
    out.push_back(prod.trace());
  }
  return out;
}

struct NormalizeResult {
  enum class Status { Ok, Obstruction, UnitaryObstruction, NotACocycle };
  Status status = Status::Ok;
  std::optional<GaugeTransform> phi;
  std::vector<ScalarMat> xi0;
  std::vector<int> degrees_cleared;
  int failed_degree = -1;
  std::vector<PolyMatrix> obstruction_cocycle;  // components of Xi_r, when obstructed
  bool unitary_path = false;
  bool semisimple = true;
};

namespace detail {

// The degree-r homogeneous component complex: g acting on S^r(g) (x) gl(m) by
// e_i . (f (x) A) = {x_i, f} (x) A + f (x) [Xi0^i, A]. Built without the
// generic module validation; flatness of the input is what makes it a module.
inline LieModule homogeneous_module(const LieAlgebra& g, const std::vector<ScalarMat>& xi0, int m,
                                    int r, const std::vector<Monomial>& monos) {
  const int n = g.dim();
  const int nm = int(monos.size());
  const int dim = nm * m * m;
  std::map<Monomial, int, GrlexLess> idx;
  for (int t = 0; t < nm; ++t) idx[monos[std::size_t(t)]] = t;
  std::vector<ScalarMat> rho(std::size_t(n), ScalarMat(dim, dim));
  for (int i = 0; i < n; ++i) {
    ScalarMat& R = rho[std::size_t(i)];
    for (int t = 0; t < nm; ++t) {
      // {x_i, x^beta} = sum_j beta_j x^{beta - e_j} {x_i, x_j}
      const Monomial& beta = monos[std::size_t(t)];
      for (int j = 0; j < n; ++j) {
        int bj = beta.e[std::size_t(j)];
        if (bj == 0) continue;
        for (int k = 0; k < n; ++k) {
          const Scalar& c = g.c(i, j, k);
          if (c.is_zero()) continue;
          Monomial target = beta;
          --target.e[std::size_t(j)];
          ++target.e[std::size_t(k)];
          int tt = idx.at(target);
          Scalar coeff = Scalar(bj) * c;
          for (int p = 0; p < m; ++p)
            for (int q = 0; q < m; ++q)
              R(tt * m * m + p * m + q, t * m * m + p * m + q) += coeff;
        }
      }
      // f (x) [Xi0^i, A]: left multiplication minus right multiplication.
      const ScalarMat& x0 = xi0[std::size_t(i)];
      for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q)
          for (int s = 0; s < m; ++s) {
            if (!x0(p, s).is_zero())
              R(t * m * m + p * m + q, t * m * m + s * m + q) += x0(p, s);
            if (!x0(s, q).is_zero())
              R(t * m * m + p * m + q, t * m * m + p * m + s) -= x0(s, q);
          }
    }
  }
  return LieModule(g, std::move(rho), false);
}

inline std::vector<Scalar> flatten_matrix(const PolyMatrix& x, const std::vector<Monomial>& monos,
                                          const std::map<Monomial, int, GrlexLess>& idx, int m) {
  std::vector<Scalar> v(monos.size() * std::size_t(m) * m);
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q)
      for (const auto& [mono, c] : x(p, q).terms())
        v[std::size_t(idx.at(mono) * m * m + p * m + q)] = c;
  return v;
}

inline PolyMatrix unflatten_matrix(const std::vector<Scalar>& v,
                                   const std::vector<Monomial>& monos, int m, int nvars) {
  PolyMatrix x(m, nvars);
  for (int t = 0; t < int(monos.size()); ++t)
    for (int p = 0; p < m; ++p)
      for (int q = 0; q < m; ++q) {
        const Scalar& c = v[std::size_t(t * m * m + p * m + q)];
        if (!c.is_zero()) x(p, q) += Poly::monomial(nvars, monos[std::size_t(t)], c);
      }
  return x;
}

// Anti-Hermitian (field Qi) or antisymmetric (field Q) projection.
inline PolyMatrix skew_projection(const PolyMatrix& a, Field field) {
  PolyMatrix adj = field == Field::Qi ? a.adjoint() : a.transpose();
  Scalar half(1, 2);
  return half * (a - adj);
}

// Truncated exponential series; A is homogeneous of positive degree, so the
// series terminates modulo the cap.
inline PolyMatrix exp_truncated(const PolyMatrix& a, int cap) {
  PolyMatrix acc = PolyMatrix::identity(a.size(), a.nvars());
  PolyMatrix pow = PolyMatrix::identity(a.size(), a.nvars());
  Scalar fact(1);
  for (int k = 1; k <= cap; ++k) {
    pow = (pow * a).truncate(cap);
    if (pow.is_zero()) break;
    fact *= Scalar(k);
    acc += (Scalar(1) / fact) * pow;
  }
  return acc;
}

}  // namespace detail

// Inductive formal normalization: for r = 1..D, interpret the degree-r part
// of Xi as a degree-1 cochain with values in S^r(g) (x) gl(m), check the
// cocycle condition (the degree-r Maurer-Cartan component), solve d A_r =
// Xi_r, and gauge by Phi_r = id + A_r (exp A_r on the unitary path). The
// degree-r step cannot disturb lower degrees; Phi = Phi_D ... Phi_1.
inline NormalizeResult formal_normalize(const ConnectionData& xi, int max_degree,
                                        bool force = false) {
  if (!xi.poisson().is_linear())
    throw NonLinearStructure("formal_normalize requires a linear Poisson structure");
  if (xi.cap() && *xi.cap() < max_degree)
    throw Error(ErrorClass::Validation, "normalization degree exceeds the bundle's cap");
  require_flat(xi, "formal_normalize");
  LieAlgebra g = xi.poisson().linearization();
  NormalizeResult res;
  res.semisimple = g.is_semisimple();
  if (!res.semisimple && !force)
    throw NotSemisimple(
        "underlying algebra is not semisimple (Killing form degenerate); pass force to attempt "
        "normalization anyway");
  const int n = xi.nvars(), m = xi.rank();
  const bool unitary = is_unitary(xi);
  res.unitary_path = unitary;
  // Degrees above the working cap never influence the cleared range.
  ConnectionData cur = xi.cap() ? xi
                                : ConnectionData(xi.poisson(), xi.components(), xi.field(),
                                                 std::max(max_degree, xi.max_degree()));
  GaugeTransform phi_total = GaugeTransform::identity(m, n);
  std::vector<ScalarMat> xi0 = cur.constant_part();
  for (int r = 1; r <= max_degree; ++r) {
    std::vector<PolyMatrix> xr;
    bool zero = true;
    for (int i = 0; i < n; ++i) {
      xr.push_back(cur.xi(i).homogeneous_part(r).set_cap(std::nullopt));
      if (!xr.back().is_zero()) zero = false;
    }
    if (zero) {
      res.degrees_cleared.push_back(r);
      continue;
    }
    auto monos = monomials_of_degree(n, r);
    std::map<Monomial, int, GrlexLess> idx;
    for (int t = 0; t < int(monos.size()); ++t) idx[monos[std::size_t(t)]] = t;
    LieModule mod = detail::homogeneous_module(g, xi0, m, r, monos);
    CECochain target(n, mod.dim(), 1);
    for (int i = 0; i < n; ++i)
      target[target.mask_index(IndexMask(1) << i)] =
          detail::flatten_matrix(xr[std::size_t(i)], monos, idx, m);
    CoboundaryResult sol = solve_coboundary(mod, target);
    if (sol.status == CoboundaryResult::Status::NotACocycle) {
      res.status = NormalizeResult::Status::NotACocycle;
      res.failed_degree = r;
      res.obstruction_cocycle = xr;
      return res;
    }
    if (sol.status == CoboundaryResult::Status::Obstruction) {
      res.status = NormalizeResult::Status::Obstruction;
      res.failed_degree = r;
      res.obstruction_cocycle = xr;
      return res;
    }
    PolyMatrix a = detail::unflatten_matrix(sol.primitive[0], monos, m, n);
    PolyMatrix phi_r(m, n);
    if (unitary) {
      PolyMatrix skew = detail::skew_projection(a, xi.field());
      CECochain check(n, mod.dim(), 0);
      check[0] = detail::flatten_matrix(skew, monos, idx, m);
      if (!(ce_differential(mod, check) == target)) {
        res.status = NormalizeResult::Status::UnitaryObstruction;
        res.failed_degree = r;
        res.obstruction_cocycle = xr;
        return res;
      }
      int cap = cur.cap() ? *cur.cap() : max_degree;
      phi_r = detail::exp_truncated(skew, cap);
    } else {
      phi_r = PolyMatrix::identity(m, n) + a;
    }
    GaugeTransform step(phi_r);
    ConnectionData next = gauge_transform(cur, step);
    for (int i = 0; i < n; ++i) {
      for (int s = 0; s <= r; ++s) {
        PolyMatrix expect = s == r ? PolyMatrix(m, n) : cur.xi(i).homogeneous_part(s);
        if (!(next.xi(i).homogeneous_part(s).set_cap(std::nullopt) ==
              expect.set_cap(std::nullopt)))
          throw InternalError("normalization step at degree " + std::to_string(r) +
                              " disturbed degree " + std::to_string(s));
      }
    }
    cur = std::move(next);
    phi_total = step * phi_total;
    res.degrees_cleared.push_back(r);
  }
  res.phi = std::move(phi_total);
  res.xi0 = cur.constant_part();
  // the constant part must be an honest representation
  std::vector<ScalarMat> rho = res.xi0;
  LieModule(g, rho);  // throws ModuleValidationError on failure
  return res;
}

}  // namespace pvk
