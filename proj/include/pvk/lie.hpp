#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pvk/linalg.hpp"
#include "pvk/multivector.hpp"
#include "pvk/scalar.hpp"

namespace pvk {

// Finite-dimensional Lie algebra given by structure constants c_{ij}^k for
// i < j (antisymmetry implied). The Jacobi identity is validated at
// construction; the first violated triple is reported.
class LieAlgebra {
public:
  static LieAlgebra from_structure_constants(int dim,
                                             const std::map<std::pair<int, int>, std::vector<std::pair<int, Scalar>>>& brackets,
                                             std::vector<std::string> names = {},
                                             std::string preset = "") {
    LieAlgebra g;
    g.n_ = dim;
    g.preset_ = std::move(preset);
    g.c_.assign(std::size_t(dim) * dim * dim, Scalar(0));
    for (const auto& [ij, terms] : brackets) {
      auto [i, j] = ij;
      if (i < 0 || j < 0 || i >= dim || j >= dim || i == j)
        throw Error(ErrorClass::Validation, "bad bracket indices (" + std::to_string(i) + "," +
                                                std::to_string(j) + ")");
      for (const auto& [k, v] : terms) {
        if (k < 0 || k >= dim)
          throw Error(ErrorClass::Validation, "bad bracket target index " + std::to_string(k));
        g.at(i, j, k) += v;
        g.at(j, i, k) -= v;
      }
    }
    g.names_ = std::move(names);
    if (g.names_.empty())
      for (int i = 0; i < dim; ++i) g.names_.push_back("e" + std::to_string(i + 1));
    g.validate_jacobi();
    return g;
  }

  int dim() const { return n_; }
  const std::vector<std::string>& basis_names() const { return names_; }
  const std::string& preset_name() const { return preset_; }

  const Scalar& c(int i, int j, int k) const { return c_[flat(i, j, k)]; }

  // [e_i, e_j] as a coefficient vector.
  std::vector<Scalar> bracket(int i, int j) const {
    std::vector<Scalar> v(static_cast<std::size_t>(n_));
    for (int k = 0; k < n_; ++k) v[std::size_t(k)] = c(i, j, k);
    return v;
  }
  std::vector<Scalar> bracket(const std::vector<Scalar>& x, const std::vector<Scalar>& y) const {
    std::vector<Scalar> v(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        if (x[std::size_t(i)].is_zero() || y[std::size_t(j)].is_zero()) continue;
        for (int k = 0; k < n_; ++k)
          v[std::size_t(k)] += x[std::size_t(i)] * y[std::size_t(j)] * c(i, j, k);
      }
    return v;
  }

  ScalarMat ad(int i) const {
    ScalarMat m(n_, n_);
    for (int j = 0; j < n_; ++j)
      for (int k = 0; k < n_; ++k) m(k, j) = c(i, j, k);
    return m;
  }

  std::pair<ScalarMat, bool> killing_form() const {
    std::vector<ScalarMat> ads;
    for (int i = 0; i < n_; ++i) ads.push_back(ad(i));
    ScalarMat k(n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) k(i, j) = (ads[std::size_t(i)] * ads[std::size_t(j)]).trace();
    bool ss = !determinant(k).is_zero();
    return {k, ss};
  }
  bool is_semisimple() const { return killing_form().second; }

  bool is_abelian() const {
    for (const Scalar& v : c_)
      if (!v.is_zero()) return false;
    return true;
  }

  // Preset catalog: sl2, so3, h3, aff1, abelian:n.
  static LieAlgebra preset(const std::string& name) {
    using B = std::map<std::pair<int, int>, std::vector<std::pair<int, Scalar>>>;
    if (name == "sl2") {
      B b{{{0, 1}, {{1, Scalar(2)}}}, {{0, 2}, {{2, Scalar(-2)}}}, {{1, 2}, {{0, Scalar(1)}}}};
      return from_structure_constants(3, b, {"h", "e", "f"}, name);
    }
    if (name == "so3") {
      B b{{{0, 1}, {{2, Scalar(1)}}}, {{1, 2}, {{0, Scalar(1)}}}, {{2, 0}, {{1, Scalar(1)}}}};
      return from_structure_constants(3, b, {"e1", "e2", "e3"}, name);
    }
    if (name == "h3") {
      B b{{{0, 1}, {{2, Scalar(1)}}}};
      return from_structure_constants(3, b, {"e1", "e2", "e3"}, name);
    }
    if (name == "aff1") {
      B b{{{0, 1}, {{1, Scalar(1)}}}};
      return from_structure_constants(2, b, {"e1", "e2"}, name);
    }
    if (name.rfind("abelian:", 0) == 0) {
      int n = 0;
      try {
        n = std::stoi(name.substr(8));
      } catch (...) {
        throw Error(ErrorClass::Validation, "bad preset name \"" + name + "\"");
      }
      if (n < 1 || n > 16) throw Error(ErrorClass::Validation, "abelian dimension out of range");
      return from_structure_constants(n, {}, {}, name);
    }
    throw Error(ErrorClass::Validation, "unknown Lie algebra preset \"" + name + "\"");
  }

private:
  std::size_t flat(int i, int j, int k) const {
    return (std::size_t(i) * n_ + j) * n_ + k;
  }
  Scalar& at(int i, int j, int k) { return c_[flat(i, j, k)]; }

  void validate_jacobi() {
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j)
        for (int k = j + 1; k < n_; ++k) {
          // [e_i,[e_j,e_k]] + [e_j,[e_k,e_i]] + [e_k,[e_i,e_j]]
          std::vector<Scalar> s(static_cast<std::size_t>(n_));
          for (int l = 0; l < n_; ++l)
            for (int m = 0; m < n_; ++m) {
              s[std::size_t(m)] += c(j, k, l) * c(i, l, m);
              s[std::size_t(m)] += c(k, i, l) * c(j, l, m);
              s[std::size_t(m)] += c(i, j, l) * c(k, l, m);
            }
          for (int m = 0; m < n_; ++m)
            if (!s[std::size_t(m)].is_zero())
              throw JacobiViolation(i, j, k,
                                    "Jacobi identity fails on basis triple (" + std::to_string(i) +
                                        "," + std::to_string(j) + "," + std::to_string(k) +
                                        "): jacobiator component " + std::to_string(m) + " is " +
                                        s[std::size_t(m)].str());
        }
  }

  int n_ = 0;
  std::vector<Scalar> c_;
  std::vector<std::string> names_;
  std::string preset_;
};

// Finite-dimensional module over a LieAlgebra: action matrices rho_i with
// rho([e_i,e_j]) = [rho_i, rho_j], validated at construction.
class LieModule {
public:
  LieModule(LieAlgebra algebra, std::vector<ScalarMat> rho, bool validate = true)
      : g_(std::move(algebra)), rho_(std::move(rho)) {
    if (int(rho_.size()) != g_.dim())
      throw ModuleValidationError("need one action matrix per basis element");
    m_ = rho_.empty() ? 0 : rho_[0].rows();
    for (const auto& r : rho_)
      if (r.rows() != m_ || r.cols() != m_)
        throw ModuleValidationError("action matrices must be square of equal size");
    if (validate) validate_action();
  }

  const LieAlgebra& algebra() const { return g_; }
  int dim() const { return m_; }
  const ScalarMat& rho(int i) const { return rho_[std::size_t(i)]; }
  const std::vector<ScalarMat>& matrices() const { return rho_; }

  std::vector<Scalar> act(int i, const std::vector<Scalar>& v) const {
    std::vector<Scalar> w(static_cast<std::size_t>(m_));
    for (int r = 0; r < m_; ++r)
      for (int c = 0; c < m_; ++c) w[std::size_t(r)] += rho_[std::size_t(i)](r, c) * v[std::size_t(c)];
    return w;
  }

  static LieModule trivial(const LieAlgebra& g) {
    return LieModule(g, std::vector<ScalarMat>(std::size_t(g.dim()), ScalarMat(1, 1)), false);
  }
  static LieModule adjoint(const LieAlgebra& g) {
    std::vector<ScalarMat> rho;
    for (int i = 0; i < g.dim(); ++i) rho.push_back(g.ad(i));
    return LieModule(g, std::move(rho), false);  // valid by the Jacobi identity
  }
  // The defining representation of each preset; abelian gets the 1-dim zero
  // module. Only available for preset algebras.
  static LieModule standard(const LieAlgebra& g) {
    const std::string& p = g.preset_name();
    auto mat = [](int m, std::vector<std::vector<long>> rows) {
      ScalarMat s(m, m);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) s(i, j) = Scalar(rows[std::size_t(i)][std::size_t(j)]);
      return s;
    };
    if (p == "sl2")
      return LieModule(g, {mat(2, {{1, 0}, {0, -1}}), mat(2, {{0, 1}, {0, 0}}),
                           mat(2, {{0, 0}, {1, 0}})});
    if (p == "so3") return adjoint(g);
    if (p == "h3")
      return LieModule(g, {mat(3, {{0, 1, 0}, {0, 0, 0}, {0, 0, 0}}),
                           mat(3, {{0, 0, 0}, {0, 0, 1}, {0, 0, 0}}),
                           mat(3, {{0, 0, 1}, {0, 0, 0}, {0, 0, 0}})});
    if (p == "aff1")
      return LieModule(g, {mat(2, {{1, 0}, {0, 0}}), mat(2, {{0, 1}, {0, 0}})});
    if (p.rfind("abelian:", 0) == 0) return trivial(g);
    throw Error(ErrorClass::Validation, "no standard module for algebra \"" + p + "\"");
  }
  static LieModule by_name(const LieAlgebra& g, const std::string& name) {
    if (name == "trivial") return trivial(g);
    if (name == "adjoint") return adjoint(g);
    if (name == "standard") return standard(g);
    throw Error(ErrorClass::Validation, "unknown module preset \"" + name + "\"");
  }

private:
  void validate_action() const {
    for (int i = 0; i < g_.dim(); ++i)
      for (int j = i + 1; j < g_.dim(); ++j) {
        ScalarMat lhs = rho_[std::size_t(i)] * rho_[std::size_t(j)] -
                        rho_[std::size_t(j)] * rho_[std::size_t(i)];
        ScalarMat rhs(m_, m_);
        for (int k = 0; k < g_.dim(); ++k) {
          const Scalar& ck = g_.c(i, j, k);
          if (!ck.is_zero()) rhs = rhs + ck * rho_[std::size_t(k)];
        }
        if (!(lhs == rhs))
          throw ModuleValidationError("matrices violate rho([e_" + std::to_string(i + 1) + ",e_" +
                                      std::to_string(j + 1) + "]) = [rho_i, rho_j]");
      }
  }

  LieAlgebra g_;
  int m_ = 0;
  std::vector<ScalarMat> rho_;
};

// Chevalley-Eilenberg cochain of degree k with values in a module of
// dimension m: one m-vector per increasing k-subset of the basis.
class CECochain {
public:
  CECochain() : n_(0), m_(0), k_(0) {}
  CECochain(int alg_dim, int module_dim, int degree)
      : n_(alg_dim), m_(module_dim), k_(degree), masks_(subsets_of_size(alg_dim, degree)),
        comp_(masks_.size(), std::vector<Scalar>(std::size_t(module_dim))) {}

  int degree() const { return k_; }
  int algebra_dim() const { return n_; }
  int module_dim() const { return m_; }
  const std::vector<IndexMask>& masks() const { return masks_; }

  std::vector<Scalar>& operator[](std::size_t idx) { return comp_[idx]; }
  const std::vector<Scalar>& operator[](std::size_t idx) const { return comp_[idx]; }

  std::size_t mask_index(IndexMask m) const {
    auto it = std::lower_bound(masks_.begin(), masks_.end(), m);
    if (it == masks_.end() || *it != m)
      throw InternalError("cochain component lookup with invalid index set");
    return std::size_t(it - masks_.begin());
  }

  // Signed evaluation with one inserted index: phi(e_c, e_{rest...}).
  void add_signed(IndexMask rest, int c, const Scalar& coeff, std::vector<Scalar>& acc) const {
    IndexMask bit = IndexMask(1) << c;
    if (rest & bit) return;
    int s = wedge_sign(bit, rest);
    const std::vector<Scalar>& v = comp_[mask_index(rest | bit)];
    Scalar f = s == 1 ? coeff : -coeff;
    for (std::size_t t = 0; t < v.size(); ++t) acc[t] += f * v[t];
  }

  bool is_zero() const {
    for (const auto& v : comp_)
      for (const auto& s : v)
        if (!s.is_zero()) return false;
    return true;
  }

  friend CECochain operator-(const CECochain& a, const CECochain& b) {
    CECochain r = a;
    for (std::size_t i = 0; i < r.comp_.size(); ++i)
      for (std::size_t t = 0; t < r.comp_[i].size(); ++t) r.comp_[i][t] -= b.comp_[i][t];
    return r;
  }
  friend bool operator==(const CECochain& a, const CECochain& b) {
    return a.n_ == b.n_ && a.m_ == b.m_ && a.k_ == b.k_ && a.comp_ == b.comp_;
  }

private:
  int n_, m_, k_;
  std::vector<IndexMask> masks_;
  std::vector<std::vector<Scalar>> comp_;
};

// Chevalley-Eilenberg differential with the convention
//   (d phi)(a_0,...,a_k) = sum_i (-1)^i a_i . phi(...^a_i...)
//                        + sum_{i<j} (-1)^{i+j} phi([a_i,a_j], ...^a_i...^a_j...).
inline CECochain ce_differential(const LieModule& mod, const CECochain& phi) {
  const int n = mod.algebra().dim();
  const int k = phi.degree();
  if (k >= n) throw Error(ErrorClass::Validation, "ce_differential: degree must be < dim");
  CECochain out(n, mod.dim(), k + 1);
  const auto& masks = out.masks();
  for (std::size_t s = 0; s < masks.size(); ++s) {
    std::vector<int> idx = mask_indices(masks[s]);
    std::vector<Scalar> acc(static_cast<std::size_t>(mod.dim()));
    for (std::size_t i = 0; i < idx.size(); ++i) {
      IndexMask rest = masks[s] & ~(IndexMask(1) << idx[i]);
      std::vector<Scalar> v = mod.act(idx[i], phi[phi.mask_index(rest)]);
      bool neg = i % 2 == 1;
      for (std::size_t t = 0; t < acc.size(); ++t) acc[t] += neg ? -v[t] : v[t];
    }
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = i + 1; j < idx.size(); ++j) {
        IndexMask rest = masks[s] & ~(IndexMask(1) << idx[i]) & ~(IndexMask(1) << idx[j]);
        Scalar outer((i + j) % 2 == 0 ? 1 : -1);
        for (int c = 0; c < n; ++c) {
          const Scalar& br = mod.algebra().c(idx[i], idx[j], c);
          if (br.is_zero()) continue;
          phi.add_signed(rest, c, outer * br, acc);
        }
      }
    out[s] = std::move(acc);
  }
  return out;
}

// Matrix of d_k : C^k -> C^{k+1} in the canonical bases.
inline ScalarMat ce_matrix(const LieModule& mod, int k) {
  const int n = mod.algebra().dim();
  auto dom = subsets_of_size(n, k);
  auto cod = subsets_of_size(n, k + 1);
  const int m = mod.dim();
  ScalarMat d(int(cod.size()) * m, int(dom.size()) * m);
  for (std::size_t col_set = 0; col_set < dom.size(); ++col_set)
    for (int col_vec = 0; col_vec < m; ++col_vec) {
      CECochain basis(n, m, k);
      basis[col_set][std::size_t(col_vec)] = Scalar(1);
      CECochain img = ce_differential(mod, basis);
      for (std::size_t row_set = 0; row_set < cod.size(); ++row_set)
        for (int row_vec = 0; row_vec < m; ++row_vec)
          d(int(row_set) * m + row_vec, int(col_set) * m + col_vec) =
              img[row_set][std::size_t(row_vec)];
    }
  return d;
}

// dim H^k = dim ker d_k - rank d_{k-1}, by exact elimination.
inline std::vector<int> ce_cohomology_dims(const LieModule& mod, int k_min, int k_max) {
  const int n = mod.algebra().dim();
  std::vector<int> dims;
  for (int k = k_min; k <= k_max; ++k) {
    if (k < 0 || k > n) {
      dims.push_back(0);
      continue;
    }
    int dim_ck = int(subsets_of_size(n, k).size()) * mod.dim();
    int rank_dk = k < n ? rank(ce_matrix(mod, k)) : 0;
    int rank_prev = k > 0 ? rank(ce_matrix(mod, k - 1)) : 0;
    dims.push_back(dim_ck - rank_dk - rank_prev);
  }
  return dims;
}

struct CoboundaryResult {
  enum class Status { Solved, NotACocycle, Obstruction };
  Status status = Status::Solved;
  CECochain primitive;          // degree 0, when Solved
  CECochain cocycle_witness;    // the (closed) target, when Obstruction
  int witness_i = -1, witness_j = -1;  // violated pair, when NotACocycle
};

// Solves d A = target for A in C^0, deterministically (fixed column order,
// free variables zero). target must be a degree-1 cocycle.
inline CoboundaryResult solve_coboundary(const LieModule& mod, const CECochain& target) {
  if (target.degree() != 1)
    throw Error(ErrorClass::Validation, "solve_coboundary: target must have degree 1");
  const int n = mod.algebra().dim();
  const int m = mod.dim();
  CoboundaryResult res;
  if (n >= 2) {
    CECochain d2 = ce_differential(mod, target);
    for (std::size_t s = 0; s < d2.masks().size(); ++s)
      for (const Scalar& v : d2[s])
        if (!v.is_zero()) {
          auto idx = mask_indices(d2.masks()[s]);
          res.status = CoboundaryResult::Status::NotACocycle;
          res.witness_i = idx[0];
          res.witness_j = idx[1];
          return res;
        }
  }
  // Stack the n equations rho_i A = target(e_i).
  ScalarMat a(n * m, m);
  std::vector<Scalar> b(std::size_t(n) * m);
  for (int i = 0; i < n; ++i) {
    const ScalarMat& r = mod.rho(i);
    for (int p = 0; p < m; ++p) {
      for (int q = 0; q < m; ++q) a(i * m + p, q) = r(p, q);
      b[std::size_t(i * m + p)] = target[target.mask_index(IndexMask(1) << i)][std::size_t(p)];
    }
  }
  auto x = solve_linear(a, b);
  if (!x) {
    res.status = CoboundaryResult::Status::Obstruction;
    res.cocycle_witness = target;
    return res;
  }
  CECochain prim(n, m, 0);
  prim[0] = std::move(*x);
  res.primitive = std::move(prim);
  return res;
}

}  // namespace pvk
