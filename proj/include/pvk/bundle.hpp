#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "pvk/poisson.hpp"

namespace pvk {

// Section of the trivialized bundle E = P x F^m: a column of m polynomials.
class Section {
public:
  Section() = default;
  Section(int rank, int nvars) : v_(std::size_t(rank), Poly(nvars)) {}
  explicit Section(std::vector<Poly> v) : v_(std::move(v)) {}

  int rank() const { return int(v_.size()); }
  Poly& operator[](int i) { return v_[std::size_t(i)]; }
  const Poly& operator[](int i) const { return v_[std::size_t(i)]; }

  static Section basis_vector(int rank, int nvars, int i) {
    Section s(rank, nvars);
    s[i] = Poly::constant(nvars, Scalar(1));
    return s;
  }

  friend Section operator+(const Section& a, const Section& b) {
    Section c = a;
    for (int i = 0; i < c.rank(); ++i) c[i] += b[i];
    return c;
  }
  friend Section operator-(const Section& a, const Section& b) {
    Section c = a;
    for (int i = 0; i < c.rank(); ++i) c[i] -= b[i];
    return c;
  }
  friend Section operator*(const Poly& f, const Section& s) {
    Section c = s;
    for (int i = 0; i < c.rank(); ++i) c[i] = f * c[i];
    return c;
  }
  friend bool operator==(const Section& a, const Section& b) { return a.v_ == b.v_; }

private:
  std::vector<Poly> v_;
};

// Odd-degree cocycle on gl(m) with trivial coefficients:
//   c(A_1,...,A_{2k-1}) = sum_{sigma} sgn(sigma) tr(A_{sigma(1)} ... A_{sigma(2k-1)}),
// the integer antisymmetrization without factorial normalization. u_1 = tr.
class GlCocycle {
public:
  static GlCocycle trace() { return GlCocycle(1, "tr"); }
  static GlCocycle u(int k) {
    if (k < 1 || k > 3) throw Error(ErrorClass::Validation, "u_k supported for k = 1..3");
    return GlCocycle(2 * k - 1, "u" + std::to_string(k));
  }
  static GlCocycle by_name(const std::string& name) {
    if (name == "tr" || name == "u1") return trace();
    if (name == "u2") return u(2);
    if (name == "u3") return u(3);
    throw Error(ErrorClass::Validation, "unknown cocycle \"" + name + "\"");
  }

  int arity() const { return arity_; }
  const std::string& name() const { return name_; }

  Poly eval(const std::vector<PolyMatrix>& args) const {
    if (int(args.size()) != arity_) throw InternalError("cocycle arity mismatch");
    Poly out(args[0].nvars());
    permute([&](const std::vector<int>& perm, int sgn) {
      PolyMatrix prod = args[std::size_t(perm[0])];
      for (int t = 1; t < arity_; ++t) prod = prod * args[std::size_t(perm[std::size_t(t)])];
      Poly tr = prod.trace();
      out += sgn == 1 ? tr : -tr;
    });
    return out;
  }

  Scalar eval(const std::vector<ScalarMat>& args) const {
    if (int(args.size()) != arity_) throw InternalError("cocycle arity mismatch");
    Scalar out(0);
    permute([&](const std::vector<int>& perm, int sgn) {
      ScalarMat prod = args[std::size_t(perm[0])];
      for (int t = 1; t < arity_; ++t) prod = prod * args[std::size_t(perm[std::size_t(t)])];
      Scalar tr = prod.trace();
      out += sgn == 1 ? tr : -tr;
    });
    return out;
  }

private:
  GlCocycle(int arity, std::string name) : arity_(arity), name_(std::move(name)) {}

  template <class F>
  void permute(F&& visit) const {
    std::vector<int> perm(static_cast<std::size_t>(arity_));
    for (int i = 0; i < arity_; ++i) perm[std::size_t(i)] = i;
    do {
      int inv = 0;
      for (std::size_t a = 0; a < perm.size(); ++a)
        for (std::size_t b = a + 1; b < perm.size(); ++b)
          if (perm[a] > perm[b]) ++inv;
      visit(perm, inv % 2 == 0 ? 1 : -1);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }

  int arity_;
  std::string name_;
};

// Trivialized Poisson-vector-bundle datum: the gl(m)-valued vector field Xi
// with [alpha, s] = L_{pi# alpha} s + Xi(alpha) s, stored by its coordinate
// components Xi(dx_i) = Xi^i and extended C^infty-linearly.
class ConnectionData {
public:
  ConnectionData(PoissonStructure pi, std::vector<PolyMatrix> xi, Field field = Field::Q,
                 std::optional<int> cap = std::nullopt)
      : pi_(std::move(pi)), xi_(std::move(xi)), field_(field), cap_(cap) {
    if (int(xi_.size()) != pi_.nvars())
      throw CrossRefError("/bundle/xi", "need one component matrix per coordinate");
    rank_ = xi_.empty() ? 0 : xi_[0].size();
    for (auto& x : xi_) {
      if (x.size() != rank_ || x.nvars() != pi_.nvars())
        throw CrossRefError("/bundle/xi", "component matrices must agree in rank and variables");
      x.set_cap(cap_);
    }
  }

  const PoissonStructure& poisson() const { return pi_; }
  int rank() const { return rank_; }
  int nvars() const { return pi_.nvars(); }
  Field field() const { return field_; }
  const std::optional<int>& cap() const { return cap_; }
  const PolyMatrix& xi(int i) const { return xi_[std::size_t(i)]; }
  const std::vector<PolyMatrix>& components() const { return xi_; }

  PolyMatrix xi_of(const OneForm& a) const {
    PolyMatrix out(rank_, nvars());
    for (int i = 0; i < nvars(); ++i) {
      if (a[i].is_zero()) continue;
      out += a[i] * xi_[std::size_t(i)];
    }
    if (cap_) out = out.truncate(*cap_);
    return out;
  }

  MatrixMultiVector as_multivector() const {
    MatrixMultiVector t = matrix_mv(nvars(), 1, rank_);
    for (int i = 0; i < nvars(); ++i) t.set_component(IndexMask(1) << i, xi_[std::size_t(i)]);
    return t;
  }

  std::vector<ScalarMat> constant_part() const {
    std::vector<ScalarMat> out;
    for (const auto& x : xi_) out.push_back(x.constant_part());
    return out;
  }
  int max_degree() const {
    int d = -1;
    for (const auto& x : xi_) d = std::max(d, x.degree());
    return d;
  }
  bool is_constant() const {
    for (const auto& x : xi_)
      if (!x.is_constant()) return false;
    return true;
  }

  ConnectionData with_components(std::vector<PolyMatrix> xi) const {
    return ConnectionData(pi_, std::move(xi), field_, cap_);
  }

private:
  PoissonStructure pi_;
  int rank_ = 0;
  std::vector<PolyMatrix> xi_;
  Field field_;
  std::optional<int> cap_;
};

// The bundle of a Lie-algebra representation: Xi^i = rho_i, constant.
inline ConnectionData from_representation(const PoissonStructure& pi, const LieModule& mod,
                                          Field field = Field::Q) {
  if (!(pi.bivector() == PoissonStructure::from_lie_algebra(mod.algebra()).bivector()))
    throw AlgebraMismatch("Poisson structure is not the Lie-Poisson structure of the module's algebra");
  std::vector<PolyMatrix> xi;
  for (int i = 0; i < mod.algebra().dim(); ++i)
    xi.push_back(PolyMatrix::from_scalar(mod.rho(i), pi.nvars()));
  return ConnectionData(pi, std::move(xi), field);
}

// Maurer-Cartan residual: the grade-2 matrix-valued field with components
//   F_{ij} = L_{v_i} Xi^j - L_{v_j} Xi^i - Xi([dx_i, dx_j]) + [Xi^i, Xi^j],
// v_i = pi# dx_i. Zero iff the action makes sections an Omega^1-module.
inline MatrixMultiVector mc_residual(const ConnectionData& xi) {
  const int n = xi.nvars();
  MatrixMultiVector f = matrix_mv(n, 2, xi.rank());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      PolyMatrix c = detail::field_apply(xi.poisson().sharp_dx(i), xi.xi(j)) -
                     detail::field_apply(xi.poisson().sharp_dx(j), xi.xi(i)) -
                     xi.xi_of(xi.poisson().coordinate_bracket(i, j)) +
                     commutator(xi.xi(i), xi.xi(j));
      if (xi.cap()) c = c.truncate(*xi.cap());
      f.set_component(mask_of({i, j}), c);
    }
  return f;
}

inline bool is_flat(const ConnectionData& xi) { return mc_residual(xi).is_zero(); }

inline void require_flat(const ConnectionData& xi, const char* who) {
  if (!is_flat(xi)) throw NotFlat(std::string(who) + ": Maurer-Cartan residual is nonzero");
}

// [alpha, s] = L_{pi# alpha} s + Xi(alpha) s.
inline Section action(const ConnectionData& xi, const OneForm& a, const Section& s) {
  const auto v = xi.poisson().sharp_components(a);
  PolyMatrix m = xi.xi_of(a);
  Section out(xi.rank(), xi.nvars());
  for (int r = 0; r < xi.rank(); ++r) {
    out[r] = detail::field_apply(v, s[r]);
    for (int c = 0; c < xi.rank(); ++c)
      if (!s[c].is_zero()) out[r] += m(r, c) * s[c];
  }
  return out;
}

// {f, s} = [df, s].
inline Section bracket_action(const ConnectionData& xi, const Poly& f, const Section& s) {
  return action(xi, exterior_d(f), s);
}

// Conormal (isotropy) data at a point: a basis of ker pi#|_p, the matrices
// Xi(alpha)(p), and the bracket table of the conormal Lie algebra.
struct IsotropyData {
  std::vector<std::vector<Scalar>> conormal_basis;  // covector coordinates
  std::vector<ScalarMat> matrices;
  // bracket_table[a][b] = coordinates of [alpha_a, alpha_b]_p in the basis
  std::vector<std::vector<std::vector<Scalar>>> bracket_table;
  bool representation_verified = false;
};

inline IsotropyData isotropy_representation(const ConnectionData& xi,
                                            const std::vector<Scalar>& p) {
  require_flat(xi, "isotropy_representation");
  const int n = xi.nvars();
  if (int(p.size()) != n)
    throw Error(ErrorClass::Validation, "isotropy point has wrong dimension");
  // Kernel of alpha -> pi# alpha at p: rows index j, columns index alpha_i.
  ScalarMat sharp_at(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) sharp_at(j, i) = xi.poisson().pi_component(i, j).eval(p);
  IsotropyData out;
  out.conormal_basis = nullspace(sharp_at);
  const int k = int(out.conormal_basis.size());
  for (const auto& alpha : out.conormal_basis) {
    ScalarMat m(xi.rank(), xi.rank());
    for (int i = 0; i < n; ++i) {
      if (alpha[std::size_t(i)].is_zero()) continue;
      m = m + alpha[std::size_t(i)] * xi.xi(i).eval(p);
    }
    out.matrices.push_back(m);
  }
  // Bracket table via the one-form bracket of constant extensions, evaluated
  // at p and expressed in the kernel basis.
  ScalarMat basis_mat(n, k);
  for (int a = 0; a < k; ++a)
    for (int i = 0; i < n; ++i) basis_mat(i, a) = out.conormal_basis[std::size_t(a)][std::size_t(i)];
  out.bracket_table.assign(std::size_t(k), std::vector<std::vector<Scalar>>(std::size_t(k)));
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      OneForm fa(n), fb(n);
      for (int i = 0; i < n; ++i) {
        fa[i] = Poly::constant(n, out.conormal_basis[std::size_t(a)][std::size_t(i)]);
        fb[i] = Poly::constant(n, out.conormal_basis[std::size_t(b)][std::size_t(i)]);
      }
      std::vector<Scalar> br = xi.poisson().one_form_bracket(fa, fb).eval(p);
      auto coords = solve_linear(basis_mat, br);
      if (!coords)
        throw InternalError("conormal bracket left the kernel of pi# at the point");
      out.bracket_table[std::size_t(a)][std::size_t(b)] = std::move(*coords);
    }
  // Verify the matrices represent the bracket table.
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      ScalarMat lhs = out.matrices[std::size_t(a)] * out.matrices[std::size_t(b)] -
                      out.matrices[std::size_t(b)] * out.matrices[std::size_t(a)];
      ScalarMat rhs(xi.rank(), xi.rank());
      for (int c = 0; c < k; ++c) {
        const Scalar& t = out.bracket_table[std::size_t(a)][std::size_t(b)][std::size_t(c)];
        if (!t.is_zero()) rhs = rhs + t * out.matrices[std::size_t(c)];
      }
      if (!(lhs == rhs))
        throw InternalError("isotropy matrices do not represent the conormal bracket");
    }
  out.representation_verified = true;
  return out;
}

// Searches for a primitive of a scalar multivector within the degree cap:
// d_pi(B) = target with B of one grade lower and coefficient degree <= cap.
// When mod_cap is set the equation is solved modulo degrees above the cap
// (the right semantics for truncated data; for a linear structure the two
// readings coincide since d_pi preserves the coefficient degree).
inline std::optional<ScalarMultiVector> d_pi_primitive(const PoissonStructure& pi,
                                                       const ScalarMultiVector& target, int cap,
                                                       bool mod_cap = false) {
  const int n = pi.nvars();
  const int k = target.grade();
  if (k < 1) return std::nullopt;
  auto dom_masks = subsets_of_size(n, k - 1);
  auto monos = monomials_up_to_degree(n, cap);
  std::vector<ScalarMultiVector> images;
  images.reserve(dom_masks.size() * monos.size());
  for (IndexMask dm : dom_masks)
    for (const Monomial& mono : monos) {
      ScalarMultiVector basis = scalar_mv(n, k - 1);
      basis.set_component(dm, Poly::monomial(n, mono, Scalar(1)));
      ScalarMultiVector img = pi.d_pi(basis);
      images.push_back(mod_cap ? img.truncate(cap) : img);
    }
  // Row space: every (mask, monomial) seen in an image or in the target.
  std::map<std::pair<IndexMask, Monomial>, int,
           decltype([](const auto& a, const auto& b) {
             if (a.first != b.first) return a.first < b.first;
             return grlex_cmp(a.second, b.second) < 0;
           })>
      rows;
  auto note = [&](const ScalarMultiVector& mv) {
    for (const auto& [m, p] : mv.components())
      for (const auto& [mono, c] : p.terms())
        rows.try_emplace({m, mono}, int(rows.size()));
  };
  for (const auto& img : images) note(img);
  note(target);
  ScalarMat a(int(rows.size()), int(images.size()));
  std::vector<Scalar> b(rows.size());
  for (int col = 0; col < int(images.size()); ++col)
    for (const auto& [m, p] : images[std::size_t(col)].components())
      for (const auto& [mono, c] : p.terms()) a(rows.at({m, mono}), col) = c;
  for (const auto& [m, p] : target.components())
    for (const auto& [mono, c] : p.terms()) b[std::size_t(rows.at({m, mono}))] = c;
  auto x = solve_linear(a, b);
  if (!x) return std::nullopt;
  ScalarMultiVector prim = scalar_mv(n, k - 1);
  int col = 0;
  for (IndexMask dm : dom_masks)
    for (const Monomial& mono : monos) {
      const Scalar& c = (*x)[std::size_t(col++)];
      if (!c.is_zero()) prim.add_to(dm, Poly::monomial(n, mono, c));
    }
  return prim;
}

struct CharClassResult {
  ScalarMultiVector value;
  bool closed = false;
  bool exact_up_to_cap = false;
  std::optional<ScalarMultiVector> primitive;
  int exactness_cap = 0;
};

// Secondary characteristic class Xi_c = c o Xi: the grade-(2k-1) multivector
// with component c(Xi^{i_1},...,Xi^{i_{2k-1}}) on {i_1 < ... < i_{2k-1}}.
inline CharClassResult characteristic_class(const ConnectionData& xi, const GlCocycle& c,
                                            std::optional<int> exactness_cap = std::nullopt) {
  require_flat(xi, "characteristic_class");
  const int n = xi.nvars();
  const int g = c.arity();
  CharClassResult res;
  res.value = scalar_mv(n, g);
  for (IndexMask s : subsets_of_size(n, g)) {
    std::vector<PolyMatrix> args;
    for (int i : mask_indices(s)) args.push_back(xi.xi(i));
    Poly v = c.eval(args);
    if (xi.cap()) v = v.truncate(*xi.cap());
    res.value.set_component(s, v);
  }
  ScalarMultiVector d = xi.poisson().d_pi(res.value);
  if (xi.cap()) d = d.truncate(*xi.cap());
  res.closed = d.is_zero();
  res.exactness_cap = exactness_cap ? *exactness_cap : xi.cap() ? *xi.cap() : 6;
  if (res.value.is_zero()) {
    res.exact_up_to_cap = true;
    res.primitive = scalar_mv(n, g - 1 < 0 ? 0 : g - 1);
  } else {
    res.primitive =
        d_pi_primitive(xi.poisson(), res.value, res.exactness_cap, xi.cap().has_value());
    res.exact_up_to_cap = res.primitive.has_value();
  }
  return res;
}

// Canonical line bundle in the coordinate-volume trivialization:
// Xi_can^i = div(pi# dx_i); its trace class is the modular class.
inline ConnectionData canonical_bundle(const PoissonStructure& pi) {
  const int n = pi.nvars();
  std::vector<PolyMatrix> xi;
  for (int i = 0; i < n; ++i) {
    Poly div(n);
    for (int j = 0; j < n; ++j) div += pi.sharp_dx(i)[std::size_t(j)].derivative(j);
    PolyMatrix m(1, n);
    m(0, 0) = div;
    xi.push_back(std::move(m));
  }
  ConnectionData can(pi, std::move(xi), Field::Q);
  if (!is_flat(can)) throw InternalError("canonical bundle failed the Maurer-Cartan check");
  return can;
}

struct HomogeneityReport {
  enum class Status { Ok, WitnessFails, IdentityFails };
  Status status = Status::Ok;
  int witness_failure_coordinate = -1;  // offending alpha = dx_i when WitnessFails
  bool der_xi_ok = false;
  bool identity_ok = false;
};

// Witness verification for homogeneity along a Poisson field X with witness
// operator D_X = L_X + A:
//   (i)  (L_X Xi)(dx_j) = L_{pi# dx_j} A + [Xi^j, A]   for every coordinate j,
//   (ii) b(a_1,...,a_{k-1}) = c(A, Xi(a_1), ..., Xi(a_{k-1})),
//   (iii) d_pi b = -L_X Xi_c, exactly.
inline HomogeneityReport homogeneity_check(const ConnectionData& xi, const ScalarMultiVector& x,
                                           const PolyMatrix& a, const GlCocycle& c) {
  if (x.grade() != 1 || x.nvars() != xi.nvars())
    throw Error(ErrorClass::Validation, "homogeneity_check: X must be a vector field on the base");
  if (!xi.poisson().is_poisson_field(x))
    throw NotPoissonField("homogeneity_check: [pi, X] != 0");
  require_flat(xi, "homogeneity_check");
  const int n = xi.nvars();
  HomogeneityReport rep;
  auto trunc = [&](PolyMatrix m) { return xi.cap() ? m.truncate(*xi.cap()) : m; };
  MatrixMultiVector lxi = lie_derivative(x, xi.as_multivector());
  for (int j = 0; j < n; ++j) {
    PolyMatrix lhs = trunc(lxi.component(IndexMask(1) << j));
    PolyMatrix rhs = trunc(detail::field_apply(xi.poisson().sharp_dx(j), a) +
                           commutator(xi.xi(j), a));
    if (!(lhs == rhs)) {
      rep.status = HomogeneityReport::Status::WitnessFails;
      rep.witness_failure_coordinate = j;
      return rep;
    }
  }
  rep.der_xi_ok = true;
  // b has one argument fewer than c.
  const int g = c.arity() - 1;
  ScalarMultiVector b = scalar_mv(n, g);
  for (IndexMask s : subsets_of_size(n, g)) {
    std::vector<PolyMatrix> args{a};
    for (int i : mask_indices(s)) args.push_back(xi.xi(i));
    Poly v = c.eval(args);
    if (xi.cap()) v = v.truncate(*xi.cap());
    b.set_component(s, v);
  }
  CharClassResult cls = characteristic_class(xi, c, 0);
  ScalarMultiVector lhs = xi.poisson().d_pi(b);
  ScalarMultiVector rhs = -lie_derivative(x, cls.value);
  if (xi.cap()) {
    lhs = lhs.truncate(*xi.cap());
    rhs = rhs.truncate(*xi.cap());
  }
  rep.identity_ok = lhs == rhs;
  rep.status = rep.identity_ok ? HomogeneityReport::Status::Ok
                               : HomogeneityReport::Status::IdentityFails;
  return rep;
}

// Skew-symmetry (Euclidean) or skew-Hermitian (Hermitian) test of all
// components in the fixed trivialization.
inline bool is_unitary(const ConnectionData& xi) {
  for (int i = 0; i < xi.nvars(); ++i) {
    PolyMatrix adj = xi.field() == Field::Qi ? xi.xi(i).adjoint() : xi.xi(i).transpose();
    if (!(adj == -xi.xi(i))) return false;
  }
  return true;
}

// Extension over the product with a standard symplectic fiber: the base
// components are pulled back, the fiber components vanish.
inline ConnectionData product_extension(const ConnectionData& xi, int fiber_half_dim) {
  require_flat(xi, "product_extension");
  const int n = xi.nvars(), nn = n + 2 * fiber_half_dim;
  PoissonStructure prod = xi.poisson().product(fiber_half_dim);
  std::vector<PolyMatrix> comp;
  for (int i = 0; i < n; ++i) comp.push_back(xi.xi(i).extend_vars(nn));
  for (int i = n; i < nn; ++i) comp.push_back(PolyMatrix(xi.rank(), nn));
  return ConnectionData(std::move(prod), std::move(comp), xi.field(), xi.cap());
}

inline ConnectionData restrict_to_base(const ConnectionData& xi, int fiber_half_dim) {
  const int nn = xi.nvars(), n = nn - 2 * fiber_half_dim;
  if (n < 0) throw Error(ErrorClass::Validation, "restrict_to_base: fiber larger than total space");
  for (int i = n; i < nn; ++i)
    if (!xi.xi(i).is_zero())
      throw Error(ErrorClass::Validation, "restrict_to_base: nonzero fiber component");
  ScalarMultiVector base_pi = scalar_mv(n, 2);
  for (const auto& [m, p] : xi.poisson().bivector().components()) {
    if ((m >> n) == 0) {
      base_pi.set_component(m, p.shrink_vars(n));
      continue;
    }
    // only the standard constant symplectic fiber blocks may appear
    auto idx = mask_indices(m);
    bool standard = idx[0] >= n && idx[1] == idx[0] + 1 && (idx[0] - n) % 2 == 0 &&
                    p == Poly::constant(nn, Scalar(1));
    if (!standard)
      throw Error(ErrorClass::Validation,
                  "restrict_to_base: Poisson structure is not a standard product");
  }
  PoissonStructure base(std::move(base_pi), false);
  std::vector<PolyMatrix> comp;
  for (int i = 0; i < n; ++i) comp.push_back(xi.xi(i).shrink_vars(n));
  return ConnectionData(std::move(base), std::move(comp), xi.field(), xi.cap());
}

}  // namespace pvk
