#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "pvk/errors.hpp"
#include "pvk/linalg.hpp"
#include "pvk/scalar.hpp"

namespace pvk {

// Exponent vector of a monomial in n commuting variables.
struct Monomial {
  std::vector<int> e;

  int degree() const {
    int d = 0;
    for (int k : e) d += k;
    return d;
  }
  friend bool operator==(const Monomial& a, const Monomial& b) { return a.e == b.e; }
};

// Graded lexicographic order: compare by total degree, then lexicographically
// with x1 > x2 > ... . This is the canonical term order everywhere.
inline int grlex_cmp(const Monomial& a, const Monomial& b) {
  int da = a.degree(), db = b.degree();
  if (da != db) return da < db ? -1 : 1;
  for (std::size_t k = 0; k < a.e.size(); ++k)
    if (a.e[k] != b.e[k]) return a.e[k] < b.e[k] ? -1 : 1;
  return 0;
}

struct GrlexLess {
  bool operator()(const Monomial& a, const Monomial& b) const { return grlex_cmp(a, b) < 0; }
};

// Multivariate polynomial over Scalar. Terms are kept grlex-ascending with no
// zero coefficients, so equal polynomials have identical representations.
class Poly {
public:
  Poly() : n_(0) {}
  explicit Poly(int nvars) : n_(nvars) {}

  static Poly constant(int nvars, Scalar c) {
    Poly p(nvars);
    if (!c.is_zero()) p.terms_.push_back({Monomial{std::vector<int>(std::size_t(nvars), 0)}, c});
    return p;
  }
  static Poly variable(int nvars, int i, Scalar c = Scalar(1)) {
    Monomial m{std::vector<int>(std::size_t(nvars), 0)};
    m.e[std::size_t(i)] = 1;
    return monomial(nvars, m, c);
  }
  static Poly monomial(int nvars, Monomial m, Scalar c) {
    Poly p(nvars);
    if (!c.is_zero()) p.terms_.push_back({std::move(m), std::move(c)});
    return p;
  }

  int nvars() const { return n_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && degree() == 0); }
  std::size_t term_count() const { return terms_.size(); }
  const std::vector<std::pair<Monomial, Scalar>>& terms() const { return terms_; }

  // Total degree; -1 for the zero polynomial.
  int degree() const { return terms_.empty() ? -1 : terms_.back().first.degree(); }

  Scalar constant_term() const {
    if (!terms_.empty() && terms_.front().first.degree() == 0) return terms_.front().second;
    return Scalar(0);
  }
  Scalar coeff(const Monomial& m) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                               [](const auto& t, const Monomial& mm) {
                                 return grlex_cmp(t.first, mm) < 0;
                               });
    if (it != terms_.end() && it->first == m) return it->second;
    return Scalar(0);
  }

  bool is_homogeneous(int r) const {
    for (const auto& [m, c] : terms_)
      if (m.degree() != r) return false;
    return true;
  }

  friend Poly operator-(const Poly& p) {
    Poly q(p.n_);
    q.terms_.reserve(p.terms_.size());
    for (const auto& [m, c] : p.terms_) q.terms_.push_back({m, -c});
    return q;
  }

  friend Poly operator+(const Poly& a, const Poly& b) { return merged(a, b, false); }
  friend Poly operator-(const Poly& a, const Poly& b) { return merged(a, b, true); }
  Poly& operator+=(const Poly& o) { return *this = *this + o; }
  Poly& operator-=(const Poly& o) { return *this = *this - o; }

  friend Poly operator*(const Scalar& s, const Poly& p) {
    Poly q(p.n_);
    if (s.is_zero()) return q;
    q.terms_.reserve(p.terms_.size());
    for (const auto& [m, c] : p.terms_) q.terms_.push_back({m, s * c});
    return q;
  }

  friend Poly operator*(const Poly& a, const Poly& b) {
    check_vars(a, b);
    std::map<Monomial, Scalar, GrlexLess> acc;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) {
        Monomial m = ma;
        for (std::size_t k = 0; k < m.e.size(); ++k) m.e[k] += mb.e[k];
        auto [it, fresh] = acc.try_emplace(std::move(m), ca * cb);
        if (!fresh) it->second += ca * cb;
      }
    Poly q(a.n_);
    for (auto& [m, c] : acc)
      if (!c.is_zero()) q.terms_.push_back({m, std::move(c)});
    return q;
  }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }

  friend bool operator==(const Poly& a, const Poly& b) {
    return a.n_ == b.n_ && a.terms_ == b.terms_;
  }
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

  Poly derivative(int var) const {
    Poly q(n_);
    for (const auto& [m, c] : terms_) {
      int e = m.e[std::size_t(var)];
      if (e == 0) continue;
      Monomial mm = m;
      --mm.e[std::size_t(var)];
      q.terms_.push_back({std::move(mm), Scalar(e) * c});
    }
    // Dropping one exponent preserves grlex order between surviving terms.
    std::sort(q.terms_.begin(), q.terms_.end(),
              [](const auto& x, const auto& y) { return grlex_cmp(x.first, y.first) < 0; });
    return q;
  }

  Scalar eval(const std::vector<Scalar>& x) const {
    Scalar acc(0);
    for (const auto& [m, c] : terms_) {
      Scalar t = c;
      for (std::size_t k = 0; k < m.e.size(); ++k)
        for (int p = 0; p < m.e[k]; ++p) t *= x[k];
      acc += t;
    }
    return acc;
  }

  Poly truncate(int max_degree) const {
    Poly q(n_);
    for (const auto& t : terms_) {
      if (t.first.degree() > max_degree) break;  // terms are degree-sorted
      q.terms_.push_back(t);
    }
    return q;
  }

  Poly homogeneous_part(int r) const {
    Poly q(n_);
    for (const auto& t : terms_)
      if (t.first.degree() == r) q.terms_.push_back(t);
    return q;
  }

  Poly conj() const {
    Poly q(n_);
    q.terms_.reserve(terms_.size());
    for (const auto& [m, c] : terms_) q.terms_.push_back({m, c.conj()});
    return q;
  }

  bool has_real_coefficients() const {
    for (const auto& [m, c] : terms_)
      if (!c.is_real()) return false;
    return true;
  }

  // Reinterprets the polynomial in a larger variable set (new variables last).
  Poly extend_vars(int new_nvars) const {
    Poly q(new_nvars);
    q.terms_.reserve(terms_.size());
    for (const auto& [m, c] : terms_) {
      Monomial mm = m;
      mm.e.resize(std::size_t(new_nvars), 0);
      q.terms_.push_back({std::move(mm), c});
    }
    return q;
  }

  // Drops trailing variables; every term must have zero exponents there.
  Poly shrink_vars(int new_nvars) const {
    Poly q(new_nvars);
    for (const auto& [m, c] : terms_) {
      for (std::size_t k = std::size_t(new_nvars); k < m.e.size(); ++k)
        if (m.e[k] != 0)
          throw Error(ErrorClass::Validation, "polynomial depends on a dropped variable");
      Monomial mm{std::vector<int>(m.e.begin(), m.e.begin() + new_nvars)};
      q.terms_.push_back({std::move(mm), c});
    }
    std::sort(q.terms_.begin(), q.terms_.end(),
              [](const auto& x, const auto& y) { return grlex_cmp(x.first, y.first) < 0; });
    return q;
  }

  // Canonical text form, leading term first: "2*x1^2*x2 - 1/3*x3 + 5".
  std::string str() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      const auto& [m, c] = *it;
      std::string cs = c.str();
      bool neg = !cs.empty() && cs[0] == '-' && c.is_real();
      if (out.empty())
        out += neg ? "-" : "";
      else
        out += neg ? " - " : " + ";
      if (neg) cs = cs.substr(1);
      std::string mono = monomial_str(m);
      if (mono.empty())
        out += cs;
      else if (cs == "1")
        out += mono;
      else
        out += (c.is_real() ? cs : "(" + c.str() + ")") + "*" + mono;
    }
    return out;
  }

private:
  static std::string monomial_str(const Monomial& m) {
    std::string s;
    for (std::size_t k = 0; k < m.e.size(); ++k) {
      if (m.e[k] == 0) continue;
      if (!s.empty()) s += "*";
      s += "x" + std::to_string(k + 1);
      if (m.e[k] > 1) s += "^" + std::to_string(m.e[k]);
    }
    return s;
  }

  static void check_vars(const Poly& a, const Poly& b) {
    if (a.n_ != b.n_) throw Error(ErrorClass::Validation, "variable-count mismatch");
  }

  static Poly merged(const Poly& a, const Poly& b, bool subtract) {
    check_vars(a, b);
    Poly q(a.n_);
    q.terms_.reserve(a.terms_.size() + b.terms_.size());
    std::size_t i = 0, j = 0;
    while (i < a.terms_.size() || j < b.terms_.size()) {
      int c;
      if (i == a.terms_.size())
        c = 1;
      else if (j == b.terms_.size())
        c = -1;
      else
        c = grlex_cmp(a.terms_[i].first, b.terms_[j].first);
      if (c < 0) {
        q.terms_.push_back(a.terms_[i++]);
      } else if (c > 0) {
        auto t = b.terms_[j++];
        if (subtract) t.second = -t.second;
        q.terms_.push_back(std::move(t));
      } else {
        Scalar s = subtract ? a.terms_[i].second - b.terms_[j].second
                            : a.terms_[i].second + b.terms_[j].second;
        if (!s.is_zero()) q.terms_.push_back({a.terms_[i].first, std::move(s)});
        ++i, ++j;
      }
    }
    return q;
  }

  int n_;
  std::vector<std::pair<Monomial, Scalar>> terms_;
};

// Monomials of exact degree r in n variables, grlex-ascending. This is the
// canonical basis ordering used by homogeneous-component solves.
inline std::vector<Monomial> monomials_of_degree(int nvars, int r) {
  std::vector<Monomial> out;
  Monomial m{std::vector<int>(std::size_t(nvars), 0)};
  // Enumerate all exponent vectors summing to r, then sort canonically.
  std::vector<int> e(std::size_t(nvars), 0);
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == nvars - 1) {
      e[std::size_t(pos)] = left;
      out.push_back(Monomial{e});
      return;
    }
    for (int k = 0; k <= left; ++k) {
      e[std::size_t(pos)] = k;
      self(self, pos + 1, left - k);
    }
  };
  if (nvars == 0) {
    if (r == 0) out.push_back(m);
    return out;
  }
  rec(rec, 0, r);
  std::sort(out.begin(), out.end(), GrlexLess{});
  return out;
}

inline std::vector<Monomial> monomials_up_to_degree(int nvars, int cap) {
  std::vector<Monomial> out;
  for (int r = 0; r <= cap; ++r) {
    auto part = monomials_of_degree(nvars, r);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

}  // namespace pvk
