#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

#include "pvk/errors.hpp"

namespace pvk {

// Coefficient field declared by a problem: rationals or Gaussian rationals.
enum class Field { Q, Qi };

inline std::string field_name(Field f) { return f == Field::Q ? "Q" : "Qi"; }

// Exact element of Q(i). Real problems simply keep im == 0. GMP canonicalizes
// to lowest terms with positive denominator, which is the stored invariant.
class Scalar {
public:
  Scalar() : re_(0), im_(0) {}
  Scalar(long v) : re_(v), im_(0) {}  // NOLINT: implicit by design
  Scalar(long num, long den) : re_(num, den), im_(0) {
    if (den == 0) throw ParseError("zero denominator");
    re_.canonicalize();
  }
  Scalar(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im)) {
    re_.canonicalize();
    im_.canonicalize();
  }

  static Scalar i() { return Scalar(mpq_class(0), mpq_class(1)); }

  const mpq_class& re() const { return re_; }
  const mpq_class& im() const { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  bool is_real() const { return sgn(im_) == 0; }
  bool is_one() const { return re_ == 1 && sgn(im_) == 0; }

  Scalar conj() const { return Scalar(re_, -im_); }

  Scalar operator-() const { return Scalar(-re_, -im_); }

  Scalar& operator+=(const Scalar& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  Scalar& operator-=(const Scalar& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  Scalar& operator*=(const Scalar& o) {
    mpq_class r = re_ * o.re_ - im_ * o.im_;
    mpq_class i = re_ * o.im_ + im_ * o.re_;
    re_ = r;
    im_ = i;
    return *this;
  }
  Scalar& operator/=(const Scalar& o) {
    if (o.is_zero()) throw Error(ErrorClass::Internal, "division by zero scalar");
    mpq_class n = o.re_ * o.re_ + o.im_ * o.im_;
    mpq_class r = (re_ * o.re_ + im_ * o.im_) / n;
    mpq_class i = (im_ * o.re_ - re_ * o.im_) / n;
    re_ = r;
    im_ = i;
    return *this;
  }

  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
  friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
  friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }

  friend bool operator==(const Scalar& a, const Scalar& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }
  friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

  // Canonical form: "n", "n/d", "a+b i" as "a+bi" / "a-bi" with rational parts
  // printed like the real case. Round-trips through parse().
  std::string str() const {
    if (sgn(im_) == 0) return rat_str(re_);
    std::string s = rat_str(re_);
    s += sgn(im_) < 0 ? "-" : "+";
    mpq_class a = abs(im_);
    s += rat_str(a);
    s += "i";
    return s;
  }

  static Scalar parse(std::string_view text) {
    if (text.empty()) throw ParseError("empty scalar literal");
    bool imag = text.back() == 'i';
    if (!imag) return Scalar(parse_rat(text), mpq_class(0));
    std::string_view body = text.substr(0, text.size() - 1);
    // Split on the sign separating real and imaginary parts, if present.
    for (std::size_t p = 1; p < body.size(); ++p) {
      if ((body[p] == '+' || body[p] == '-') && body[p - 1] != '/' && body[p - 1] != '+' &&
          body[p - 1] != '-') {
        mpq_class re = parse_rat(body.substr(0, p));
        std::string_view rest = body.substr(p);
        mpq_class im = rest == "+" ? mpq_class(1) : rest == "-" ? mpq_class(-1) : parse_rat(rest);
        return Scalar(re, im);
      }
    }
    // Pure imaginary: "i", "-i", "3/4i".
    if (body.empty()) return Scalar(mpq_class(0), mpq_class(1));
    if (body == "-") return Scalar(mpq_class(0), mpq_class(-1));
    return Scalar(mpq_class(0), parse_rat(body));
  }

private:
  static std::string rat_str(const mpq_class& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
  }

  static mpq_class parse_rat(std::string_view s) {
    if (s.empty()) throw ParseError("empty rational literal");
    std::size_t slash = s.find('/');
    std::string_view num = slash == std::string_view::npos ? s : s.substr(0, slash);
    mpz_class n = parse_int(num);
    if (slash == std::string_view::npos) return mpq_class(n);
    mpz_class d = parse_int(s.substr(slash + 1));
    if (sgn(d) == 0) throw ParseError("zero denominator in \"" + std::string(s) + "\"");
    mpq_class q(n, d);
    q.canonicalize();
    return q;
  }

  static mpz_class parse_int(std::string_view s) {
    if (s.empty()) throw ParseError("empty integer literal");
    std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (start == s.size()) throw ParseError("bare sign in scalar literal");
    for (std::size_t k = start; k < s.size(); ++k)
      if (s[k] < '0' || s[k] > '9')
        throw ParseError("invalid integer literal \"" + std::string(s) + "\"");
    mpz_class z;
    if (z.set_str(std::string(s.substr(start)), 10) != 0)
      throw ParseError("invalid integer literal \"" + std::string(s) + "\"");
    if (s[0] == '-') z = -z;
    return z;
  }

  mpq_class re_, im_;
};

}  // namespace pvk
