#pragma once

// Exact Gaussian-rational and approximate complex scalars.

#include <gmpxx.h>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace voxfact {

using Rational = mpq_class;
using Complex = std::complex<double>;

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

/// Parses "p", "p/q" or a plain decimal such as "0.25" into a canonical
/// rational. A zero denominator is rejected.
inline Rational parse_rational(std::string_view text) {
  std::string s = trim(text);
  if (s.empty()) throw ParseError("empty rational literal");
  if (s.front() == '+') s.erase(0, 1);
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    if (s.find('/') != std::string::npos) throw ParseError("malformed rational '" + s + "'");
    bool neg = !s.empty() && s.front() == '-';
    std::string digits = s.substr(neg ? 1 : 0);
    dot = digits.find('.');
    std::string whole = digits.substr(0, dot), frac = digits.substr(dot + 1);
    if (whole.empty()) whole = "0";
    for (char c : whole + frac)
      if (!std::isdigit(static_cast<unsigned char>(c))) throw ParseError("malformed rational '" + s + "'");
    mpz_class num(whole + frac, 10), den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
    Rational r(num, den);
    r.canonicalize();
    return neg ? Rational(-r) : r;
  }
  auto slash = s.find('/');
  auto check_int = [&](const std::string& part) {
    std::size_t i = (!part.empty() && (part[0] == '-' || part[0] == '+')) ? 1 : 0;
    if (i >= part.size()) throw ParseError("malformed rational '" + s + "'");
    for (; i < part.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(part[i]))) throw ParseError("malformed rational '" + s + "'");
  };
  if (slash == std::string::npos) {
    check_int(s);
    return Rational(mpz_class(s));
  }
  std::string num = s.substr(0, slash), den = s.substr(slash + 1);
  check_int(num);
  check_int(den);
  mpz_class d(den);
  if (d == 0) throw ParseError("zero denominator in '" + s + "'");
  Rational r(mpz_class(num), d);
  r.canonicalize();
  return r;
}

inline std::string to_string(const Rational& r) { return r.get_str(); }

/// Exact complex number with rational real and imaginary parts.
class GaussianRational {
 public:
  GaussianRational() = default;
  GaussianRational(long v) : re_(v) {}  // NOLINT(google-explicit-constructor)
  GaussianRational(Rational re, Rational im = 0) : re_(std::move(re)), im_(std::move(im)) {  // NOLINT
    re_.canonicalize();
    im_.canonicalize();
  }

  const Rational& re() const { return re_; }
  const Rational& im() const { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  bool is_real() const { return sgn(im_) == 0; }

  GaussianRational conj() const { return {re_, -im_}; }
  Rational norm2() const { return re_ * re_ + im_ * im_; }

  GaussianRational& operator+=(const GaussianRational& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  GaussianRational& operator-=(const GaussianRational& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  GaussianRational& operator*=(const GaussianRational& o) {
    if (sgn(im_) == 0 && sgn(o.im_) == 0) {
      re_ *= o.re_;
      return *this;
    }
    Rational r = re_ * o.re_ - im_ * o.im_;
    Rational i = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    im_ = std::move(i);
    return *this;
  }
  GaussianRational& operator/=(const GaussianRational& o) { return *this *= o.reciprocal(); }

  GaussianRational reciprocal() const {
    if (is_zero()) throw std::domain_error("reciprocal of zero");
    if (sgn(im_) == 0) return {Rational(1) / re_, 0};
    Rational n = norm2();
    return {re_ / n, -im_ / n};
  }

  friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
  friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
  friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
  friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }
  friend GaussianRational operator-(const GaussianRational& a) { return {-a.re_, -a.im_}; }
  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }
  friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }

  /// Lexicographic order on (re, im); used only for canonical sorting.
  friend int compare(const GaussianRational& a, const GaussianRational& b) {
    int c = cmp(a.re_, b.re_);
    if (c != 0) return c < 0 ? -1 : 1;
    c = cmp(a.im_, b.im_);
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
  }

  Complex to_complex() const { return {re_.get_d(), im_.get_d()}; }

  std::string str() const {
    if (sgn(im_) == 0) return re_.get_str();
    std::string imag;
    if (im_ == 1) imag = "i";
    else if (im_ == -1) imag = "-i";
    else imag = im_.get_str() + "i";
    if (sgn(re_) == 0) return imag;
    return re_.get_str() + (sgn(im_) > 0 ? "+" : "") + imag;
  }

 private:
  Rational re_{0};
  Rational im_{0};
};

inline GaussianRational pow(const GaussianRational& base, long e) {
  if (e < 0) return pow(base.reciprocal(), -e);
  GaussianRational result(1), b = base;
  while (e > 0) {
    if (e & 1) result *= b;
    e >>= 1;
    if (e) b *= b;
  }
  return result;
}

inline Complex ipow(Complex base, long e) {
  if (e < 0) return ipow(1.0 / base, -e);
  Complex result(1.0, 0.0);
  while (e > 0) {
    if (e & 1) result *= base;
    e >>= 1;
    if (e) base *= base;
  }
  return result;
}

/// Parses "a", "bi", "a+bi", "a-bi", "i", "-i" with rational a, b.
inline GaussianRational parse_gaussian(std::string_view text) {
  std::string s = trim(text);
  if (s.empty()) throw ParseError("empty complex literal");
  if (s.back() != 'i') return {parse_rational(s), 0};
  std::string body = s.substr(0, s.size() - 1);
  // split at the last sign that is not leading
  std::size_t split = std::string::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if (body[i] == '+' || body[i] == '-') {
      split = i;
      break;
    }
  }
  auto imag_part = [](std::string t) -> Rational {
    t = trim(t);
    if (t.empty() || t == "+") return 1;
    if (t == "-") return -1;
    return parse_rational(t);
  };
  if (split == std::string::npos) return {0, imag_part(body)};
  return {parse_rational(body.substr(0, split)), imag_part(body.substr(split))};
}


/// Generalized binomial coefficient C(n, k) for integer n (possibly negative)
/// and k >= 0.
inline Rational binomial(long n, long k) {
  if (k < 0) return 0;
  mpz_class num = 1, den = 1;
  for (long i = 0; i < k; ++i) {
    num *= (n - i);
    den *= (i + 1);
  }
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline Rational factorial(long n) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
  return Rational(f);
}

/// Either an exact Gaussian rational or an approximate complex double.
/// Arithmetic between exact values stays exact; any approximate operand
/// makes the result approximate.
class Scalar {
 public:
  Scalar() : v_(GaussianRational(0)) {}
  Scalar(long v) : v_(GaussianRational(v)) {}                         // NOLINT
  Scalar(GaussianRational v) : v_(std::move(v)) {}                    // NOLINT
  Scalar(Rational v) : v_(GaussianRational(std::move(v))) {}          // NOLINT
  Scalar(Complex v) : v_(v) {}                                        // NOLINT

  static Scalar parse(std::string_view s) { return Scalar(parse_gaussian(s)); }

  bool is_exact() const { return std::holds_alternative<GaussianRational>(v_); }
  const GaussianRational& exact() const {
    if (!is_exact()) throw std::logic_error("approximate scalar has no exact value");
    return std::get<GaussianRational>(v_);
  }
  Complex approx() const {
    return is_exact() ? std::get<GaussianRational>(v_).to_complex() : std::get<Complex>(v_);
  }
  bool is_zero() const { return is_exact() ? exact().is_zero() : approx() == Complex(0.0, 0.0); }

  friend Scalar operator+(const Scalar& a, const Scalar& b) {
    if (a.is_exact() && b.is_exact()) return a.exact() + b.exact();
    return a.approx() + b.approx();
  }
  friend Scalar operator-(const Scalar& a, const Scalar& b) {
    if (a.is_exact() && b.is_exact()) return a.exact() - b.exact();
    return a.approx() - b.approx();
  }
  friend Scalar operator*(const Scalar& a, const Scalar& b) {
    if (a.is_exact() && b.is_exact()) return a.exact() * b.exact();
    return a.approx() * b.approx();
  }
  friend Scalar operator/(const Scalar& a, const Scalar& b) {
    if (b.is_zero()) throw std::domain_error("division by zero scalar");
    if (a.is_exact() && b.is_exact()) return a.exact() / b.exact();
    return a.approx() / b.approx();
  }
  friend Scalar operator-(const Scalar& a) {
    if (a.is_exact()) return -a.exact();
    return -a.approx();
  }
  Scalar reciprocal() const { return Scalar(1) / *this; }

  /// Structural equality: exact values compare exactly, approximate ones
  /// bitwise; mixed pairs are never equal.
  friend bool operator==(const Scalar& a, const Scalar& b) {
    if (a.is_exact() != b.is_exact()) return false;
    if (a.is_exact()) return a.exact() == b.exact();
    return a.approx() == b.approx();
  }
  friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

  /// Total order used for canonical sorting: exact before approximate.
  friend int compare(const Scalar& a, const Scalar& b) {
    if (a.is_exact() != b.is_exact()) return a.is_exact() ? -1 : 1;
    if (a.is_exact()) return compare(a.exact(), b.exact());
    auto x = a.approx(), y = b.approx();
    if (x.real() != y.real()) return x.real() < y.real() ? -1 : 1;
    if (x.imag() != y.imag()) return x.imag() < y.imag() ? -1 : 1;
    return 0;
  }

  std::string str() const {
    if (is_exact()) return exact().str();
    auto c = approx();
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.17g%+.17gi", c.real(), c.imag());
    return buf;
  }

 private:
  std::variant<GaussianRational, Complex> v_;
};

inline Scalar pow(const Scalar& base, long e) {
  if (base.is_exact()) return pow(base.exact(), e);
  return ipow(base.approx(), e);
}

/// |z|^2 as a scalar (exact when z is exact).
inline Scalar norm2(const Scalar& z) {
  if (z.is_exact()) return Scalar(z.exact().norm2());
  return Scalar(Complex(std::norm(z.approx()), 0.0));
}

/// Exact square root of a nonnegative rational when it is a perfect square.
inline bool exact_sqrt(const Rational& q, Rational& out) {
  if (sgn(q) < 0) return false;
  mpz_class n = q.get_num(), d = q.get_den();
  if (!mpz_perfect_square_p(n.get_mpz_t()) || !mpz_perfect_square_p(d.get_mpz_t())) return false;
  mpz_class rn, rd;
  mpz_sqrt(rn.get_mpz_t(), n.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), d.get_mpz_t());
  out = Rational(rn, rd);
  out.canonicalize();
  return true;
}

/// |z| as a scalar; exact when |z|^2 is a rational square.
inline Scalar modulus(const Scalar& z) {
  if (z.is_exact()) {
    Rational r;
    if (exact_sqrt(z.exact().norm2(), r)) return Scalar(r);
  }
  return Scalar(Complex(std::abs(z.approx()), 0.0));
}

// Field traits so templated algorithms can run over exact or double data.
template <class K>
struct FieldTraits;

template <>
struct FieldTraits<GaussianRational> {
  static constexpr bool exact = true;
  static GaussianRational from(const Scalar& s) { return s.exact(); }
  static GaussianRational from_rational(const Rational& r) { return GaussianRational(r); }
  static bool is_zero(const GaussianRational& v) { return v.is_zero(); }
  static double magnitude(const GaussianRational& v) { return std::abs(v.to_complex()); }
  static Complex to_complex(const GaussianRational& v) { return v.to_complex(); }
  static GaussianRational power(const GaussianRational& b, long e) { return pow(b, e); }
  static Scalar to_scalar(const GaussianRational& v) { return Scalar(v); }
};

template <>
struct FieldTraits<Complex> {
  static constexpr bool exact = false;
  static Complex from(const Scalar& s) { return s.approx(); }
  static Complex from_rational(const Rational& r) { return {r.get_d(), 0.0}; }
  static bool is_zero(const Complex& v) { return v == Complex(0.0, 0.0); }
  static double magnitude(const Complex& v) { return std::abs(v); }
  static Complex to_complex(const Complex& v) { return v; }
  static Complex power(const Complex& b, long e) { return ipow(b, e); }
  static Scalar to_scalar(const Complex& v) { return Scalar(v); }
};

}  // namespace voxfact
