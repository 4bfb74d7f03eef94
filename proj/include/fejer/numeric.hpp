#pragma once

// Exact arithmetic used by every bound evaluator: arbitrary-precision
// naturals and rationals plus the handful of integer-valued helpers
// (ceil, floor, truncated subtraction, integer square roots) that the
// rate formulas are written in.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace fejer {

// Expression templates off: lambdas with deduced return types must yield values.
using Nat = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>, boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<boost::multiprecision::rational_adaptor<boost::multiprecision::cpp_int_backend<>>,
                                               boost::multiprecision::et_off>;

inline Nat nat(std::uint64_t v) { return Nat(v); }

inline Rational rat(std::int64_t num, std::int64_t den = 1) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  return Rational(Nat(num), Nat(den));
}

inline Rational rat(const Nat& v) { return Rational(v); }

/// Truncated subtraction a ∸ b = max(a - b, 0).
inline Nat monus(const Nat& a, const Nat& b) { return a > b ? Nat(a - b) : Nat(0); }

inline Nat floor_rat(const Rational& q) {
  Nat n = boost::multiprecision::numerator(q);
  Nat d = boost::multiprecision::denominator(q);
  Nat quot = n / d;  // truncates toward zero
  if (n < 0 && quot * d != n) quot -= 1;
  return quot;
}

inline Nat ceil_rat(const Rational& q) {
  Nat f = floor_rat(q);
  return Rational(f) == q ? f : Nat(f + 1);
}

/// Smallest natural s with s*s >= v.
inline Nat ceil_isqrt(const Nat& v) {
  if (v <= 0) return Nat(0);
  Nat s = boost::multiprecision::sqrt(v);
  return s * s == v ? s : Nat(s + 1);
}

/// Smallest natural s with s*s >= q, i.e. ceil(sqrt(q)) for q >= 0, exactly.
inline Nat ceil_sqrt_rat(const Rational& q) {
  if (q <= 0) return Nat(0);
  Nat n = boost::multiprecision::numerator(q);
  Nat d = boost::multiprecision::denominator(q);
  // s*s >= n/d  <=>  s*s*d >= n; start from ceil(sqrt(n*d))/d and fix up.
  Nat s = ceil_isqrt(n * d) / d;
  while (Rational(s * s) < q) s += 1;
  while (s > 0 && Rational((s - 1) * (s - 1)) >= q) s -= 1;
  return s;
}

/// Smallest natural s with s^n >= q, exactly.
inline Nat ceil_root_rat(const Rational& q, unsigned n) {
  if (n == 0) throw std::invalid_argument("root of order zero");
  if (q <= 0) return Nat(0);
  Nat hi = 1;
  while (Rational(boost::multiprecision::pow(hi, n)) < q) hi *= 2;
  Nat lo = hi / 2;  // lo^n < q <= hi^n, or lo = 0
  while (hi - lo > 1) {
    Nat mid = (lo + hi) / 2;
    (Rational(boost::multiprecision::pow(mid, n)) < q ? lo : hi) = mid;
  }
  return hi;
}

inline Rational pow_rat(const Rational& base, unsigned exp) {
  Rational out(1);
  for (unsigned i = 0; i < exp; ++i) out *= base;
  return out;
}

/// Exact rational value of a finite double.
inline Rational rat_from_double(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("non-finite value has no rational form");
  int exp = 0;
  double mant = std::frexp(v, &exp);
  // mant * 2^53 is an integer for every finite double.
  auto scaled = static_cast<std::int64_t>(std::ldexp(mant, 53));
  Rational out{Nat(scaled)};
  int shift = exp - 53;
  if (shift > 0) out *= Rational(Nat(1) << shift);
  if (shift < 0) out /= Rational(Nat(1) << (-shift));
  return out;
}

namespace detail {
inline Rational parse_plain(const std::string& text) {
  // Digit-by-digit: the cpp_int string constructor reads a leading 0 as octal.
  auto parse_int = [](const std::string& s) {
    if (s.empty() || s == "-" || s == "+") throw std::invalid_argument("bad number: '" + s + "'");
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    Nat v = 0;
    for (; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9') throw std::invalid_argument("bad number: '" + s + "'");
      v = v * 10 + (s[i] - '0');
    }
    return s[0] == '-' ? Nat(-v) : v;
  };
  auto slash = text.find('/');
  if (slash != std::string::npos) {
    Nat den = parse_int(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    return Rational(parse_int(text.substr(0, slash)), den);
  }
  auto dot = text.find('.');
  if (dot == std::string::npos) return Rational(parse_int(text));
  std::string digits = text.substr(0, dot) + text.substr(dot + 1);
  if (digits == "-" || digits.empty()) throw std::invalid_argument("bad number: '" + text + "'");
  Nat den = 1;
  for (std::size_t i = dot + 1; i < text.size(); ++i) den *= 10;
  return Rational(parse_int(digits), den);
}
}  // namespace detail

/// Decimal string "p/q" → Rational, also accepts plain integers and
/// finite decimals such as "0.025" and exponents such as "1e-05".
inline Rational parse_rational(const std::string& raw) {
  std::string text = raw;
  long exp10 = 0;
  if (auto e = text.find_first_of("eE"); e != std::string::npos) {
    std::string ex = text.substr(e + 1);
    if (ex.empty() || ex.find_first_not_of("+-0123456789") != std::string::npos || ex.size() > 6)
      throw std::invalid_argument("bad number: '" + raw + "'");
    exp10 = std::stol(ex);
    text = text.substr(0, e);
    if (text.find('/') != std::string::npos) throw std::invalid_argument("bad number: '" + raw + "'");
  }
  Rational scale(1);
  for (long i = 0; i < std::labs(exp10); ++i) scale *= 10;
  if (exp10 < 0) scale = 1 / scale;
  return detail::parse_plain(text) * scale;
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }
inline double to_double(const Nat& n) { return n.convert_to<double>(); }

inline std::size_t decimal_digits(const Nat& n) {
  if (n == 0) return 1;
  return n.str().size() - (n < 0 ? 1 : 0);
}

/// Decimal rendering; values longer than max_digits are summarised by
/// digit count and leading digits.
inline std::string format_nat(const Nat& n, std::size_t max_digits = 10000, std::size_t lead = 20) {
  std::string s = n.str();
  if (s.size() <= max_digits) return s;
  return s.substr(0, lead) + "...(" + std::to_string(s.size()) + " digits)";
}

/// Fits-in-uint64 conversion; throws when the value does not fit.
inline std::uint64_t to_u64(const Nat& n) {
  if (n < 0 || n > Nat(std::numeric_limits<std::uint64_t>::max()))
    throw std::overflow_error("natural number does not fit in 64 bits: " + format_nat(n, 40));
  return n.convert_to<std::uint64_t>();
}

}  // namespace fejer
