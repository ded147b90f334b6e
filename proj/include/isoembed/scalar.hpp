#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

#include "isoembed/error.hpp"

namespace isoembed {

/// Arbitrary-precision rational backed by GMP. Expression templates are off so
/// that `auto` in generic code always yields a value.
using rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using big_int = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;

enum class backend { rational, floating };

inline std::string to_string(backend b) { return b == backend::rational ? "rational" : "float"; }

inline backend parse_backend(std::string_view s) {
  if (s == "rational") return backend::rational;
  if (s == "float") return backend::floating;
  throw parse_error("unknown backend '" + std::string(s) + "' (expected rational|float)");
}

/// Numeric thresholds for the floating backend. The exact backend ignores them.
struct tolerance {
  /// rank decisions: pivots below rank_rel * largest pivot count as zero
  double rank_rel = 1e-9;
  /// residual acceptance, relative to max(1, |target|)
  double residual_rel = 1e-10;
};

namespace detail {

/// Parses "[-]digits[.digits][e[+-]digits]" exactly.
inline rational parse_decimal_exact(std::string_view s) {
  std::size_t i = 0;
  bool negative = false;
  if (i < s.size() && (s[i] == '-' || s[i] == '+')) negative = s[i++] == '-';
  std::string digits;
  long long frac_digits = 0;
  bool seen_digit = false;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
    digits += s[i++];
    seen_digit = true;
  }
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      digits += s[i++];
      ++frac_digits;
      seen_digit = true;
    }
  }
  if (!seen_digit) throw parse_error("malformed number '" + std::string(s) + "'");
  long long exponent = 0;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    auto [ptr, ec] = std::from_chars(s.data() + i, s.data() + s.size(), exponent);
    if (ec != std::errc() || ptr == s.data() + i)
      throw parse_error("malformed exponent in '" + std::string(s) + "'");
    i = static_cast<std::size_t>(ptr - s.data());
  }
  if (i != s.size()) throw parse_error("trailing characters in number '" + std::string(s) + "'");
  exponent -= frac_digits;
  if (exponent > 100000 || exponent < -100000)
    throw parse_error("exponent out of range in '" + std::string(s) + "'");
  // a leading zero would make the big-integer parser read octal
  const auto nz = digits.find_first_not_of('0');
  rational value{big_int(nz == std::string::npos ? std::string("0") : digits.substr(nz))};
  big_int scale = boost::multiprecision::pow(big_int(10), static_cast<unsigned>(std::llabs(exponent)));
  if (exponent >= 0)
    value *= rational(scale);
  else
    value /= rational(scale);
  return negative ? rational(-value) : value;
}

inline big_int parse_integer(std::string_view s, std::string_view whole) {
  std::size_t i = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
  if (i == s.size()) throw parse_error("malformed rational '" + std::string(whole) + "'");
  for (std::size_t j = i; j < s.size(); ++j)
    if (!std::isdigit(static_cast<unsigned char>(s[j])))
      throw parse_error("malformed rational '" + std::string(whole) + "'");
  const bool neg = s[0] == '-';
  std::string text(s.substr(i));
  const auto nz = text.find_first_not_of('0');
  text = nz == std::string::npos ? std::string("0") : text.substr(nz);
  return neg ? big_int(-big_int(text)) : big_int(text);
}

}  // namespace detail

/// True when `s` is an integer or a "p/q" literal (no decimal point or exponent).
inline bool is_rational_literal(std::string_view s) {
  return s.find_first_of(".eE") == std::string_view::npos;
}

/// Exact parse of "p/q", integers and finite decimals.
inline rational parse_rational(std::string_view s) {
  auto slash = s.find('/');
  if (slash == std::string_view::npos) return detail::parse_decimal_exact(s);
  big_int num = detail::parse_integer(s.substr(0, slash), s);
  big_int den = detail::parse_integer(s.substr(slash + 1), s);
  if (den == 0) throw parse_error("zero denominator in '" + std::string(s) + "'");
  return rational(num) / rational(den);
}

inline double rational_to_double(const rational& r) {
  // num/den is correctly rounded when both sides are exact doubles
  const big_int num = boost::multiprecision::numerator(r);
  const big_int den = boost::multiprecision::denominator(r);
  const big_int limit = big_int(1) << 53;
  if (boost::multiprecision::abs(num) <= limit && den <= limit)
    return num.convert_to<double>() / den.convert_to<double>();
  return r.convert_to<double>();
}

template <class T>
struct scalar_traits;

template <>
struct scalar_traits<double> {
  static constexpr bool exact = false;
  static constexpr backend kind = backend::floating;

  static double abs(double x) { return std::fabs(x); }
  static double to_double(double x) { return x; }
  static double from_rational(const rational& r) { return rational_to_double(r); }
  static double from_int(long long v) { return static_cast<double>(v); }

  /// Shortest representation that parses back to the same double.
  static std::string format(double x) {
    if (!std::isfinite(x)) throw numeric_error("non-finite value cannot be serialized");
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc()) throw numeric_error("double formatting failed");
    return std::string(buf, ptr);
  }

  static double parse(std::string_view s) {
    if (s.find('/') != std::string_view::npos) return rational_to_double(parse_rational(s));
    double value = 0;
    const char* first = s.data();
    if (!s.empty() && s[0] == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || first == s.data() + s.size())
      throw parse_error("malformed number '" + std::string(s) + "'");
    return value;
  }

  static bool is_zero(double x, double scale, const tolerance& tol) {
    return std::fabs(x) <= tol.rank_rel * scale;
  }
};

template <>
struct scalar_traits<rational> {
  static constexpr bool exact = true;
  static constexpr backend kind = backend::rational;

  static rational abs(const rational& x) { return boost::multiprecision::abs(x); }
  static double to_double(const rational& x) { return rational_to_double(x); }
  static rational from_rational(const rational& r) { return r; }
  static rational from_int(long long v) { return rational(v); }

  static std::string format(const rational& x) { return x.str(); }
  static rational parse(std::string_view s) { return parse_rational(s); }

  static bool is_zero(const rational& x, const rational&, const tolerance&) { return x == 0; }
};

template <class T>
concept scalar = requires { scalar_traits<T>::exact; };

template <scalar T>
std::string format_scalar(const T& x) {
  return scalar_traits<T>::format(x);
}

template <scalar T>
T parse_scalar(std::string_view s) {
  return scalar_traits<T>::parse(s);
}

}  // namespace isoembed
