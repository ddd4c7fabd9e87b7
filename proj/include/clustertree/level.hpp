#pragma once

#include <cmath>
#include <cstdio>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "clustertree/errors.hpp"

namespace clustertree {

/// Exact level type. Doubles convert to it without rounding.
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) {
  return x.convert_to<double>();
}

inline std::string to_exact_string(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
inline std::string to_exact_string(const Rational& x) { return x.str(); }

/// Parses "p", "p/q" or a decimal literal into an exact rational.
inline Rational parse_rational(const std::string& text) {
  try {
    if (text.find_first_of(".eE") != std::string::npos) {
      std::size_t used = 0;
      double v = std::stod(text, &used);
      if (used != text.size() || !std::isfinite(v))
        throw SchemaError("not a number: " + text);
      return Rational(v);
    }
    return Rational(text);
  } catch (const SchemaError&) {
    throw;
  } catch (const std::exception&) {
    throw SchemaError("not a rational: '" + text + "'");
  }
}

template <class Level>
Level level_from_double(double v);

template <>
inline double level_from_double<double>(double v) {
  return v;
}
template <>
inline Rational level_from_double<Rational>(double v) {
  if (!std::isfinite(v)) throw SchemaError("level is not finite");
  return Rational(v);
}

template <class Level>
Level level_from_string(const std::string& text);

template <>
inline Rational level_from_string<Rational>(const std::string& text) {
  return parse_rational(text);
}
template <>
inline double level_from_string<double>(const std::string& text) {
  return to_double(parse_rational(text));
}

template <class Level>
Level abs_diff(const Level& a, const Level& b) {
  return a < b ? Level(b - a) : Level(a - b);
}

}  // namespace clustertree
