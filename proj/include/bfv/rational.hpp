#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>

namespace bfv {

/// Exact rational scalar. All coefficient arithmetic in the library is exact;
/// doubles appear only in the quarantined numeric flow sampler.
using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

inline bool is_zero(const Rational& r) { return r.is_zero(); }

/// Lowest-terms text form, "p" or "p/q", with explicit leading '-' when negative.
inline std::string rational_str(const Rational& r) {
  std::string s = numerator(r).str();
  if (denominator(r) != 1) {
    s += "/";
    s += denominator(r).str();
  }
  return s;
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace bfv
