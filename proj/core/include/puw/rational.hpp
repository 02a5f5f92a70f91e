#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace puw {

// Exact positive rational. Difficulty values and retarget arithmetic use this
// so the consensus-critical path carries no floating-point drift and traces
// print difficulty losslessly.
struct Rational {
  std::uint64_t num = 1;
  std::uint64_t den = 1;

  constexpr Rational() = default;
  Rational(std::uint64_t n, std::uint64_t d) : num(n), den(d) {
    if (n == 0 || d == 0) throw std::invalid_argument("rational must be positive");
    reduce();
  }

  static Rational from_uint(std::uint64_t n) { return Rational(n, 1); }

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

  std::string str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
  }

  void reduce() {
    std::uint64_t g = std::gcd(num, den);
    num /= g;
    den /= g;
  }
};

inline bool operator==(const Rational& a, const Rational& b) {
  return a.num == b.num && a.den == b.den;
}

inline bool rational_less(const Rational& a, const Rational& b) {
  return static_cast<unsigned __int128>(a.num) * b.den <
         static_cast<unsigned __int128>(b.num) * a.den;
}

// Best rational approximation of x with denominator <= max_den (continued
// fractions). Only reached when exact products overflow 64 bits.
Rational rational_approx(double x, std::uint64_t max_den);

// a * b with gcd pre-reduction; falls back to rational_approx on overflow.
Rational rational_mul(const Rational& a, const Rational& b);

inline Rational rational_clamp(const Rational& v, const Rational& lo, const Rational& hi) {
  if (rational_less(v, lo)) return lo;
  if (rational_less(hi, v)) return hi;
  return v;
}

// Parses "n", "n/d", or a plain decimal like "1.5" (converted exactly from
// its digits, not through double).
Rational rational_parse(const std::string& text);  // throws std::invalid_argument

}  // namespace puw
