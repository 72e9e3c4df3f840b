#pragma once

#include <compare>
#include <cstdint>
#include <string>

#include <gmpxx.h>

namespace shiftlab {

// c * 2^A, A an exact big integer, c in [1, 2). v_n and p^{alpha_n} overflow
// any double long before the horizons we care about. Ordering is exact when
// both mantissas are 1.
class LogMagnitude {
 public:
  static LogMagnitude zero() { return LogMagnitude(); }
  static LogMagnitude pow2(mpz_class exponent);
  // Exact decomposition of a positive finite double.
  static LogMagnitude from_double(double x);
  // base^e; exact when base is a power of two, otherwise the mantissa is
  // rounded (exponent computed with MPFR at enough precision to be exact).
  static LogMagnitude power(std::uint64_t base, const mpz_class& e);

  bool is_zero() const { return zero_; }
  // True when the value is an exact power of two.
  bool is_exact_pow2() const { return !zero_ && coefficient_ == 1.0; }
  const mpz_class& exponent() const { return exponent_; }
  double coefficient() const { return coefficient_; }

  // log2 of the value as a double (-inf for zero). Lossy for huge exponents.
  double log2() const;

  LogMagnitude operator*(const LogMagnitude& other) const;

  friend std::strong_ordering operator<=>(const LogMagnitude& a, const LogMagnitude& b);
  friend bool operator==(const LogMagnitude& a, const LogMagnitude& b) {
    return (a <=> b) == std::strong_ordering::equal;
  }

  std::string to_string() const;

 private:
  LogMagnitude() = default;
  LogMagnitude(mpz_class exponent, double coefficient);

  bool zero_ = true;
  mpz_class exponent_ = 0;
  double coefficient_ = 1.0;
};

// Floor and fractional part of e * log2(base), computed with MPFR.
struct Log2Product {
  mpz_class floor;
  double fraction;  // in [0, 1)
};
Log2Product log2_times(std::uint64_t base, const mpz_class& e);

// Exact log2 of base when base is a power of two.
bool is_pow2(std::uint64_t base, unsigned& log2_out);

}  // namespace shiftlab
