#include "shiftlab/log_magnitude.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include <mpfr.h>

#include "shiftlab/errors.hpp"

namespace shiftlab {

namespace {

class MpfrFloat {
 public:
  explicit MpfrFloat(mpfr_prec_t prec) { mpfr_init2(value_, prec); }
  ~MpfrFloat() { mpfr_clear(value_); }
  MpfrFloat(const MpfrFloat&) = delete;
  MpfrFloat& operator=(const MpfrFloat&) = delete;

  mpfr_ptr get() { return value_; }

 private:
  mpfr_t value_;
};

}  // namespace

bool is_pow2(std::uint64_t base, unsigned& log2_out) {
  if (base == 0 || !std::has_single_bit(base)) return false;
  log2_out = static_cast<unsigned>(std::countr_zero(base));
  return true;
}

Log2Product log2_times(std::uint64_t base, const mpz_class& e) {
  if (base == 0) throw PreconditionError("log2 of zero");
  unsigned shift = 0;
  if (is_pow2(base, shift)) return {e * shift, 0.0};
  const auto bits = static_cast<mpfr_prec_t>(mpz_sizeinbase(e.get_mpz_t(), 2)) + 96;
  MpfrFloat t(bits), fl(bits);
  mpfr_set_ui(t.get(), static_cast<unsigned long>(base), MPFR_RNDN);
  mpfr_log2(t.get(), t.get(), MPFR_RNDN);
  mpfr_mul_z(t.get(), t.get(), e.get_mpz_t(), MPFR_RNDN);
  mpfr_floor(fl.get(), t.get());
  Log2Product out;
  mpfr_get_z(out.floor.get_mpz_t(), fl.get(), MPFR_RNDN);
  mpfr_sub(t.get(), t.get(), fl.get(), MPFR_RNDN);
  out.fraction = mpfr_get_d(t.get(), MPFR_RNDN);
  if (out.fraction >= 1.0) {
    out.fraction -= 1.0;
    out.floor += 1;
  }
  return out;
}

LogMagnitude::LogMagnitude(mpz_class exponent, double coefficient)
    : zero_(false), exponent_(std::move(exponent)), coefficient_(coefficient) {
  if (coefficient_ >= 2.0) {
    coefficient_ /= 2.0;
    exponent_ += 1;
  }
}

LogMagnitude LogMagnitude::pow2(mpz_class exponent) { return LogMagnitude(std::move(exponent), 1.0); }

LogMagnitude LogMagnitude::from_double(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("LogMagnitude needs a positive finite value");
  int e = 0;
  const double m = std::frexp(x, &e);  // x = m 2^e, m in [0.5, 1)
  return LogMagnitude(mpz_class(e - 1), 2.0 * m);
}

LogMagnitude LogMagnitude::power(std::uint64_t base, const mpz_class& e) {
  if (base == 0) throw DomainError("0^e is not a positive magnitude");
  if (base == 1) return pow2(0);
  const auto lp = log2_times(base, e);
  return LogMagnitude(lp.floor, std::exp2(lp.fraction));
}

double LogMagnitude::log2() const {
  if (zero_) return -INFINITY;
  return exponent_.get_d() + std::log2(coefficient_);
}

LogMagnitude LogMagnitude::operator*(const LogMagnitude& other) const {
  if (zero_ || other.zero_) return zero();
  return LogMagnitude(exponent_ + other.exponent_, coefficient_ * other.coefficient_);
}

std::strong_ordering operator<=>(const LogMagnitude& a, const LogMagnitude& b) {
  if (a.zero_ || b.zero_) return (!a.zero_) <=> (!b.zero_);
  const int c = cmp(a.exponent_, b.exponent_);
  if (c != 0) return c <=> 0;
  if (a.coefficient_ < b.coefficient_) return std::strong_ordering::less;
  if (a.coefficient_ > b.coefficient_) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::string LogMagnitude::to_string() const {
  if (zero_) return "0";
  std::ostringstream os;
  os.precision(17);
  if (coefficient_ != 1.0) os << coefficient_ << "*";
  os << "2^" << exponent_.get_str();
  return os.str();
}

}  // namespace shiftlab
