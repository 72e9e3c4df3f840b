#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "shiftlab/finite_vector.hpp"
#include "shiftlab/power_series.hpp"

namespace shiftlab {

// Which part of Z a condition or statistic looks at.
enum class Side { Pos, Neg, All };

enum class Orientation { Bilateral, Unilateral };

enum class ShiftDirection { Forward, Inverse };

// Indices are restricted to |n| <= kIndexLimit so window arithmetic cannot overflow.
inline constexpr std::int64_t kIndexLimit = std::int64_t{1} << 60;

class WeightModel;

namespace weight_family {

struct Constant {
  double c;
};

// w_n = values[(n - anchor) mod P].
struct Periodic {
  std::vector<double> values;
  std::int64_t anchor = 0;
};

// w_n = neg(n) for n < cut and pos(n) for n >= cut.
struct Split {
  std::shared_ptr<const WeightModel> neg;
  std::shared_ptr<const WeightModel> pos;
  std::int64_t cut = 0;
};

// Table on a contiguous index range; negfill below it, posfill above it.
struct Explicit {
  std::map<std::int64_t, double> table;
  double negfill = 1.0;
  double posfill = 1.0;
};

// Unilateral weights w_n = 2^{e_n} of the Koethe construction, e_n exact.
struct FhcBlock {
  std::shared_ptr<const PowerSeriesSpace> space;
};

}  // namespace weight_family

// Eventual periodicity of a weight sequence towards +inf (Pos) or -inf (Neg):
// w_{n+period} = w_n for all n >= start (Pos) or all n <= start (Neg).
struct TailStructure {
  std::int64_t start;
  std::int64_t period;
};

// log2(w_start * ... * w_{start+length-1}).
struct LogProduct {
  double log2 = 0.0;
  std::int64_t start = 0;
  std::int64_t length = 0;
};

// Bounded families (all but FhcBlock) keep lower_bound() <= w_n <= upper_bound().
class WeightModel {
 public:
  using Variant = std::variant<weight_family::Constant, weight_family::Periodic,
                               weight_family::Split, weight_family::Explicit,
                               weight_family::FhcBlock>;

  static WeightModel constant(double c);
  static WeightModel periodic(std::vector<double> values, std::int64_t anchor = 0);
  static WeightModel split(WeightModel neg, WeightModel pos, std::int64_t cut);
  static WeightModel explicit_table(std::map<std::int64_t, double> table, double negfill,
                                    double posfill);
  static WeightModel fhc_block(std::shared_ptr<const PowerSeriesSpace> space);

  const Variant& family() const { return family_; }
  Orientation orientation() const { return orientation_; }
  bool is_bilateral() const { return orientation_ == Orientation::Bilateral; }
  bool is_bounded() const { return bounded_; }
  double lower_bound() const { return lower_; }
  // +inf for FhcBlock.
  double upper_bound() const { return upper_; }

  std::int64_t min_index() const;
  std::int64_t max_index() const;
  bool in_range(std::int64_t n) const { return n >= min_index() && n <= max_index(); }

  // w_n. Throws DomainError outside the declared range, or for FhcBlock
  // weights that do not fit in a double.
  double weight_at(std::int64_t n) const;
  double log2_weight_at(std::int64_t n) const;

  // Eventual periodicity towards +inf / -inf, when the family has one.
  std::optional<TailStructure> tail(Side side) const;

  // Exact limit of the mean of log2 w over long windows on one side, for
  // families whose tail is given symbolically (Constant, Periodic, and Split
  // models built from them).
  std::optional<double> exact_tail_mean(Side side) const;

  // The model w'_n = 1 / w_{1-n}; B_{w'} is isometrically conjugate to B_w^{-1}.
  WeightModel reflected_inverse() const;

  std::string describe() const;

 private:
  WeightModel(Variant family, Orientation orientation, double lower, double upper, bool bounded);

  Variant family_;
  Orientation orientation_;
  double lower_;
  double upper_;
  bool bounded_;
};

// log2 of w_k ... w_{k+L-1}; L = 0 gives the empty product (log 0).
LogProduct log_product(const WeightModel& model, std::int64_t k, std::int64_t length);

// Forward: (B_w x)_n = w_{n+1} x_{n+1}, i.e. e_n -> w_n e_{n-1}.
// Inverse: e_n -> e_{n+1} / w_{n+1}; requires a bilateral model.
FiniteVector apply_shift(const WeightModel& model, const FiniteVector& x, ShiftDirection direction);

// B_w^power x for any integer power (negative powers use the inverse).
FiniteVector apply_shift_power(const WeightModel& model, FiniteVector x, std::int64_t power);

}  // namespace shiftlab
