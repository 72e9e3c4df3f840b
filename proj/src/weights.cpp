#include "shiftlab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "shiftlab/compensated_sum.hpp"
#include "shiftlab/errors.hpp"

namespace shiftlab {

namespace wf = weight_family;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
  const std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

void require_positive(double w, const char* what) {
  if (!(w > 0.0) || !std::isfinite(w))
    throw PreconditionError(std::string(what) + ": weights must be positive finite reals");
}

std::string fmt_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

WeightModel::WeightModel(Variant family, Orientation orientation, double lower, double upper,
                         bool bounded)
    : family_(std::move(family)),
      orientation_(orientation),
      lower_(lower),
      upper_(upper),
      bounded_(bounded) {}

WeightModel WeightModel::constant(double c) {
  require_positive(c, "constant");
  return WeightModel(wf::Constant{c}, Orientation::Bilateral, c, c, true);
}

WeightModel WeightModel::periodic(std::vector<double> values, std::int64_t anchor) {
  if (values.empty()) throw PreconditionError("periodic: need at least one value");
  for (double v : values) require_positive(v, "periodic");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double lower = *lo, upper = *hi;
  return WeightModel(wf::Periodic{std::move(values), anchor}, Orientation::Bilateral, lower, upper,
                     true);
}

WeightModel WeightModel::split(WeightModel neg, WeightModel pos, std::int64_t cut) {
  if (!neg.is_bilateral() || !pos.is_bilateral())
    throw PreconditionError("split: both sides must be bilateral models");
  if (std::abs(cut) > kIndexLimit) throw PreconditionError("split: cut index out of range");
  const double lower = std::min(neg.lower_bound(), pos.lower_bound());
  const double upper = std::max(neg.upper_bound(), pos.upper_bound());
  return WeightModel(wf::Split{std::make_shared<const WeightModel>(std::move(neg)),
                               std::make_shared<const WeightModel>(std::move(pos)), cut},
                     Orientation::Bilateral, lower, upper, true);
}

WeightModel WeightModel::explicit_table(std::map<std::int64_t, double> table, double negfill,
                                        double posfill) {
  require_positive(negfill, "explicit negfill");
  require_positive(posfill, "explicit posfill");
  double lower = std::min(negfill, posfill), upper = std::max(negfill, posfill);
  if (!table.empty()) {
    const auto first = table.begin()->first, last = table.rbegin()->first;
    if (last - first + 1 != static_cast<std::int64_t>(table.size()))
      throw PreconditionError("explicit: table indices must be contiguous");
    if (std::abs(first) > kIndexLimit || std::abs(last) > kIndexLimit)
      throw PreconditionError("explicit: table index out of range");
  }
  for (const auto& [n, v] : table) {
    require_positive(v, "explicit");
    lower = std::min(lower, v);
    upper = std::max(upper, v);
  }
  return WeightModel(wf::Explicit{std::move(table), negfill, posfill}, Orientation::Bilateral, lower,
                     upper, true);
}

WeightModel WeightModel::fhc_block(std::shared_ptr<const PowerSeriesSpace> space) {
  if (!space) throw PreconditionError("fhc: null space");
  // Every exponent is >= 0 (w_{N_1} = 1 is the smallest weight).
  return WeightModel(wf::FhcBlock{std::move(space)}, Orientation::Unilateral, 1.0,
                     std::numeric_limits<double>::infinity(), false);
}

std::int64_t WeightModel::min_index() const {
  return is_bilateral() ? -kIndexLimit : 0;
}

std::int64_t WeightModel::max_index() const {
  if (const auto* f = std::get_if<wf::FhcBlock>(&family_)) return f->space->horizon();
  return kIndexLimit;
}

double WeightModel::weight_at(std::int64_t n) const {
  if (!in_range(n)) throw DomainError("weight index " + std::to_string(n) + " outside declared range");
  return std::visit(
      overloaded{
          [](const wf::Constant& f) { return f.c; },
          [n](const wf::Periodic& f) {
            return f.values[floor_mod(n - f.anchor, static_cast<std::int64_t>(f.values.size()))];
          },
          [n](const wf::Split& f) { return n < f.cut ? f.neg->weight_at(n) : f.pos->weight_at(n); },
          [n](const wf::Explicit& f) {
            if (auto it = f.table.find(n); it != f.table.end()) return it->second;
            if (f.table.empty()) return n < 0 ? f.negfill : f.posfill;
            return n < f.table.begin()->first ? f.negfill : f.posfill;
          },
          [n](const wf::FhcBlock& f) {
            const mpz_class e = f.space->weight_exponent(n);
            if (e > 1023) throw DomainError("weight 2^" + e.get_str() + " is not representable as a double");
            return std::ldexp(1.0, static_cast<int>(e.get_si()));
          },
      },
      family_);
}

double WeightModel::log2_weight_at(std::int64_t n) const {
  if (const auto* f = std::get_if<wf::FhcBlock>(&family_)) {
    if (!in_range(n)) throw DomainError("weight index " + std::to_string(n) + " outside declared range");
    return f->space->weight_exponent(n).get_d();
  }
  return std::log2(weight_at(n));
}

std::optional<TailStructure> WeightModel::tail(Side side) const {
  if (side == Side::All) throw PreconditionError("tail: side must be Pos or Neg");
  const bool pos = side == Side::Pos;
  return std::visit(
      overloaded{
          [pos](const wf::Constant&) -> std::optional<TailStructure> {
            return TailStructure{pos ? -kIndexLimit : kIndexLimit, 1};
          },
          [pos](const wf::Periodic& f) -> std::optional<TailStructure> {
            return TailStructure{pos ? -kIndexLimit : kIndexLimit,
                                 static_cast<std::int64_t>(f.values.size())};
          },
          [pos, side](const wf::Split& f) -> std::optional<TailStructure> {
            auto t = (pos ? f.pos : f.neg)->tail(side);
            if (!t) return std::nullopt;
            t->start = pos ? std::max(t->start, f.cut) : std::min(t->start, f.cut - 1);
            return t;
          },
          [pos](const wf::Explicit& f) -> std::optional<TailStructure> {
            if (f.table.empty()) return TailStructure{pos ? 0 : -1, 1};
            return TailStructure{pos ? f.table.rbegin()->first + 1 : f.table.begin()->first - 1, 1};
          },
          [](const wf::FhcBlock&) -> std::optional<TailStructure> { return std::nullopt; },
      },
      family_);
}

std::optional<double> WeightModel::exact_tail_mean(Side side) const {
  if (side == Side::All) throw PreconditionError("exact_tail_mean: side must be Pos or Neg");
  return std::visit(
      overloaded{
          [](const wf::Constant& f) -> std::optional<double> { return std::log2(f.c); },
          [](const wf::Periodic& f) -> std::optional<double> {
            CompensatedSum s;
            for (double v : f.values) s.add(std::log2(v));
            return s.value() / static_cast<double>(f.values.size());
          },
          [side](const wf::Split& f) -> std::optional<double> {
            return (side == Side::Pos ? f.pos : f.neg)->exact_tail_mean(side);
          },
          // Explicit tables are data, not a symbolic description; no limit is asserted.
          [](const wf::Explicit&) -> std::optional<double> { return std::nullopt; },
          [](const wf::FhcBlock&) -> std::optional<double> { return std::nullopt; },
      },
      family_);
}

WeightModel WeightModel::reflected_inverse() const {
  return std::visit(
      overloaded{
          [](const wf::Constant& f) { return constant(1.0 / f.c); },
          [](const wf::Periodic& f) {
            const auto p = static_cast<std::int64_t>(f.values.size());
            std::vector<double> values(f.values.size());
            for (std::int64_t i = 0; i < p; ++i) values[i] = 1.0 / f.values[floor_mod(1 - i - f.anchor, p)];
            return periodic(std::move(values), 0);
          },
          [](const wf::Split& f) {
            return split(f.pos->reflected_inverse(), f.neg->reflected_inverse(), 2 - f.cut);
          },
          [](const wf::Explicit& f) {
            std::map<std::int64_t, double> table;
            for (const auto& [n, v] : f.table) table.emplace(1 - n, 1.0 / v);
            return explicit_table(std::move(table), 1.0 / f.posfill, 1.0 / f.negfill);
          },
          [](const wf::FhcBlock&) -> WeightModel {
            throw PreconditionError("reflected_inverse: unilateral model");
          },
      },
      family_);
}

std::string WeightModel::describe() const {
  return std::visit(
      overloaded{
          [](const wf::Constant& f) { return "constant:" + fmt_double(f.c); },
          [](const wf::Periodic& f) {
            std::string s = "periodic:";
            for (std::size_t i = 0; i < f.values.size(); ++i) s += (i ? "," : "") + fmt_double(f.values[i]);
            return s + "@" + std::to_string(f.anchor);
          },
          [](const wf::Split& f) {
            return "split:neg=(" + f.neg->describe() + ");pos=(" + f.pos->describe() +
                   ");cut=" + std::to_string(f.cut);
          },
          [](const wf::Explicit& f) {
            std::string s = "explicit:<table of " + std::to_string(f.table.size()) + ">";
            return s + ";negfill=" + fmt_double(f.negfill) + ";posfill=" + fmt_double(f.posfill);
          },
          [](const wf::FhcBlock& f) {
            return "fhc:blocks=" + f.space->rule().to_string() +
                   ";horizon=" + std::to_string(f.space->horizon());
          },
      },
      family_);
}

LogProduct log_product(const WeightModel& model, std::int64_t k, std::int64_t length) {
  if (length < 0) throw DomainError("log_product: negative window length");
  LogProduct out{0.0, k, length};
  if (length == 0) return out;
  if (k < model.min_index() || k > model.max_index() || length - 1 > model.max_index() - k)
    throw DomainError("log_product: window [" + std::to_string(k) + ", " +
                      std::to_string(k + length - 1) + "] outside declared range");
  if (const auto* f = std::get_if<wf::FhcBlock>(&model.family())) {
    mpz_class e = 0;
    for (std::int64_t n = k; n < k + length; ++n) e += f->space->weight_exponent(n);
    out.log2 = e.get_d();
    return out;
  }
  CompensatedSum s;
  for (std::int64_t n = k; n < k + length; ++n) s.add(model.log2_weight_at(n));
  out.log2 = s.value();
  return out;
}

FiniteVector apply_shift(const WeightModel& model, const FiniteVector& x, ShiftDirection direction) {
  FiniteVector out(x.norm_kind());
  if (direction == ShiftDirection::Forward) {
    for (const auto& [n, v] : x.coefficients()) {
      if (!model.is_bilateral() && n == 0) continue;
      out.add(n - 1, model.weight_at(n) * v);
    }
    return out;
  }
  if (!model.is_bilateral() || !(model.lower_bound() > 0.0))
    throw PreconditionError("inverse shift requires an invertible bilateral model");
  for (const auto& [n, v] : x.coefficients()) out.add(n + 1, v / model.weight_at(n + 1));
  return out;
}

FiniteVector apply_shift_power(const WeightModel& model, FiniteVector x, std::int64_t power) {
  const auto dir = power >= 0 ? ShiftDirection::Forward : ShiftDirection::Inverse;
  for (std::int64_t i = 0; i < std::abs(power); ++i) x = apply_shift(model, x, dir);
  return x;
}

}  // namespace shiftlab
