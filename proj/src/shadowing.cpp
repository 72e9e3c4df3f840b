#include "shiftlab/shadowing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "shiftlab/errors.hpp"
#include "shiftlab/rng.hpp"

namespace shiftlab {

namespace {

void require_invertible(const WeightModel& model) {
  if (!model.is_bilateral() || !(model.lower_bound() > 0.0) || !model.is_bounded())
    throw PreconditionError("pseudotrajectories need an invertible bilateral weighted shift");
}

FiniteVector random_defect(std::int64_t T, double delta, std::mt19937_64& rng, NormKind norm) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  std::uniform_int_distribution<std::int64_t> index(-T - 2, T + 2);
  std::uniform_int_distribution<int> count(1, 4);
  const double size = delta * unit(rng);
  FiniteVector d(norm);
  const int c = count(rng);
  for (int i = 0; i < c; ++i) d.add(index(rng), value(rng));
  const double nd = d.norm();
  if (nd == 0.0 || size == 0.0) return FiniteVector(norm);
  d *= size / nd;
  return d;
}

// Minimum of a convex function on [lo, hi] by golden-section search.
template <typename F>
double argmin_convex(F&& f, double lo, double hi) {
  constexpr double kInvPhi = 0.6180339887498949;
  if (!(hi > lo)) return lo;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a) + std::abs(b)); ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? c : d;
}

}  // namespace

std::string to_string(DefectStyle s) {
  return s == DefectStyle::Random ? "random" : "adversarial";
}

DefectStyle parse_defect_style(const std::string& text) {
  if (text == "random") return DefectStyle::Random;
  if (text == "adversarial" || text == "constant-at-0") return DefectStyle::ConstantAtZero;
  throw ParseError(0, "unknown defect style '" + text + "'");
}

Pseudotrajectory make_pseudotrajectory_from_defects(const WeightModel& model,
                                                    const FiniteVector& x_start,
                                                    std::vector<FiniteVector> defects,
                                                    double delta) {
  require_invertible(model);
  if (defects.size() < 2 || defects.size() % 2 != 0)
    throw PreconditionError("need defects d_{-T}, ..., d_{T-1} with T >= 1");
  const auto T = static_cast<std::int64_t>(defects.size() / 2);
  Pseudotrajectory pt;
  pt.T = T;
  pt.delta = delta;
  pt.norm = x_start.norm_kind();
  pt.defects = std::move(defects);
  for (auto& d : pt.defects) d.set_norm_kind(pt.norm);
  pt.points.assign(static_cast<std::size_t>(2 * T + 1), FiniteVector(pt.norm));
  pt.points[static_cast<std::size_t>(T)] = x_start;
  for (std::int64_t n = 0; n < T; ++n) {
    auto next = apply_shift(model, pt.x(n), ShiftDirection::Forward) + pt.d(n);
    pt.points[static_cast<std::size_t>(n + 1 + T)] = std::move(next);
  }
  for (std::int64_t n = 0; n > -T; --n) {
    auto prev = apply_shift(model, pt.x(n) - pt.d(n - 1), ShiftDirection::Inverse);
    pt.points[static_cast<std::size_t>(n - 1 + T)] = std::move(prev);
  }
  for (auto& x : pt.points) x.set_norm_kind(pt.norm);
  return pt;
}

Pseudotrajectory make_pseudotrajectory(const WeightModel& model, const FiniteVector& x_start,
                                       double delta, std::int64_t T, std::uint64_t seed,
                                       DefectStyle style) {
  if (!(delta >= 0.0)) throw PreconditionError("delta must be >= 0");
  if (T < 1) throw PreconditionError("T must be >= 1");
  const auto norm = x_start.norm_kind();
  std::vector<FiniteVector> defects;
  for (std::int64_t n = -T; n < T; ++n) {
    if (style == DefectStyle::ConstantAtZero) {
      defects.push_back(delta > 0.0 ? FiniteVector::basis(0, delta, norm) : FiniteVector(norm));
    } else {
      auto rng = stream_rng(seed, static_cast<std::uint64_t>(n + T));
      defects.push_back(random_defect(T, delta, rng, norm));
    }
  }
  auto pt = make_pseudotrajectory_from_defects(model, x_start, std::move(defects), delta);
  pt.seed = seed;
  pt.style = style;
  return pt;
}

Pseudotrajectory scale_defects(const WeightModel& model, const Pseudotrajectory& pt, double c) {
  auto defects = pt.defects;
  for (auto& d : defects) d *= c;
  auto out = make_pseudotrajectory_from_defects(model, pt.x(0), std::move(defects), pt.delta * std::abs(c));
  out.seed = pt.seed;
  out.style = pt.style;
  return out;
}

Splitting Splitting::from_verdict(Verdict v) {
  switch (v) {
    case Verdict::A: return {Kind::AllStable};
    case Verdict::B: return {Kind::AllUnstable};
    case Verdict::C: return {Kind::Dichotomy};
    default: break;
  }
  throw PreconditionError("no splitting: the shift is not classified A, B or C");
}

bool Splitting::stable(std::int64_t n) const {
  switch (kind) {
    case Kind::AllStable: return true;
    case Kind::AllUnstable: return false;
    case Kind::Dichotomy: return n < 0;
  }
  return false;
}

FiniteVector Splitting::project_stable(const FiniteVector& x) const {
  FiniteVector out(x.norm_kind());
  for (const auto& [n, v] : x.coefficients())
    if (stable(n)) out.set(n, v);
  return out;
}

FiniteVector Splitting::project_unstable(const FiniteVector& x) const {
  FiniteVector out(x.norm_kind());
  for (const auto& [n, v] : x.coefficients())
    if (!stable(n)) out.set(n, v);
  return out;
}

std::string Splitting::name() const {
  switch (kind) {
    case Kind::AllStable: return "all-stable";
    case Kind::AllUnstable: return "all-unstable";
    case Kind::Dichotomy: return "stable n<0, unstable n>=0";
  }
  return "?";
}

namespace {

// sum_{n>=0} of the largest r-step norms on one side, or 0 when the side is empty.
double side_constant(const WeightModel& model, Side side, bool inverse, const ClassifyOptions& options,
                     std::int64_t& length) {
  std::vector<double> a{0.0};
  for (std::int64_t len = 1; len <= options.n_max; ++len) {
    const double stat = window_statistic(model, len, side, inverse ? Extremum::Inf : Extremum::Sup, options.k_max);
    const double a_len = (inverse ? -stat : stat) * static_cast<double>(len);
    if (a_len < 0.0) {
      length = len;
      double head = 0.0;
      for (double ar : a) head += std::exp2(ar);
      return head / (1.0 - std::exp2(a_len));
    }
    a.push_back(a_len);
  }
  throw PreconditionError("no contraction certified on the " + to_string(side) + " side within n_max");
}

}  // namespace

ShadowConstant shadow_constant(const WeightModel& model, const Splitting& splitting,
                               const ClassifyOptions& options) {
  ShadowConstant c;
  switch (splitting.kind) {
    case Splitting::Kind::AllStable:
      c.stable = side_constant(model, Side::All, false, options, c.stable_length);
      break;
    case Splitting::Kind::AllUnstable:
      c.unstable = side_constant(model, Side::All, true, options, c.unstable_length);
      break;
    case Splitting::Kind::Dichotomy:
      // B^r e_k with k <= -1 multiplies by w_k ... w_{k-r+1}; B^{-r} e_k with
      // k >= 0 divides by w_{k+1} ... w_{k+r}.
      c.stable = side_constant(model, Side::Neg, false, options, c.stable_length);
      c.unstable = side_constant(model, Side::Pos, true, options, c.unstable_length);
      break;
  }
  return c;
}

double shadow_error(const WeightModel& model, const FiniteVector& x, const Pseudotrajectory& pt) {
  double worst = 0.0;
  FiniteVector y = x;
  y.set_norm_kind(pt.norm);
  for (std::int64_t n = 0; n <= pt.T; ++n) {
    if (n > 0) y = apply_shift(model, y, ShiftDirection::Forward);
    worst = std::max(worst, y.distance(pt.x(n)));
  }
  y = x;
  y.set_norm_kind(pt.norm);
  for (std::int64_t n = -1; n >= -pt.T; --n) {
    y = apply_shift(model, y, ShiftDirection::Inverse);
    worst = std::max(worst, y.distance(pt.x(n)));
  }
  return worst;
}

ShadowResult shadow(const WeightModel& model, const Pseudotrajectory& pt,
                    const ClassificationReport& report) {
  ShadowResult out;
  out.splitting = Splitting::from_verdict(report.verdict);
  out.constant = shadow_constant(model, out.splitting, report.options);
  FiniteVector corr(pt.norm);
  for (std::int64_t j = 0; j < pt.T; ++j) {
    auto u = out.splitting.project_unstable(pt.d(j));
    if (!u.empty()) corr += apply_shift_power(model, std::move(u), -(j + 1));
  }
  for (std::int64_t i = 1; i <= pt.T; ++i) {
    auto s = out.splitting.project_stable(pt.d(-i));
    if (!s.empty()) corr -= apply_shift_power(model, std::move(s), i - 1);
  }
  corr.set_norm_kind(pt.norm);
  out.correction = corr;
  out.x = pt.x(0) + corr;
  out.x.set_norm_kind(pt.norm);
  out.error = shadow_error(model, out.x, pt);
  out.bound = out.constant.total() * pt.delta;
  double biggest = out.x.norm();
  for (const auto& p : pt.points) biggest = std::max(biggest, p.norm());
  out.resolution = static_cast<double>(2 * pt.T + 1) * std::numeric_limits<double>::epsilon() * biggest;
  return out;
}

WindowShadow best_window_shadow(const WeightModel& model, const Pseudotrajectory& pt) {
  const std::int64_t T = pt.T;
  if (T > kMaxOracleWindow)
    throw PreconditionError("best_window_shadow: T = " + std::to_string(T) + " exceeds " +
                            std::to_string(kMaxOracleWindow));
  // The window must hold the support of the correction-series shadow, which
  // spreads up to T steps beyond the defects and x_0 in each direction.
  std::int64_t w_lo = -T - 2;
  std::int64_t w_hi = T + 2;
  auto widen = [&](const FiniteVector& v) {
    if (v.empty()) return;
    w_lo = std::min(w_lo, v.min_index() - T);
    w_hi = std::max(w_hi, v.max_index() + T);
  };
  widen(pt.x(0));
  for (const auto& d : pt.defects) widen(d);
  const auto width = static_cast<std::size_t>(w_hi - w_lo + 1);
  const auto steps = static_cast<std::size_t>(2 * T + 1);

  // coef[n][j]: coefficient of e_{j-n} in B^n e_j.
  std::vector<std::vector<double>> coef(steps, std::vector<double>(width));
  for (std::int64_t n = -T; n <= T; ++n)
    for (std::int64_t j = w_lo; j <= w_hi; ++j) {
      const double lg = n >= 0 ? log_product(model, j - n + 1, n).log2 : -log_product(model, j + 1, -n).log2;
      coef[static_cast<std::size_t>(n + T)][static_cast<std::size_t>(j - w_lo)] = std::exp2(lg);
    }

  // Residuals B^n x - x_n, keyed by index; start from x = 0.
  std::vector<FiniteVector::Map> res(steps);
  for (std::int64_t n = -T; n <= T; ++n)
    for (const auto& [i, v] : pt.x(n).coefficients()) res[static_cast<std::size_t>(n + T)][i] = -v;
  auto target = [&](std::int64_t n, std::int64_t j) { return pt.x(n)[j - n]; };

  std::vector<double> x(width, 0.0);
  std::vector<double> a(steps), b(steps);
  auto load = [&](std::int64_t j) {
    for (std::int64_t n = -T; n <= T; ++n) {
      a[static_cast<std::size_t>(n + T)] = coef[static_cast<std::size_t>(n + T)][static_cast<std::size_t>(j - w_lo)];
      b[static_cast<std::size_t>(n + T)] = target(n, j);
    }
  };
  auto bracket = [&](double& lo, double& hi) {
    lo = std::numeric_limits<double>::infinity();
    hi = -lo;
    for (std::size_t k = 0; k < steps; ++k) {
      lo = std::min(lo, b[k] / a[k]);
      hi = std::max(hi, b[k] / a[k]);
    }
  };
  auto commit = [&](std::int64_t j, double t) {
    x[static_cast<std::size_t>(j - w_lo)] = t;
    for (std::int64_t n = -T; n <= T; ++n) {
      const auto k = static_cast<std::size_t>(n + T);
      res[k][j - n] = a[k] * t - b[k];
    }
  };

  // Sup norm: every coordinate of x feeds its own entries of the residuals,
  // so the window error is max(untouched entries, max_j f_j(x_j)).
  for (std::int64_t j = w_lo; j <= w_hi; ++j) {
    load(j);
    double lo = 0.0, hi = 0.0;
    bracket(lo, hi);
    const double t = argmin_convex(
        [&](double t) {
          double m = 0.0;
          for (std::size_t k = 0; k < steps; ++k) m = std::max(m, std::abs(a[k] * t - b[k]));
          return m;
        },
        lo, hi);
    commit(j, t);
  }

  WindowShadow out;
  out.sweeps = 1;
  if (!pt.norm.is_sup()) {
    const double p = pt.norm.p;
    auto power_sum = [&](const FiniteVector::Map& m) {
      double s = 0.0;
      for (const auto& [i, v] : m) s += std::pow(std::abs(v), p);
      return s;
    };
    auto objective = [&]() {
      double worst = 0.0;
      for (const auto& m : res) worst = std::max(worst, power_sum(m));
      return std::pow(worst, 1.0 / p);
    };
    double current = objective();
    std::vector<double> base(steps);
    for (int sweep = 0; sweep < 200; ++sweep) {
      for (std::int64_t j = w_lo; j <= w_hi; ++j) {
        load(j);
        for (std::int64_t n = -T; n <= T; ++n) {
          const auto k = static_cast<std::size_t>(n + T);
          base[k] = power_sum(res[k]) - std::pow(std::abs(res[k][j - n]), p);
        }
        auto f = [&](double t) {
          double m = 0.0;
          for (std::size_t k = 0; k < steps; ++k) m = std::max(m, base[k] + std::pow(std::abs(a[k] * t - b[k]), p));
          return m;
        };
        double lo = 0.0, hi = 0.0;
        bracket(lo, hi);
        const double old_t = x[static_cast<std::size_t>(j - w_lo)];
        const double t = argmin_convex(f, lo, hi);
        if (f(t) < f(old_t)) commit(j, t);
      }
      ++out.sweeps;
      const double next = objective();
      const bool done = current - next <= 1e-4 * std::max(next, 1e-300);
      current = next;
      if (done) break;
    }
  }

  out.x = FiniteVector(pt.norm);
  for (std::int64_t j = w_lo; j <= w_hi; ++j) out.x.set(j, x[static_cast<std::size_t>(j - w_lo)]);
  out.value = shadow_error(model, out.x, pt);
  return out;
}

std::vector<ShadowSuiteRow> shadow_suite(const WeightModel& model, const ClassificationReport& report,
                                         double delta, std::int64_t T, std::uint64_t first_seed,
                                         std::int64_t seeds, NormKind norm) {
  if (seeds < 0) throw PreconditionError("seed count must be >= 0");
  std::vector<ShadowSuiteRow> rows(static_cast<std::size_t>(seeds));
  const FiniteVector zero(norm);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < seeds; ++i) {
    const auto seed = first_seed + static_cast<std::uint64_t>(i);
    const auto pt = make_pseudotrajectory(model, zero, delta, T, seed, DefectStyle::Random);
    const auto r = shadow(model, pt, report);
    rows[static_cast<std::size_t>(i)] = {seed, r.error, r.bound, r.resolution};
  }
  return rows;
}

std::vector<ShadowSuiteRow> shadow_suite_serial(const WeightModel& model,
                                                const ClassificationReport& report, double delta,
                                                std::int64_t T, std::uint64_t first_seed,
                                                std::int64_t seeds, NormKind norm) {
  if (seeds < 0) throw PreconditionError("seed count must be >= 0");
  std::vector<ShadowSuiteRow> rows;
  const FiniteVector zero(norm);
  for (std::int64_t i = 0; i < seeds; ++i) {
    const auto seed = first_seed + static_cast<std::uint64_t>(i);
    const auto pt = make_pseudotrajectory(model, zero, delta, T, seed, DefectStyle::Random);
    const auto r = shadow(model, pt, report);
    rows.push_back({seed, r.error, r.bound, r.resolution});
  }
  return rows;
}

}  // namespace shiftlab
