#include "shiftlab/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "shiftlab/compensated_sum.hpp"
#include "shiftlab/errors.hpp"
#include "shiftlab/kernels.hpp"

namespace shiftlab {

namespace {

// Exact tail means closer to zero than this are treated as zero, i.e. the
// strict inequality is not established.
constexpr double kExactTolerance = 1e-12;

constexpr double kGrowthRatio = 1.25;

struct Sweep {
  std::vector<double> logs;
  std::int64_t first;
  std::int64_t last;
  std::int64_t shift;
};

Sweep build_sweep(const WeightModel& model, Side side, std::int64_t n_max, std::int64_t k_max) {
  if (n_max < 1 || k_max < 1) throw PreconditionError("window sweep needs n_max >= 1 and k_max >= 1");
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  Sweep s{};
  switch (side) {
    case Side::Pos:
      lo = 1;
      hi = k_max + n_max - 1;
      s.first = 0;
      s.last = k_max - 1;
      s.shift = 0;
      break;
    case Side::Neg:
      // Window [-k-L+1, -k]; its lowest index moves left as L grows.
      lo = -k_max - n_max + 1;
      hi = -1;
      s.first = n_max - 1;
      s.last = k_max + n_max - 2;
      s.shift = -1;
      break;
    case Side::All:
      lo = -k_max;
      hi = k_max + n_max - 1;
      s.first = 0;
      s.last = 2 * k_max;
      s.shift = 0;
      break;
  }
  if (!model.in_range(lo) || !model.in_range(hi))
    throw DomainError("weights are not defined on the window sweep [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
  s.logs.resize(static_cast<std::size_t>(hi - lo + 1));
  for (std::int64_t n = lo; n <= hi; ++n) s.logs[n - lo] = model.log2_weight_at(n);
  return s;
}

std::int64_t clamp_start(std::int64_t s) { return std::clamp<std::int64_t>(s, -(1LL << 40), 1LL << 40); }

// Smallest k_max for which the sweep visits every distinct window of length <= n_max.
std::optional<std::int64_t> covering_k(const WeightModel& model, Side side, std::int64_t n_max) {
  if (!model.is_bilateral() && side != Side::Pos) return std::nullopt;
  if (side == Side::Pos || side == Side::All) {
    if (!model.tail(Side::Pos)) return std::nullopt;
  }
  if (side == Side::Neg || side == Side::All) {
    if (!model.tail(Side::Neg)) return std::nullopt;
  }
  std::int64_t need = 1;
  if (side == Side::Pos) {
    const auto t = *model.tail(Side::Pos);
    need = std::max<std::int64_t>(clamp_start(t.start), 1) + t.period - 1;
  } else if (side == Side::Neg) {
    const auto t = *model.tail(Side::Neg);
    need = std::max<std::int64_t>(-clamp_start(t.start), 1) + t.period - 1;
  } else {
    const auto tp = *model.tail(Side::Pos);
    const auto tn = *model.tail(Side::Neg);
    need = std::max<std::int64_t>(std::max<std::int64_t>(clamp_start(tp.start), 0) + tp.period - 1,
                                  -std::min<std::int64_t>(clamp_start(tn.start), 0) + n_max +
                                      tn.period - 2);
  }
  return need;
}

std::optional<double> exact_limit(const WeightModel& model, ConditionShape shape) {
  if (shape.side != Side::All) return model.exact_tail_mean(shape.side);
  if (!model.is_bilateral()) return std::nullopt;
  const auto p = model.exact_tail_mean(Side::Pos);
  const auto n = model.exact_tail_mean(Side::Neg);
  if (!p || !n) return std::nullopt;
  return shape.extremum == Extremum::Sup ? std::max(*p, *n) : std::min(*p, *n);
}

bool certified_holds(const ConditionShape& shape, double sup_mean, double inf_mean, double margin) {
  return shape.below_one ? sup_mean <= -margin : inf_mean >= margin;
}

// The opposite extremum already on the wrong side of zero at some length L
// means every long window average stays there too.
bool certified_fails(const ConditionShape& shape, double sup_mean, double inf_mean) {
  return shape.below_one ? inf_mean >= 0.0 : sup_mean <= 0.0;
}

}  // namespace

ConditionShape condition_shape(ConditionId id) {
  switch (id) {
    case ConditionId::Sss1: return {Side::Pos, Extremum::Sup, true};
    case ConditionId::Sss2: return {Side::Pos, Extremum::Inf, false};
    case ConditionId::Sss5: return {Side::Neg, Extremum::Inf, false};
    case ConditionId::Sss6: return {Side::Neg, Extremum::Sup, true};
    case ConditionId::ASupZ: return {Side::All, Extremum::Sup, true};
    case ConditionId::BInfZ: return {Side::All, Extremum::Inf, false};
  }
  throw PreconditionError("unknown condition");
}

std::string to_string(ConditionId id) {
  switch (id) {
    case ConditionId::Sss1: return "SSS1";
    case ConditionId::Sss2: return "SSS2";
    case ConditionId::Sss5: return "SSS5";
    case ConditionId::Sss6: return "SSS6";
    case ConditionId::ASupZ: return "A-SUP-Z";
    case ConditionId::BInfZ: return "B-INF-Z";
  }
  return "?";
}

std::string to_string(Decision d) {
  switch (d) {
    case Decision::Holds: return "holds";
    case Decision::Fails: return "fails";
    case Decision::Inconclusive: return "inconclusive";
  }
  return "?";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::A: return "A";
    case Verdict::B: return "B";
    case Verdict::C: return "C";
    case Verdict::None: return "none";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

std::string to_string(Side s) {
  switch (s) {
    case Side::Pos: return "pos";
    case Side::Neg: return "neg";
    case Side::All: return "all";
  }
  return "?";
}

std::string to_string(Growth g) {
  switch (g) {
    case Growth::Bounded: return "bounded";
    case Growth::Growing: return "growing";
    case Growth::Unknown: return "unknown";
  }
  return "?";
}

double window_statistic(const WeightModel& model, std::int64_t length, Side side, Extremum extremum,
                        std::int64_t k_max) {
  if (length < 1) throw PreconditionError("window length must be >= 1");
  const auto sweep = build_sweep(model, side, length, k_max);
  const auto shift = sweep.shift * (length - 1);
  const auto ext = kernels::window_extrema(sweep.logs, sweep.first + shift, sweep.last + shift, length);
  const double v = extremum == Extremum::Sup ? ext.sup : ext.inf;
  return v / static_cast<double>(length);
}

ConditionEvidence decide_condition(const WeightModel& model, ConditionId id,
                                   const ClassifyOptions& options) {
  if (options.margin < 0.0) throw PreconditionError("margin must be non-negative");
  const auto shape = condition_shape(id);
  ConditionEvidence ev;
  ev.id = id;

  const auto sweep = build_sweep(model, shape.side, options.n_max, options.k_max);
  const auto ext = kernels::window_extrema_all_lengths(sweep.logs, sweep.first, sweep.last,
                                                       options.n_max, sweep.shift);
  const bool sup = shape.extremum == Extremum::Sup;
  for (std::int64_t len = 1; len <= options.n_max; ++len) {
    const auto& e = ext[len - 1];
    ev.trace.push_back({len, (sup ? e.sup : e.inf) / static_cast<double>(len)});
    if (len >= 2) ev.offset_trace.push_back({len - 1, (sup ? e.sup : e.inf) / static_cast<double>(len - 1)});
  }

  const auto need = covering_k(model, shape.side, options.n_max);
  ev.rigorous_sweep = need && *need <= options.k_max;

  std::optional<std::int64_t> holds_at;
  std::optional<std::int64_t> fails_at;
  for (std::int64_t len = 1; len <= options.n_max; ++len) {
    const auto& e = ext[len - 1];
    const double l = static_cast<double>(len);
    if (!holds_at && certified_holds(shape, e.sup / l, e.inf / l, options.margin)) holds_at = len;
    if (!fails_at && certified_fails(shape, e.sup / l, e.inf / l)) fails_at = len;
  }

  ev.exact_limit = exact_limit(model, shape);
  if (ev.exact_limit) {
    const double mu = *ev.exact_limit;
    const bool holds = shape.below_one ? mu < -kExactTolerance : mu > kExactTolerance;
    ev.decision = holds ? Decision::Holds : Decision::Fails;
    ev.certificate_length = holds ? holds_at : fails_at;
    ev.reason = "exact tail mean " + std::to_string(mu);
    return ev;
  }

  if (!ev.rigorous_sweep) {
    ev.reason = "k-sweep does not cover every window of the model";
    return ev;
  }
  if (holds_at) {
    ev.decision = Decision::Holds;
    ev.certificate_length = holds_at;
    ev.reason = "subadditive bound at L=" + std::to_string(*holds_at);
  } else if (fails_at) {
    ev.decision = Decision::Fails;
    ev.certificate_length = fails_at;
    ev.reason = "opposite extremum at L=" + std::to_string(*fails_at);
  } else {
    ev.reason = "no certificate within n_max with the requested margin";
  }
  return ev;
}

ClassificationReport classify_sss(const WeightModel& model, const ClassifyOptions& options) {
  if (!model.is_bilateral()) throw PreconditionError("classification needs a bilateral weight model");
  if (!model.is_bounded()) throw PreconditionError("classification needs a bounded weight model");
  ClassificationReport r;
  r.options = options;
  for (auto id : kAllConditions) r.conditions[static_cast<std::size_t>(id)] = decide_condition(model, id, options);

  auto holds = [&](ConditionId id) { return r.evidence(id).decision == Decision::Holds; };
  auto fails = [&](ConditionId id) { return r.evidence(id).decision == Decision::Fails; };
  using enum ConditionId;

  r.lemma23_pattern = holds(Sss1) && holds(Sss5);
  if (holds(Sss1) && holds(Sss6) && holds(ASupZ)) {
    r.verdict = Verdict::A;
  } else if (holds(Sss2) && holds(Sss5) && holds(BInfZ)) {
    r.verdict = Verdict::B;
  } else if (holds(Sss2) && holds(Sss6)) {
    r.verdict = Verdict::C;
  } else if (r.lemma23_pattern) {
    r.verdict = Verdict::None;
  } else {
    const bool maybe_a = !fails(Sss1) && !fails(Sss6) && !fails(ASupZ);
    const bool maybe_b = !fails(Sss2) && !fails(Sss5) && !fails(BInfZ);
    const bool maybe_c = !fails(Sss2) && !fails(Sss6);
    r.verdict = (maybe_a || maybe_b || maybe_c) ? Verdict::Inconclusive : Verdict::None;
  }
  r.hyperbolic = r.verdict == Verdict::A || r.verdict == Verdict::B;
  r.generalized_hyperbolic = r.verdict == Verdict::C;
  r.sss = r.hyperbolic || r.generalized_hyperbolic;
  return r;
}

Lemma23Detection detect_lemma23(const WeightModel& model, const ClassifyOptions& options) {
  Lemma23Detection d;
  d.pos_sup = decide_condition(model, ConditionId::Sss1, options);
  d.neg_inf = decide_condition(model, ConditionId::Sss5, options);
  d.detected = d.pos_sup.decision == Decision::Holds && d.neg_inf.decision == Decision::Holds;
  return d;
}

Growth growth_of(const std::vector<double>& by_horizon) {
  if (by_horizon.size() < 2) return Growth::Unknown;
  const double last = by_horizon.back();
  const double half = by_horizon[(by_horizon.size() - 1) / 2];
  if (!std::isfinite(last)) return Growth::Growing;
  return last > kGrowthRatio * half ? Growth::Growing : Growth::Bounded;
}

Lemma22Quantities lemma22_quantities(const WeightModel& x, std::int64_t t_max, std::int64_t m_max,
                                     const ClassifyOptions& options) {
  if (t_max < 0 || m_max < 1) throw PreconditionError("lemma22: need t_max >= 0 and m_max >= 1");
  Lemma22Quantities q;
  q.limit = decide_condition(x, ConditionId::Sss1, options);
  q.growth_i = q.limit.decision == Decision::Holds   ? Growth::Bounded
               : q.limit.decision == Decision::Fails ? Growth::Growing
                                                     : Growth::Unknown;

  const std::int64_t top = std::max(t_max + m_max, m_max);
  std::vector<double> logs(static_cast<std::size_t>(top + 1), 0.0);
  for (std::int64_t n = 1; n <= top; ++n) logs[n] = x.log2_weight_at(n);

  // 2^v with overflow reported as +inf.
  auto term = [&](double log2v) {
    if (log2v > 1000.0) {
      q.overflow = true;
      return std::numeric_limits<double>::infinity();
    }
    return std::exp2(log2v);
  };

  q.ii_by_horizon.assign(static_cast<std::size_t>(m_max + 1), 0.0);
  for (std::int64_t t = 0; t <= t_max; ++t) {
    CompensatedSum sum;
    double log_prod = 0.0;
    sum.add(1.0);
    q.ii_by_horizon[0] = std::max(q.ii_by_horizon[0], 1.0);
    for (std::int64_t k = 1; k <= m_max; ++k) {
      log_prod += logs[k + t];
      sum.add(term(log_prod));
      q.ii_by_horizon[k] = std::max(q.ii_by_horizon[k], sum.value());
    }
  }

  // iii_by_horizon[K-1] = max_{m <= m_max} sum_{k < min(K, m)}: the horizon
  // counts terms, as for (ii), so the sequence is monotone in K.
  q.iii_by_horizon.assign(static_cast<std::size_t>(m_max), 0.0);
  for (std::int64_t m = 1; m <= m_max; ++m) {
    CompensatedSum sum;
    double log_prod = 0.0;
    for (std::int64_t k = 0; k < m_max; ++k) {
      if (k < m) {
        log_prod += logs[m - k];
        sum.add(term(log_prod));
      }
      q.iii_by_horizon[k] = std::max(q.iii_by_horizon[k], sum.value());
    }
  }
  q.growth_ii = growth_of(q.ii_by_horizon);
  q.growth_iii = growth_of(q.iii_by_horizon);
  return q;
}

}  // namespace shiftlab
