#include "shiftlab/kothe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "shiftlab/errors.hpp"

namespace shiftlab {

namespace {

constexpr std::size_t kMaxReported = 32;

// e * log2(p) as integer + fraction.
ExactLog2 times_log2(std::uint64_t p, const mpz_class& e) {
  if (p == 0) throw PreconditionError("seminorm index p must be >= 1");
  unsigned b = 0;
  if (is_pow2(p, b)) return {e * b, 0.0};
  auto prod = log2_times(p, e);
  return {std::move(prod.floor), prod.fraction};
}

ExactLog2 plus(ExactLog2 a, const mpz_class& z) {
  a.integer += z;
  return a;
}

const PowerSeriesSpace& fhc_space(const WeightModel& model) {
  const auto* f = std::get_if<weight_family::FhcBlock>(&model.family());
  if (!f) throw PreconditionError("expected weights built on a power series space");
  return *f->space;
}

void check_sets_fit(const PowerSeriesSpace& space, const FrequencySets& sets) {
  if (!(sets.schedule.rule == space.rule()))
    throw PreconditionError("frequency sets and space use different block rules");
  if (sets.horizon + sets.r_max() > space.horizon())
    throw PreconditionError("space horizon must cover the set horizon plus r_max");
}

ChaosVerdict decide(std::vector<ChaosTracePoint> trace, bool use_block_starts) {
  ChaosVerdict v;
  std::vector<mpq_class> points;
  for (const auto& t : trace)
    if (!use_block_starts || t.block_start) points.push_back(t.ratio);
  for (const auto& t : trace)
    if (t.block_start && (!v.block_start_max || t.ratio > *v.block_start_max)) v.block_start_max = t.ratio;
  if (points.empty()) throw PreconditionError("chaos verdict needs at least one checkpoint");
  const auto overall = *std::min_element(points.begin(), points.end());
  const auto later = *std::min_element(points.begin() + static_cast<std::ptrdiff_t>(points.size() / 2), points.end());
  v.first_tail_min = overall.get_d();
  v.last_tail_min = later.get_d();
  v.evidence = later >= 2 * overall ? ChaosEvidence::Diverges : ChaosEvidence::Bounded;
  v.trace = std::move(trace);
  return v;
}

}  // namespace

int compare(const ExactLog2& a, const ExactLog2& b) {
  if (a.integer != b.integer) return a.integer < b.integer ? -1 : 1;
  if (a.fraction != b.fraction) return a.fraction < b.fraction ? -1 : 1;
  return 0;
}

double log2_epsilon(std::int64_t r) {
  if (r < 1) throw PreconditionError("r must be >= 1");
  return std::log2(static_cast<double>(r)) - static_cast<double>(r);
}

mpz_class build_alpha(const PowerSeriesSpace& space, std::int64_t n) {
  if (n < 0) throw PreconditionError("n must be >= 0");
  return space.alpha(n);
}

LogMagnitude seminorm(const PowerSeriesSpace& space, std::uint64_t p, const FiniteVector& x) {
  if (p < 1) throw PreconditionError("seminorm index p must be >= 1");
  auto best = LogMagnitude::zero();
  for (const auto& [n, value] : x.coefficients()) {
    if (n < 0) throw DomainError("power series spaces are indexed by n >= 0");
    const auto term = LogMagnitude::from_double(std::abs(value)) * LogMagnitude::power(p, space.alpha(n));
    if (term > best) best = term;
  }
  return best;
}

mpq_class chaos_ratio(const PowerSeriesSpace& space, std::int64_t n) {
  if (n < 1) throw PreconditionError("chaos ratio needs N >= 1");
  mpq_class q(space.prefix_sum(n), space.alpha(n));
  q.canonicalize();
  return q;
}

std::string to_string(ChaosEvidence e) {
  return e == ChaosEvidence::Diverges ? "diverges" : "bounded";
}

ChaosVerdict supports_chaotic_verdict(const PowerSeriesSpace& space,
                                      std::span<const std::int64_t> checkpoints) {
  std::vector<std::int64_t> points(checkpoints.begin(), checkpoints.end());
  std::size_t starts = 0;
  for (std::size_t k = 1; k < space.block_count(); ++k) {
    points.push_back(space.block_start(k));
    ++starts;
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  std::vector<ChaosTracePoint> trace;
  for (auto n : points) {
    if (n < 1 || n > space.horizon()) throw PreconditionError("chaos checkpoint outside [1, horizon]");
    const bool start = space.block_start(space.block_of(n)) == n;
    trace.push_back({n, chaos_ratio(space, n), start});
  }
  return decide(std::move(trace), starts >= 2);
}

ChaosVerdict supports_chaotic_verdict(std::span<const mpz_class> alpha,
                                      std::span<const std::int64_t> checkpoints) {
  if (alpha.size() < 2) throw PreconditionError("alpha sequence too short");
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (alpha[i] <= 0) throw PreconditionError("alpha must be positive");
    if (i > 0 && alpha[i] < alpha[i - 1]) throw PreconditionError("alpha must be nondecreasing");
  }
  if (!(alpha.back() > alpha[alpha.size() / 2]))
    throw PreconditionError("alpha does not tend to infinity on the given range");
  std::vector<mpz_class> prefix(alpha.size() + 1, 0);
  for (std::size_t i = 0; i < alpha.size(); ++i) prefix[i + 1] = prefix[i] + alpha[i];
  std::vector<std::int64_t> points(checkpoints.begin(), checkpoints.end());
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  std::vector<ChaosTracePoint> trace;
  for (auto n : points) {
    if (n < 1 || n >= static_cast<std::int64_t>(alpha.size()))
      throw PreconditionError("chaos checkpoint outside the alpha range");
    mpq_class q(prefix[static_cast<std::size_t>(n)], alpha[static_cast<std::size_t>(n)]);
    q.canonicalize();
    trace.push_back({n, q, false});
  }
  return decide(std::move(trace), false);
}

WeightModel build_fhc_weights(std::shared_ptr<const PowerSeriesSpace> space) {
  return WeightModel::fhc_block(std::move(space));
}

ContinuityReport continuity_check(const PowerSeriesSpace& space, const WeightModel& model,
                                  std::uint64_t p_max, std::int64_t horizon) {
  if (p_max < 1) throw PreconditionError("p_max must be >= 1");
  if (horizon < 1 || horizon > space.horizon()) throw PreconditionError("horizon outside the space");
  const auto* fhc = std::get_if<weight_family::FhcBlock>(&model.family());
  const PowerSeriesSpace* exact_space = fhc ? fhc->space.get() : nullptr;
  if (exact_space && !(exact_space->rule() == space.rule()))
    throw PreconditionError("weights were built on a different block rule");

  ContinuityReport rep;
  rep.p_max = p_max;
  rep.horizon = horizon;
  rep.exact = exact_space != nullptr;
  rep.tightest_margin = std::numeric_limits<double>::infinity();
  for (std::uint64_t p = 1; p <= p_max; ++p) {
    const double lp = std::log2(static_cast<double>(p));
    for (std::int64_t n = 0; n < horizon; ++n) {
      const auto& a_next = space.alpha(n + 1);
      const mpz_class step = a_next - space.alpha(n);
      double margin = 0.0;
      bool bad = false;
      if (exact_space) {
        const auto total = plus(times_log2(p, step), a_next - exact_space->weight_exponent(n + 1));
        margin = total.approx();
        bad = total.integer < 0;
      } else {
        margin = (a_next.get_d() - model.log2_weight_at(n + 1)) + step.get_d() * lp;
        bad = margin < -1e-9;
      }
      ++rep.checked;
      if (margin < rep.tightest_margin) {
        rep.tightest_margin = margin;
        rep.tightest_p = p;
        rep.tightest_n = n;
      }
      if (bad) {
        ++rep.violation_count;
        if (rep.violations.size() < kMaxReported) rep.violations.push_back({p, n, margin});
      }
    }
  }
  return rep;
}

LogMagnitude v_value(const WeightModel& model, std::int64_t n) {
  if (n < 0) throw PreconditionError("v_n needs n >= 0");
  return LogMagnitude::pow2(fhc_space(model).log2_v(n));
}

std::vector<mpz_class> telescoped_log2_v(const WeightModel& model, std::int64_t n_max) {
  const auto& space = fhc_space(model);
  if (n_max < 0 || n_max > space.horizon()) throw PreconditionError("n_max outside the space");
  std::vector<mpz_class> out{0};
  for (std::int64_t n = 1; n <= n_max; ++n) out.push_back(out.back() - space.weight_exponent(n));
  return out;
}

FhcConditionI verify_fhc_condition_i(const PowerSeriesSpace& space, const FrequencySets& sets,
                                     std::int64_t r, std::uint64_t p) {
  if (r < 1 || r > sets.r_max()) throw PreconditionError("no such set");
  if (p < 1) throw PreconditionError("p must be >= 1");
  check_sets_fit(space, sets);
  FhcConditionI out;
  out.r = r;
  out.p = p;
  const double lp = std::log2(static_cast<double>(p));

  std::vector<std::pair<std::int64_t, ExactLog2>> block_max;
  for (auto n : sets.set(r)) {
    const auto k = static_cast<std::int64_t>(space.block_of(n));
    const auto& a_block = space.block_alpha(static_cast<std::size_t>(k));
    const auto value = plus(times_log2(p, space.alpha(n + r)), space.log2_v(n + r));
    const double bound = 1.0 + a_block.get_d() * (lp - static_cast<double>(k));
    out.trace.push_back({n, k, value, bound});

    if (static_cast<std::int64_t>(space.block_of(n + r)) != k) {
      out.violations.push_back({"n+r leaves the block of n", -1, n, r, value.approx(), bound});
    } else {
      // Same block, so the alpha log2 p terms cancel and the comparison is integral.
      const mpz_class excess = space.log2_v(n + r) - 1 + a_block * k;
      if (excess > 0) out.violations.push_back({"above the block bound", -1, n, r, value.approx(), bound});
    }
    if (block_max.empty() || block_max.back().first != k)
      block_max.emplace_back(k, value);
    else if (compare(value, block_max.back().second) > 0)
      block_max.back().second = value;
  }
  out.strictly_decreasing_blocks = true;
  out.eventually_decreasing = true;
  for (std::size_t i = 1; i < block_max.size(); ++i) {
    const bool down = compare(block_max[i].second, block_max[i - 1].second) < 0;
    if (!down) out.strictly_decreasing_blocks = false;
    if (!down && static_cast<double>(block_max[i - 1].first) > lp) out.eventually_decreasing = false;
  }
  if (!out.trace.empty()) out.last_value = out.trace.back().value.approx();
  return out;
}

namespace {

struct IiContext {
  const PowerSeriesSpace& space;
  const FrequencySets& sets;
  std::int64_t r;
  std::int64_t s;
  std::int64_t clearance;
  double threshold;
  std::vector<double> value;          // log2(s^{alpha_d} v_d) for d in [0, horizon]
  std::vector<std::int32_t> block;    // block index of d
};

IiContext make_context(const PowerSeriesSpace& space, const FrequencySets& sets, std::int64_t r,
                       std::int64_t s) {
  if (r < 1 || s < 1 || r > sets.r_max() || s > sets.r_max()) throw PreconditionError("no such set");
  check_sets_fit(space, sets);
  IiContext c{space, sets, r, s, std::max(r, s), std::min(log2_epsilon(r), log2_epsilon(s)), {}, {}};
  const auto h = space.horizon();
  c.value.resize(static_cast<std::size_t>(h + 1));
  c.block.resize(static_cast<std::size_t>(h + 1));
  for (std::size_t k = 0; k < space.block_count(); ++k) {
    const auto lo = space.block_start(k);
    const auto hi = std::min<std::int64_t>(space.rule().start(k + 1) == BlockRule::kUnbounded
                                               ? h + 1
                                               : space.rule().start(k + 1),
                                           h + 1);
    const auto base = times_log2(static_cast<std::uint64_t>(s), space.block_alpha(k));
    for (auto d = lo; d < hi; ++d) {
      c.value[static_cast<std::size_t>(d)] = plus(base, space.log2_v(d)).approx();
      c.block[static_cast<std::size_t>(d)] = static_cast<std::int32_t>(k);
    }
  }
  return c;
}

struct IiAccumulator {
  std::int64_t triples = 0;
  double max_value = -std::numeric_limits<double>::infinity();
  std::int64_t m = -1, n = -1, j = -1;
  std::int64_t violation_count = 0;
  std::vector<FhcViolation> violations;

  void offer(double v, std::int64_t mm, std::int64_t nn, std::int64_t jj) {
    if (v > max_value || (v == max_value && std::tie(mm, nn, jj) < std::tie(m, n, j))) {
      max_value = v;
      m = mm;
      n = nn;
      j = jj;
    }
  }
  void merge(const IiAccumulator& o) {
    triples += o.triples;
    if (o.m >= 0) offer(o.max_value, o.m, o.n, o.j);
    violation_count += o.violation_count;
    violations.insert(violations.end(), o.violations.begin(), o.violations.end());
  }
};

void scan_m(const IiContext& c, std::int64_t m, IiAccumulator& acc) {
  const auto& a_r = c.sets.set(c.r);
  const auto& rule = c.space.rule();
  for (auto it = std::upper_bound(a_r.begin(), a_r.end(), m); it != a_r.end(); ++it) {
    const auto n = *it;
    const auto d = n - m;
    const auto k = static_cast<std::size_t>(c.block[static_cast<std::size_t>(d)]);
    const auto next = rule.start(k + 1);
    for (std::int64_t j = 0; j <= c.r; ++j) {
      const auto dj = d + j;
      const double v = c.value[static_cast<std::size_t>(dj)];
      ++acc.triples;
      acc.offer(v, m, n, j);
      const bool premise = d >= rule.start(k) + c.clearance && (next == BlockRule::kUnbounded || dj < next);
      if (!premise || v > c.threshold) {
        ++acc.violation_count;
        // Each thread visits m in increasing order, so keeping its first few
        // keeps the globally smallest ones.
        if (acc.violations.size() < kMaxReported)
          acc.violations.push_back({premise ? "above min(eps_r, eps_s)" : "n-m+j outside the safe part of its block",
                                  m, n, j, v, c.threshold});
      }
    }
  }
}

FhcConditionII finish(const IiContext& c, IiAccumulator acc) {
  FhcConditionII out;
  out.r = c.r;
  out.s = c.s;
  out.threshold = c.threshold;
  out.triples = acc.triples;
  out.max_value = acc.max_value;
  out.witness_m = acc.m;
  out.witness_n = acc.n;
  out.witness_j = acc.j;
  out.violation_count = acc.violation_count;
  std::sort(acc.violations.begin(), acc.violations.end(),
            [](const auto& a, const auto& b) { return std::tie(a.m, a.n, a.j) < std::tie(b.m, b.n, b.j); });
  if (acc.violations.size() > kMaxReported) acc.violations.resize(kMaxReported);
  out.violations = std::move(acc.violations);
  if (acc.m >= 0) {
    // value <= 1 + alpha_{N_k}(log2 s - M - 1); inside block k the alpha log2 s
    // terms cancel and this reads log2 v_{d+j} - 1 + alpha_{N_k}(M + 1) <= 0.
    const auto d = acc.n - acc.m;
    const auto dj = d + acc.j;
    const auto k = c.space.block_of(d);
    out.chain_holds_at_witness =
        c.space.block_of(dj) == k &&
        c.space.log2_v(dj) - 1 + c.space.block_alpha(k) * (c.clearance + 1) <= 0;
  }
  return out;
}

}  // namespace

FhcConditionII verify_fhc_condition_ii(const PowerSeriesSpace& space, const FrequencySets& sets,
                                       std::int64_t r, std::int64_t s) {
  const auto c = make_context(space, sets, r, s);
  const auto& a_s = sets.set(s);
  const auto count = static_cast<std::int64_t>(a_s.size());
  IiAccumulator total;
#pragma omp parallel
  {
    IiAccumulator local;
#pragma omp for schedule(dynamic, 16) nowait
    for (std::int64_t i = 0; i < count; ++i) scan_m(c, a_s[static_cast<std::size_t>(i)], local);
#pragma omp critical(shiftlab_fhc_merge)
    total.merge(local);
  }
  return finish(c, std::move(total));
}

FhcConditionII verify_fhc_condition_ii_serial(const PowerSeriesSpace& space,
                                              const FrequencySets& sets, std::int64_t r,
                                              std::int64_t s) {
  const auto c = make_context(space, sets, r, s);
  IiAccumulator total;
  for (auto m : sets.set(s)) scan_m(c, m, total);
  return finish(c, std::move(total));
}

}  // namespace shiftlab
