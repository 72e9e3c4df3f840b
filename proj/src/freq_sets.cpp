#include "shiftlab/freq_sets.hpp"

#include <algorithm>
#include <bit>
#include <tuple>
#include <utility>

#include "shiftlab/errors.hpp"

namespace shiftlab {

namespace {

std::int64_t block_of(const BlockRule& rule, std::int64_t n) {
  return static_cast<std::int64_t>(rule.index_of(n));
}

std::int64_t next_start(const BlockRule& rule, std::int64_t k) {
  return rule.start(static_cast<std::size_t>(k + 1));
}

// Does some positive multiple of g lie in [lo, hi)?
bool multiple_in(std::int64_t g, std::int64_t lo, std::int64_t hi) {
  const std::int64_t first = lo <= g ? g : ((lo + g - 1) / g) * g;
  return first < hi;
}

}  // namespace

FrequencySchedule FrequencySchedule::standard(BlockRule rule, std::int64_t r_max) {
  if (r_max < 1) throw PreconditionError("r_max must be >= 1");
  FrequencySchedule s;
  s.early_end = rule.start(3);
  s.stride = safe_stride(rule, r_max);
  s.rule = std::move(rule);
  s.r_max = r_max;
  return s;
}

std::int64_t block_starts(const FrequencySchedule& schedule, std::int64_t k) {
  if (k < 0) throw PreconditionError("block index must be >= 0");
  return schedule.rule.start(static_cast<std::size_t>(k));
}

std::int64_t block_index(const FrequencySchedule& schedule, std::int64_t n) {
  if (n < 0) throw PreconditionError("n must be >= 0");
  return block_of(schedule.rule, n);
}

bool satisfies_a(const BlockRule& rule, std::int64_t n, std::int64_t r) {
  if (n < 0) return false;
  const auto k = block_of(rule, n);
  const auto hi = next_start(rule, k);
  return n >= rule.start(static_cast<std::size_t>(k)) + k && (hi == BlockRule::kUnbounded || n < hi - r);
}

bool safe_difference(const BlockRule& rule, std::int64_t d, std::int64_t clearance) {
  if (d <= 0) return false;
  const auto k = block_of(rule, d);
  const auto hi = next_start(rule, k);
  return d >= rule.start(static_cast<std::size_t>(k)) + clearance &&
         (hi == BlockRule::kUnbounded || d < hi - clearance);
}

std::int64_t safe_stride(const BlockRule& rule, std::int64_t clearance) {
  if (clearance < 1) throw PreconditionError("clearance must be >= 1");
  for (std::int64_t g = clearance;; ++g) {
    bool ok = true;
    for (std::size_t k = 1; k < rule.stored_starts() && ok; ++k) {
      const auto nk = rule.start(k);
      if (nk > (std::int64_t{1} << 61)) break;
      ok = !multiple_in(g, nk - clearance, nk + clearance);
    }
    if (ok) return g;
  }
}

FrequencySets generate_sets(const FrequencySchedule& schedule, std::int64_t horizon) {
  const auto r_max = schedule.r_max;
  if (r_max < 1) throw PreconditionError("r_max must be >= 1");
  if (schedule.stride < 1) throw PreconditionError("stride must be >= 1");
  const auto needed = schedule.rule.start(static_cast<std::size_t>(r_max + 1));
  if (needed == BlockRule::kUnbounded || horizon < needed)
    throw DomainError("horizon must be at least N_{r_max+1}");
  if (horizon > (std::int64_t{1} << 32)) throw DomainError("horizon too large for the dense filter");

  FrequencySets out;
  out.schedule = schedule;
  out.horizon = horizon;
  out.sets.resize(static_cast<std::size_t>(r_max));

  // blocked[r-1][n] != 0: n would violate (b) against an accepted element when
  // placed in A_r. Only forward differences matter since candidates increase.
  std::vector<std::vector<unsigned char>> blocked(
      static_cast<std::size_t>(r_max), std::vector<unsigned char>(static_cast<std::size_t>(horizon + 1), 0));
  const auto& rule = schedule.rule;

  auto accept = [&](std::int64_t n, std::int64_t s) {
    out.sets[static_cast<std::size_t>(s - 1)].push_back(n);
    for (std::int64_t r = 1; r <= r_max; ++r) {
      const auto clearance = std::max(r, s);
      auto& row = blocked[static_cast<std::size_t>(r - 1)];
      for (std::size_t k = 0; k < rule.stored_starts(); ++k) {
        const auto nk = rule.start(k);
        if (nk - clearance > horizon - n) break;
        const auto lo = std::max<std::int64_t>(n + nk - clearance, n);
        const auto hi = std::min<std::int64_t>(n + nk + clearance, horizon + 1);
        for (auto x = lo; x < hi; ++x) row[static_cast<std::size_t>(x)] = 1;
      }
    }
  };
  auto admissible = [&](std::int64_t n, std::int64_t r) {
    return satisfies_a(rule, n, r) && !blocked[static_cast<std::size_t>(r - 1)][static_cast<std::size_t>(n)];
  };

  std::int64_t turn = 1;
  const auto early_end = std::min(schedule.early_end, horizon + 1);
  for (std::int64_t n = rule.start(1); n < early_end; ++n) {
    if (admissible(n, turn)) {
      accept(n, turn);
      turn = turn % r_max + 1;
    }
  }

  std::int64_t first = ((std::max<std::int64_t>(early_end, 1) + schedule.stride - 1) / schedule.stride) * schedule.stride;
  std::int64_t i = 0;
  for (std::int64_t n = first; n <= horizon; n += schedule.stride, ++i) {
    const auto r = std::min<std::int64_t>(std::countr_zero(static_cast<std::uint64_t>(i + 1)) + 1, r_max);
    if (admissible(n, r)) accept(n, r);
  }
  return out;
}

FrequencySets generate_sets(std::int64_t r_max, std::int64_t horizon) {
  return generate_sets(FrequencySchedule::standard(BlockRule::geometric(4), r_max), horizon);
}

DensityProfile lower_density_profile(std::span<const std::int64_t> elements,
                                     std::span<const std::int64_t> checkpoints) {
  DensityProfile p;
  std::vector<std::int64_t> sorted(elements.begin(), elements.end());
  std::sort(sorted.begin(), sorted.end());
  for (auto n : checkpoints) {
    if (n < 1) throw PreconditionError("density checkpoints must be >= 1");
    const auto lo = std::lower_bound(sorted.begin(), sorted.end(), std::int64_t{0});
    const auto hi = std::upper_bound(sorted.begin(), sorted.end(), n);
    const auto count = std::max<std::ptrdiff_t>(hi - lo, 0);
    p.points.push_back({n, static_cast<double>(count) / static_cast<double>(n)});
  }
  if (!p.points.empty())
    p.min = std::min_element(p.points.begin(), p.points.end(), [](auto a, auto b) { return a.density < b.density; })->density;
  return p;
}

DensityProfile lower_density_profile(const FrequencySets& sets, std::int64_t r,
                                     std::span<const std::int64_t> checkpoints) {
  if (r < 1 || r > sets.r_max()) throw PreconditionError("no such set");
  for (auto n : checkpoints)
    if (n > sets.horizon) throw PreconditionError("density checkpoint beyond the generated horizon");
  return lower_density_profile(sets.set(r), checkpoints);
}

std::string to_string(FrequencyProperty p) {
  switch (p) {
    case FrequencyProperty::Disjointness: return "disjointness";
    case FrequencyProperty::A: return "a";
    case FrequencyProperty::B: return "b";
  }
  return "?";
}

namespace {

struct Tagged {
  std::int64_t n;
  std::int64_t r;
};

std::vector<Tagged> flatten(const FrequencySets& sets) {
  std::vector<Tagged> all;
  for (std::int64_t r = 1; r <= sets.r_max(); ++r)
    for (auto n : sets.set(r)) all.push_back({n, r});
  std::sort(all.begin(), all.end(), [](auto a, auto b) { return std::tie(a.n, a.r) < std::tie(b.n, b.r); });
  return all;
}

void check_element(const BlockRule& rule, const std::vector<Tagged>& all, std::size_t i,
                   std::vector<FrequencyViolation>& out) {
  const auto [n, r] = all[i];
  if (!satisfies_a(rule, n, r)) {
    const auto k = block_of(rule, std::max<std::int64_t>(n, 0));
    out.push_back({FrequencyProperty::A, r, n, 0, 0,
                   "n=" + std::to_string(n) + " in A_" + std::to_string(r) + " breaks N_k+k <= n < N_{k+1}-r for k=" +
                       std::to_string(k)});
  }
  for (std::size_t j = 0; j < i; ++j) {
    const auto [m, s] = all[j];
    if (m == n) {
      out.push_back({FrequencyProperty::Disjointness, r, n, s, m,
                     std::to_string(n) + " lies in A_" + std::to_string(s) + " and A_" + std::to_string(r)});
      continue;
    }
    const auto clearance = std::max(r, s);
    if (!safe_difference(rule, n - m, clearance))
      out.push_back({FrequencyProperty::B, r, n, s, m,
                     "difference " + std::to_string(n - m) + " too close to a block start for clearance " +
                         std::to_string(clearance)});
  }
}

void sort_violations(std::vector<FrequencyViolation>& v) {
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    return std::tie(a.property, a.n, a.m, a.r, a.s) < std::tie(b.property, b.n, b.m, b.r, b.s);
  });
}

}  // namespace

std::vector<FrequencyViolation> verify_properties(const FrequencySets& sets) {
  const auto all = flatten(sets);
  std::vector<FrequencyViolation> out;
  const auto count = static_cast<std::int64_t>(all.size());
#pragma omp parallel
  {
    std::vector<FrequencyViolation> local;
#pragma omp for schedule(dynamic, 32) nowait
    for (std::int64_t i = 0; i < count; ++i) check_element(sets.schedule.rule, all, static_cast<std::size_t>(i), local);
#pragma omp critical(shiftlab_freq_merge)
    out.insert(out.end(), local.begin(), local.end());
  }
  sort_violations(out);
  return out;
}

std::vector<FrequencyViolation> verify_properties_serial(const FrequencySets& sets) {
  const auto all = flatten(sets);
  std::vector<FrequencyViolation> out;
  for (std::size_t i = 0; i < all.size(); ++i) check_element(sets.schedule.rule, all, i, out);
  sort_violations(out);
  return out;
}

}  // namespace shiftlab
