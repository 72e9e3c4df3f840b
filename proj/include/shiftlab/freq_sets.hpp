#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "shiftlab/blocks.hpp"

namespace shiftlab {

// Greedy, in increasing n. Below early_end each n >= N_1 goes to whichever set
// has the turn (the turn moves on acceptance). After that only multiples of
// stride are tried, the i-th going to r = min(v2(i+1) + 1, r_max), so A_r gets
// about 2^-r of them. Multiples of stride are always safe differences, so the
// late candidates cannot clash with each other; clashes with the early part
// are still checked.
struct FrequencySchedule {
  BlockRule rule = BlockRule::geometric(4);
  std::int64_t r_max = 6;
  std::int64_t early_end = 64;
  std::int64_t stride = 24;

  static FrequencySchedule standard(BlockRule rule, std::int64_t r_max);
};

std::int64_t block_starts(const FrequencySchedule& schedule, std::int64_t k);
std::int64_t block_index(const FrequencySchedule& schedule, std::int64_t n);

// Property (a) for n in A_r: N_k + k <= n < N_{k+1} - r with k = block(n).
bool satisfies_a(const BlockRule& rule, std::int64_t n, std::int64_t r);
// Property (b) for a difference d = n - m > 0 with clearance M = max(r, s):
// N_k + M <= d < N_{k+1} - M with k = block(d).
bool safe_difference(const BlockRule& rule, std::int64_t d, std::int64_t clearance);

// Least g >= clearance whose positive multiples are all safe differences.
std::int64_t safe_stride(const BlockRule& rule, std::int64_t clearance);

struct FrequencySets {
  FrequencySchedule schedule;
  std::int64_t horizon = 0;
  // sets[r-1] = A_r intersected with [0, horizon], increasing.
  std::vector<std::vector<std::int64_t>> sets;

  std::int64_t r_max() const { return static_cast<std::int64_t>(sets.size()); }
  const std::vector<std::int64_t>& set(std::int64_t r) const { return sets.at(static_cast<std::size_t>(r - 1)); }
};

// Requires r_max >= 1 and horizon >= N_{r_max+1}; throws DomainError when the
// horizon is too small.
FrequencySets generate_sets(const FrequencySchedule& schedule, std::int64_t horizon);
FrequencySets generate_sets(std::int64_t r_max, std::int64_t horizon);

struct DensityPoint {
  std::int64_t n;
  double density;  // card(A ∩ [0, n]) / n
};

struct DensityProfile {
  std::vector<DensityPoint> points;
  double min = 0.0;
};

DensityProfile lower_density_profile(std::span<const std::int64_t> elements,
                                     std::span<const std::int64_t> checkpoints);
// Checkpoints must lie in [1, horizon].
DensityProfile lower_density_profile(const FrequencySets& sets, std::int64_t r,
                                     std::span<const std::int64_t> checkpoints);

enum class FrequencyProperty { Disjointness, A, B };
std::string to_string(FrequencyProperty p);

struct FrequencyViolation {
  FrequencyProperty property;
  std::int64_t r = 0;
  std::int64_t n = 0;
  std::int64_t s = 0;  // second set (Disjointness, B)
  std::int64_t m = 0;  // second element (B); m < n
  std::string detail;

  friend bool operator==(const FrequencyViolation&, const FrequencyViolation&) = default;
};

// Exhaustive check of disjointness, (a) for every element and (b) for every
// ordered pair. Violations come back sorted, independent of thread count.
std::vector<FrequencyViolation> verify_properties(const FrequencySets& sets);
std::vector<FrequencyViolation> verify_properties_serial(const FrequencySets& sets);

}  // namespace shiftlab
