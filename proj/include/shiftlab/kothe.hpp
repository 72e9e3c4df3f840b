#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "shiftlab/finite_vector.hpp"
#include "shiftlab/freq_sets.hpp"
#include "shiftlab/log_magnitude.hpp"
#include "shiftlab/power_series.hpp"
#include "shiftlab/weights.hpp"

namespace shiftlab {

// alpha_n, exact.
mpz_class build_alpha(const PowerSeriesSpace& space, std::int64_t n);

// ||x||_p = sup_n |x_n| p^{alpha_n}. Indices must be >= 0.
LogMagnitude seminorm(const PowerSeriesSpace& space, std::uint64_t p, const FiniteVector& x);

// (alpha_0 + ... + alpha_{N-1}) / alpha_N, exact. N >= 1.
mpq_class chaos_ratio(const PowerSeriesSpace& space, std::int64_t n);

enum class ChaosEvidence { Diverges, Bounded };
std::string to_string(ChaosEvidence e);

struct ChaosTracePoint {
  std::int64_t n;
  mpq_class ratio;
  bool block_start;
};

// Finite-horizon evidence only. Over the decision points, Diverges when the
// minimum over the later half is at least twice the overall minimum.
struct ChaosVerdict {
  ChaosEvidence evidence = ChaosEvidence::Bounded;
  std::vector<ChaosTracePoint> trace;
  double first_tail_min = 0.0;
  double last_tail_min = 0.0;
  // max ratio over block starts in the trace (the liminf-witnessing subsequence).
  std::optional<mpq_class> block_start_max;
};

// The space's block starts up to the horizon are added to the checkpoints and
// are the decision points (they witness the liminf) when there are two or more.
ChaosVerdict supports_chaotic_verdict(const PowerSeriesSpace& space,
                                      std::span<const std::int64_t> checkpoints);
// Raw sequence alpha[0..]; must be positive, nondecreasing, and still
// increasing over the second half of the range (a sequence that has stopped
// growing cannot be told apart from one that is eventually constant).
// Every checkpoint is a decision point.
ChaosVerdict supports_chaotic_verdict(std::span<const mpz_class> alpha,
                                      std::span<const std::int64_t> checkpoints);

// Weights 2^{e_n}: e_n = alpha_n off block starts, e_{N_k} = alpha_{N_k} - (alpha_{N_{k-1}} + ... + alpha_{N_k - 1}).
WeightModel build_fhc_weights(std::shared_ptr<const PowerSeriesSpace> space);

struct ContinuityViolation {
  std::uint64_t p;
  std::int64_t n;
  double margin;
};

// Checks w_{n+1} p^{alpha_n} <= (2p)^{alpha_{n+1}} for p = 1..p_max and
// 0 <= n < horizon, i.e. margin = (alpha_{n+1} - log2 w_{n+1}) + (alpha_{n+1} - alpha_n) log2 p >= 0.
struct ContinuityReport {
  std::uint64_t p_max = 0;
  std::int64_t horizon = 0;
  double tightest_margin = 0.0;
  std::uint64_t tightest_p = 0;
  std::int64_t tightest_n = 0;
  std::int64_t checked = 0;
  std::int64_t violation_count = 0;
  std::vector<ContinuityViolation> violations;  // first few, by (p, n)
  bool exact = false;                            // all comparisons done in integers

  bool ok() const { return violation_count == 0; }
};

ContinuityReport continuity_check(const PowerSeriesSpace& space, const WeightModel& model,
                                  std::uint64_t p_max, std::int64_t horizon);

// v_n = 1/(w_1 ... w_n) in closed form.
LogMagnitude v_value(const WeightModel& model, std::int64_t n);
// log2 v_n for n = 0..n_max by summing the weight exponents one by one.
std::vector<mpz_class> telescoped_log2_v(const WeightModel& model, std::int64_t n_max);

// An exact real of the form integer + fraction with fraction in [0, 1).
struct ExactLog2 {
  mpz_class integer;
  double fraction = 0.0;

  double approx() const { return integer.get_d() + fraction; }
};
int compare(const ExactLog2& a, const ExactLog2& b);

struct FhcTracePoint {
  std::int64_t n;      // element of A_r
  std::int64_t block;  // k with N_k <= n < N_{k+1}
  ExactLog2 value;     // log2(p^{alpha_{n+r}} v_{n+r})
  double bound;        // 1 + alpha_{N_k} (log2 p - k), rounded
};

struct FhcViolation {
  std::string kind;
  std::int64_t m = -1;
  std::int64_t n = -1;
  std::int64_t j = -1;
  double value = 0.0;
  double bound = 0.0;
};

struct FhcConditionI {
  std::int64_t r = 0;
  std::uint64_t p = 0;
  std::vector<FhcTracePoint> trace;
  bool strictly_decreasing_blocks = false;
  // Strict decrease restricted to blocks with k > log2 p, where the bound is negative.
  bool eventually_decreasing = false;
  std::optional<double> last_value;
  std::vector<FhcViolation> violations;

  bool reaches_below(double level) const { return last_value && *last_value < level; }
};

// Requires the space horizon to cover every n + r with n in A_r.
FhcConditionI verify_fhc_condition_i(const PowerSeriesSpace& space, const FrequencySets& sets,
                                     std::int64_t r, std::uint64_t p);

struct FhcConditionII {
  std::int64_t r = 0;
  std::int64_t s = 0;
  double threshold = 0.0;  // log2 min(eps_r, eps_s), eps_r = r 2^{-r}
  std::int64_t triples = 0;
  double max_value = 0.0;  // max log2(s^{alpha_d} v_d), d = n - m + j
  std::int64_t witness_m = -1;
  std::int64_t witness_n = -1;
  std::int64_t witness_j = -1;
  bool chain_holds_at_witness = true;
  std::int64_t violation_count = 0;
  std::vector<FhcViolation> violations;  // first few, by (m, n, j)

  bool ok() const { return violation_count == 0; }
};

// All m in A_s, n in A_r with n > m and j = 0..r.
FhcConditionII verify_fhc_condition_ii(const PowerSeriesSpace& space, const FrequencySets& sets,
                                       std::int64_t r, std::int64_t s);
FhcConditionII verify_fhc_condition_ii_serial(const PowerSeriesSpace& space,
                                              const FrequencySets& sets, std::int64_t r,
                                              std::int64_t s);

// log2(eps_r) with eps_r = r 2^{-r}.
double log2_epsilon(std::int64_t r);

}  // namespace shiftlab
