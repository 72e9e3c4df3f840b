#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shiftlab/weights.hpp"

namespace shiftlab {

// The asymptotic product conditions on a bilateral weight sequence.
//   Sss1:  lim_n sup_{k>=1} (w_k ... w_{k+n})^{1/n} < 1
//   Sss2:  lim_n inf_{k>=1} (w_k ... w_{k+n})^{1/n} > 1
//   Sss5:  lim_n inf_{k>=1} (w_{-k} ... w_{-k-n})^{1/n} > 1
//   Sss6:  lim_n sup_{k>=1} (w_{-k} ... w_{-k-n})^{1/n} < 1
//   ASupZ: Sss1 with k ranging over Z
//   BInfZ: Sss2 with k ranging over Z
enum class ConditionId { Sss1, Sss2, Sss5, Sss6, ASupZ, BInfZ };
inline constexpr std::array<ConditionId, 6> kAllConditions = {
    ConditionId::Sss1, ConditionId::Sss2, ConditionId::Sss5,
    ConditionId::Sss6, ConditionId::ASupZ, ConditionId::BInfZ};

enum class Extremum { Sup, Inf };
enum class Decision { Holds, Fails, Inconclusive };
enum class Verdict { A, B, C, None, Inconclusive };

struct ConditionShape {
  Side side;
  Extremum extremum;
  bool below_one;  // "sup < 1" when true, "inf > 1" otherwise
};
ConditionShape condition_shape(ConditionId id);

std::string to_string(ConditionId id);
std::string to_string(Decision d);
std::string to_string(Verdict v);
std::string to_string(Side s);

struct TracePoint {
  std::int64_t length;
  double bound;  // log2 units
};

struct ConditionEvidence {
  ConditionId id = ConditionId::Sss1;
  Decision decision = Decision::Inconclusive;
  // (L, extremum_k (1/L) log2(product of L consecutive weights)), L = 1..n_max.
  std::vector<TracePoint> trace;
  // Same windows in the (n+1 factors)^{1/n} convention, n = 1..n_max-1.
  std::vector<TracePoint> offset_trace;
  std::optional<double> exact_limit;
  // True when the finite k-sweep provably visits every distinct window.
  bool rigorous_sweep = false;
  std::optional<std::int64_t> certificate_length;
  std::string reason;
};

struct ClassifyOptions {
  std::int64_t n_max = 64;
  double margin = 0.05;
  std::int64_t k_max = 10000;
};

// extremum over k of (1/L) log2(product of L consecutive weights), with the
// window for k running over [k, k+L-1] (Pos, k = 1..k_max),
// [-k-L+1, -k] (Neg, k = 1..k_max) or [k, k+L-1] (All, k = -k_max..k_max).
double window_statistic(const WeightModel& model, std::int64_t length, Side side, Extremum extremum,
                        std::int64_t k_max);

// Decide one condition. Subadditivity of a_L = sup_k(window sum) gives
// lim a_L/L = inf_L a_L/L, so a_L/L <= -margin certifies "sup < 1"; the inf
// side is symmetric. Symbolic tails (Constant/Periodic) decide exactly.
ConditionEvidence decide_condition(const WeightModel& model, ConditionId id,
                                   const ClassifyOptions& options = {});

struct ClassificationReport {
  std::array<ConditionEvidence, 6> conditions;
  Verdict verdict = Verdict::Inconclusive;
  bool hyperbolic = false;
  bool generalized_hyperbolic = false;
  bool sss = false;
  bool lemma23_pattern = false;
  ClassifyOptions options;

  // Strong structural stability and the shadowing property coincide for
  // invertible bilateral weighted shifts, so this is the same flag.
  bool shadowing() const { return sss; }
  const ConditionEvidence& evidence(ConditionId id) const {
    return conditions[static_cast<std::size_t>(id)];
  }
};

ClassificationReport classify_sss(const WeightModel& model, const ClassifyOptions& options = {});

struct Lemma23Detection {
  bool detected = false;
  ConditionEvidence pos_sup;  // Sss1
  ConditionEvidence neg_inf;  // Sss5
};

// Sss1 and Sss5 both certified: the shift is not strongly structurally stable.
Lemma23Detection detect_lemma23(const WeightModel& model, const ClassifyOptions& options = {});

enum class Growth { Bounded, Growing, Unknown };
std::string to_string(Growth g);

// The three equivalent quantities for a bounded positive sequence x_k = w_k, k >= 1:
// (i) the limit condition, (ii) sup_t sum_{k>=0} x_{1+t}...x_{k+t},
// (iii) sup_m sum_{k<m} x_{m-k}...x_m, evaluated on finite horizons.
struct Lemma22Quantities {
  ConditionEvidence limit;  // (i)
  // ii_by_horizon[K] = max_{t <= t_max} sum_{k=0}^{K} x_{1+t}...x_{k+t}.
  std::vector<double> ii_by_horizon;
  // iii_by_horizon[K-1] = max_{m <= m_max} sum_{k=0}^{min(K,m)-1} x_{m-k}...x_m.
  std::vector<double> iii_by_horizon;
  Growth growth_i = Growth::Unknown;
  Growth growth_ii = Growth::Unknown;
  Growth growth_iii = Growth::Unknown;
  bool overflow = false;

  double ii() const { return ii_by_horizon.back(); }
  double iii() const { return iii_by_horizon.back(); }
};

Lemma22Quantities lemma22_quantities(const WeightModel& x, std::int64_t t_max, std::int64_t m_max,
                                     const ClassifyOptions& options = {});

// A horizon sequence is "growing" when its last value exceeds 1.25 times its
// value at half the horizon (or is not finite).
Growth growth_of(const std::vector<double>& by_horizon);

}  // namespace shiftlab
