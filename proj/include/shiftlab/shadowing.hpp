#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shiftlab/classify.hpp"
#include "shiftlab/finite_vector.hpp"
#include "shiftlab/weights.hpp"

namespace shiftlab {

enum class DefectStyle { Random, ConstantAtZero };
std::string to_string(DefectStyle s);
DefectStyle parse_defect_style(const std::string& text);

// x_n for n = -T..T with x_{n+1} = B_w x_n + d_n.
struct Pseudotrajectory {
  std::int64_t T = 0;
  double delta = 0.0;
  std::uint64_t seed = 0;
  DefectStyle style = DefectStyle::Random;
  NormKind norm;
  std::vector<FiniteVector> points;   // points[n + T] = x_n
  std::vector<FiniteVector> defects;  // defects[n + T] = d_n, n = -T..T-1

  const FiniteVector& x(std::int64_t n) const { return points.at(static_cast<std::size_t>(n + T)); }
  const FiniteVector& d(std::int64_t n) const { return defects.at(static_cast<std::size_t>(n + T)); }
};

Pseudotrajectory make_pseudotrajectory(const WeightModel& model, const FiniteVector& x_start,
                                       double delta, std::int64_t T, std::uint64_t seed,
                                       DefectStyle style);
// Same recursion with caller-supplied defects d_{-T}, ..., d_{T-1}.
Pseudotrajectory make_pseudotrajectory_from_defects(const WeightModel& model,
                                                    const FiniteVector& x_start,
                                                    std::vector<FiniteVector> defects,
                                                    double delta);
// The pseudotrajectory with every defect multiplied by c (x_0 kept).
Pseudotrajectory scale_defects(const WeightModel& model, const Pseudotrajectory& pt, double c);

// Stable indices are contracted by B_w, unstable ones by B_w^{-1}.
struct Splitting {
  enum class Kind { AllStable, AllUnstable, Dichotomy };
  Kind kind = Kind::AllStable;

  // A -> all stable, B -> all unstable, C -> stable {n < 0}, unstable {n >= 0}.
  static Splitting from_verdict(Verdict v);
  bool stable(std::int64_t n) const;
  FiniteVector project_stable(const FiniteVector& x) const;
  FiniteVector project_unstable(const FiniteVector& x) const;
  std::string name() const;
};

// sum_n ||B^n P_s|| + sum_n ||B^{-n} P_u|| over n >= 0, bounded via window
// products: with a_r the largest log2 norm of an r-step product and L the
// first length with a_L < 0, a side contributes sum_{r<L} 2^{a_r} / (1 - 2^{a_L}).
struct ShadowConstant {
  double stable = 0.0;
  double unstable = 0.0;
  std::int64_t stable_length = 0;
  std::int64_t unstable_length = 0;
  double total() const { return stable + unstable; }
};

ShadowConstant shadow_constant(const WeightModel& model, const Splitting& splitting,
                               const ClassifyOptions& options = {});

struct ShadowResult {
  FiniteVector x;
  FiniteVector correction;  // x - x_0
  double error = 0.0;       // measured
  double bound = 0.0;       // constant * delta
  // Rounding floor of the measurement: the orbits are compared in doubles,
  // so errors below (2T+1) eps max_n ||x_n|| are not resolved.
  double resolution = 0.0;
  ShadowConstant constant;
  Splitting splitting;
};

// x = x_0 + sum_{j<T} B^{-(j+1)} P_u d_j - sum_{i=1..T} B^{i-1} P_s d_{-i}.
// Needs a verdict in {A, B, C}.
ShadowResult shadow(const WeightModel& model, const Pseudotrajectory& pt,
                    const ClassificationReport& report);

// max_{|n| <= T} ||B_w^n x - x_n||.
double shadow_error(const WeightModel& model, const FiniteVector& x, const Pseudotrajectory& pt);

struct WindowShadow {
  double value = 0.0;
  FiniteVector x;
  int sweeps = 0;
};

// min of the window error over x supported in [-T-2, T+2] widened to T
// beyond the support of x_0 and of every defect, which contains the support
// of shadow(). Exact per coordinate for the sup norm; coordinate sweeps to
// 1e-4 for l_p.
inline constexpr std::int64_t kMaxOracleWindow = 20;
WindowShadow best_window_shadow(const WeightModel& model, const Pseudotrajectory& pt);

struct ShadowSuiteRow {
  std::uint64_t seed;
  double error;
  double bound;
  double resolution;
};

// One random pseudotrajectory from x_0 = 0 per seed, shadowed and measured.
std::vector<ShadowSuiteRow> shadow_suite(const WeightModel& model, const ClassificationReport& report,
                                         double delta, std::int64_t T, std::uint64_t first_seed,
                                         std::int64_t seeds, NormKind norm = NormKind::sup());
std::vector<ShadowSuiteRow> shadow_suite_serial(const WeightModel& model,
                                                const ClassificationReport& report, double delta,
                                                std::int64_t T, std::uint64_t first_seed,
                                                std::int64_t seeds, NormKind norm = NormKind::sup());

}  // namespace shiftlab
