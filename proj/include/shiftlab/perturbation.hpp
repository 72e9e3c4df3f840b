#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shiftlab/finite_vector.hpp"
#include "shiftlab/weights.hpp"

namespace shiftlab {

// rho(s) = max(0, 1 - |s|): 1-Lipschitz, rho(0) = 1, zero off [-1, 1].
struct BumpFunction {
  double operator()(double s) const;
};

struct PerturbationOptions {
  NormKind norm = NormKind::sup();
  // Multiplies the minimal separating kappa. 1.0 keeps kappa minimal.
  double kappa_safety = 1.0;
  // Replaces the computed kappa outright when set. Used to plant
  // deliberately broken constructions for checker tests.
  std::optional<double> kappa_override;
};

// A Lipschitz map alpha with small norm such that the orbit of u under
// B_w + alpha walks through m prescribed balls, gaining delta in a fresh
// coordinate at every step.
struct PerturbationData {
  double delta = 0.0;
  std::int64_t m = 0;
  std::int64_t t = 0;
  double kappa = 0.0;
  NormKind norm;
  // a[k] = w_{2m+t} ... w_{2m+t-k+1}; a[0] = 1.
  std::vector<LogProduct> a;
  std::vector<double> a_value;
  std::vector<FiniteVector> y;
  std::vector<FiniteVector> centers;
  // alpha^{(j)}(centers[j]) as evaluated during the induction.
  std::vector<FiniteVector> induction_values;
  FiniteVector u;

  // Index of the coordinate owned by ball k: m - 1 - k + t.
  std::int64_t component_index(std::int64_t k) const { return m - 1 - k + t; }
  // Index of the large coordinate of centers[k]: 2m + t - k.
  std::int64_t spine_index(std::int64_t k) const { return 2 * m + t - k; }
};

PerturbationData build_perturbation(const WeightModel& model, double delta, std::int64_t m,
                                    std::int64_t t, const PerturbationOptions& options = {});

// alpha(x), using every ball.
FiniteVector evaluate_alpha(const PerturbationData& pert, const FiniteVector& x);

// alpha^{(j)}(x): only balls 0..j are active.
FiniteVector evaluate_alpha_partial(const PerturbationData& pert, const FiniteVector& x,
                                    std::int64_t j);

// (B_w + alpha)^j u for j = 0..steps; steps <= m.
std::vector<FiniteVector> perturbed_orbit(const PerturbationData& pert, const WeightModel& model,
                                          std::int64_t steps);

enum class PerturbationCheck { SupBound, Lipschitz, DeltaHitting, Disjointness, OrbitIdentity, Support };
std::string to_string(PerturbationCheck c);

// Sampling strata for Lipschitz pairs.
enum class PairStratum { SameBall, NearFar, BothFar, Separated };
inline constexpr int kStratumCount = 4;
std::string to_string(PairStratum s);

struct PerturbationViolation {
  PerturbationCheck check;
  std::string detail;
  double observed = 0.0;
  double bound = 0.0;
  std::int64_t sample = -1;
  std::int64_t j = -1;
  std::int64_t k = -1;
  std::optional<FiniteVector> x;
  std::optional<FiniteVector> y;
};

struct PerturbationVerification {
  std::uint64_t seed = 0;
  std::int64_t samples = 0;
  // max ||alpha(x)|| / delta over samples (0 for delta = 0).
  double max_sup_ratio = 0.0;
  // max ||alpha(x) - alpha(y)|| / (delta ||x - y||) over sampled pairs.
  double max_lipschitz_ratio = 0.0;
  std::int64_t pairs_per_stratum[kStratumCount] = {0, 0, 0, 0};
  double min_center_distance = 0.0;
  double max_orbit_error = 0.0;
  std::vector<PerturbationViolation> violations;

  bool ok() const { return violations.empty(); }
  bool passed(PerturbationCheck c) const;
};

// Sampled sup-bound and Lipschitz checks plus the exact structural checks.
// Sample i draws from its own stream of `seed`, so the result does not
// depend on the thread count.
PerturbationVerification verify_perturbation(const PerturbationData& pert, const WeightModel& model,
                                             std::int64_t samples, std::uint64_t seed);
PerturbationVerification verify_perturbation_serial(const PerturbationData& pert,
                                                    const WeightModel& model, std::int64_t samples,
                                                    std::uint64_t seed);

// Smallest m <= m_max with sum_{k<m} 1/(w_{k+1+t} ... w_{m+t}) >= (1+delta)/delta^2.
std::optional<std::int64_t> find_divergence_witness(const WeightModel& model, double delta,
                                                    std::int64_t t, std::int64_t m_max);

struct ContradictionBound {
  double sum = 0.0;        // sum_{k<m} w_{1+t} ... w_{k+t}
  double threshold = 0.0;  // 1 + 1/delta
  bool violated = false;   // sum > threshold
};

ContradictionBound contradiction_bound(const WeightModel& model, double delta, std::int64_t t,
                                       std::int64_t m);

}  // namespace shiftlab
