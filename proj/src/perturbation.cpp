#include "shiftlab/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <tuple>

#include "shiftlab/compensated_sum.hpp"
#include "shiftlab/errors.hpp"
#include "shiftlab/rng.hpp"

namespace shiftlab {

namespace {

constexpr double kLipschitzSlack = 1e-6;
constexpr double kOrbitTolerance = 1e-9;
constexpr std::size_t kMaxSampleViolations = 32;

double dist(const PerturbationData& pert, const FiniteVector& x, const FiniteVector& c) {
  FiniteVector d = x;
  d -= c;
  d.set_norm_kind(pert.norm);
  return d.norm();
}

double norm_of(const PerturbationData& pert, FiniteVector v) {
  v.set_norm_kind(pert.norm);
  return v.norm();
}

double pair_norm(const NormKind& norm, double a, double b) {
  if (norm.is_sup()) return std::max(a, b);
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi * std::pow(1.0 + std::pow(lo / hi, norm.p), 1.0 / norm.p);
}

}  // namespace

double BumpFunction::operator()(double s) const { return std::max(0.0, 1.0 - std::abs(s)); }

PerturbationData build_perturbation(const WeightModel& model, double delta, std::int64_t m,
                                    std::int64_t t, const PerturbationOptions& options) {
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw PreconditionError("delta must be >= 0");
  if (m < 1) throw PreconditionError("m must be >= 1");
  if (t < 0) throw PreconditionError("t must be >= 0");
  if (!model.is_bilateral() || !model.is_bounded() || !(model.lower_bound() > 0.0))
    throw PreconditionError("perturbation needs a bilateral weight model bounded above and below");
  if (!(options.kappa_safety > 0.0)) throw PreconditionError("kappa_safety must be positive");

  PerturbationData p;
  p.delta = delta;
  p.m = m;
  p.t = t;
  p.norm = options.norm;

  for (std::int64_t k = 0; k < m; ++k) {
    p.a.push_back(log_product(model, p.spine_index(k) + 1, k));
    p.a_value.push_back(std::exp2(p.a.back().log2));
  }

  double min_pair = std::numeric_limits<double>::infinity();
  for (std::int64_t j = 0; j < m; ++j)
    for (std::int64_t k = j + 1; k < m; ++k)
      min_pair = std::min(min_pair, pair_norm(p.norm, p.a_value[j], p.a_value[k]));
  // With a single ball there is nothing to separate; 4 matches the m >= 2 scale for w = 1.
  const double minimal = m == 1 ? 4.0 : 4.0 / min_pair;
  p.kappa = options.kappa_override ? *options.kappa_override : minimal * options.kappa_safety;
  if (!(p.kappa > 0.0) || !std::isfinite(p.kappa)) throw PreconditionError("kappa must be positive");

  p.u = FiniteVector::basis(p.spine_index(0), p.kappa, p.norm);

  // The centers are generated as the orbit itself, so re-running the orbit
  // later lands on them bit for bit.
  FiniteVector c = p.u;
  for (std::int64_t j = 0; j < m; ++j) {
    p.centers.push_back(c);
    FiniteVector y = c;
    y.set(p.spine_index(j), 0.0);
    p.y.push_back(y);
    auto value = evaluate_alpha_partial(p, c, j);
    p.induction_values.push_back(value);
    c = apply_shift(model, c, ShiftDirection::Forward) + value;
    c.set_norm_kind(p.norm);
  }
  return p;
}

FiniteVector evaluate_alpha_partial(const PerturbationData& pert, const FiniteVector& x,
                                    std::int64_t j) {
  FiniteVector out(pert.norm);
  if (pert.delta == 0.0) return out;
  const BumpFunction rho;
  const auto last = std::min<std::int64_t>(j, static_cast<std::int64_t>(pert.centers.size()) - 1);
  for (std::int64_t k = 0; k <= last; ++k) {
    const double r = rho(dist(pert, x, pert.centers[k]));
    if (r > 0.0) out.set(pert.component_index(k), pert.delta * r);
  }
  return out;
}

FiniteVector evaluate_alpha(const PerturbationData& pert, const FiniteVector& x) {
  return evaluate_alpha_partial(pert, x, pert.m - 1);
}

std::vector<FiniteVector> perturbed_orbit(const PerturbationData& pert, const WeightModel& model,
                                          std::int64_t steps) {
  if (steps < 0) throw PreconditionError("steps must be >= 0");
  if (steps > pert.m) throw DomainError("the construction says nothing about the orbit beyond m steps");
  std::vector<FiniteVector> orbit{pert.u};
  for (std::int64_t j = 0; j < steps; ++j) {
    auto next = apply_shift(model, orbit.back(), ShiftDirection::Forward) + evaluate_alpha(pert, orbit.back());
    next.set_norm_kind(pert.norm);
    orbit.push_back(std::move(next));
  }
  return orbit;
}

std::string to_string(PerturbationCheck c) {
  switch (c) {
    case PerturbationCheck::SupBound: return "sup-bound";
    case PerturbationCheck::Lipschitz: return "lipschitz";
    case PerturbationCheck::DeltaHitting: return "delta-hitting";
    case PerturbationCheck::Disjointness: return "disjointness";
    case PerturbationCheck::OrbitIdentity: return "orbit-identity";
    case PerturbationCheck::Support: return "support";
  }
  return "?";
}

std::string to_string(PairStratum s) {
  switch (s) {
    case PairStratum::SameBall: return "same-ball";
    case PairStratum::NearFar: return "near-far";
    case PairStratum::BothFar: return "both-far";
    case PairStratum::Separated: return "separated";
  }
  return "?";
}

bool PerturbationVerification::passed(PerturbationCheck c) const {
  return std::none_of(violations.begin(), violations.end(),
                      [c](const PerturbationViolation& v) { return v.check == c; });
}

namespace {

struct SampleAccumulator {
  double max_sup_ratio = 0.0;
  double max_lip_ratio = 0.0;
  std::int64_t strata[kStratumCount] = {0, 0, 0, 0};
  std::vector<PerturbationViolation> violations;

  void merge(const SampleAccumulator& o) {
    max_sup_ratio = std::max(max_sup_ratio, o.max_sup_ratio);
    max_lip_ratio = std::max(max_lip_ratio, o.max_lip_ratio);
    for (int s = 0; s < kStratumCount; ++s) strata[s] += o.strata[s];
    violations.insert(violations.end(), o.violations.begin(), o.violations.end());
  }
};

// A random vector of the given norm, supported near the coordinates the
// construction touches (with an occasional stray coordinate further out).
FiniteVector random_direction(const PerturbationData& pert, std::mt19937_64& rng, double radius) {
  const std::int64_t lo = pert.t - 2;
  const std::int64_t hi = 2 * pert.m + pert.t + 2;
  std::uniform_int_distribution<std::int64_t> index(lo, hi);
  std::uniform_int_distribution<int> count(1, 4);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  FiniteVector d(pert.norm);
  const int n = count(rng);
  for (int i = 0; i < n; ++i) d.add(index(rng), value(rng));
  if (std::uniform_int_distribution<int>(0, 7)(rng) == 0) d.add(hi + 5, value(rng));
  const double nd = d.norm();
  if (nd == 0.0) return FiniteVector::basis(lo, radius, pert.norm);
  d *= radius / nd;
  return d;
}

void check_point(const PerturbationData& pert, const FiniteVector& x, const FiniteVector& ax,
                 std::int64_t sample, SampleAccumulator& acc) {
  const double n = norm_of(pert, ax);
  if (pert.delta > 0.0) acc.max_sup_ratio = std::max(acc.max_sup_ratio, n / pert.delta);
  if (n > pert.delta * (1.0 + 1e-12))
    acc.violations.push_back({PerturbationCheck::SupBound, "||alpha(x)|| exceeds delta", n, pert.delta,
                              sample, -1, -1, x, std::nullopt});
  if (!ax.empty() && (ax.min_index() < pert.t || ax.max_index() > pert.m - 1 + pert.t))
    acc.violations.push_back({PerturbationCheck::Support, "alpha(x) outside {t, ..., m-1+t}",
                              static_cast<double>(ax.min_index()), static_cast<double>(pert.t), sample,
                              -1, -1, x, std::nullopt});
}

void run_sample(const PerturbationData& pert, std::uint64_t seed, std::int64_t i,
                SampleAccumulator& acc) {
  auto rng = stream_rng(seed, static_cast<std::uint64_t>(i));
  const auto stratum = static_cast<PairStratum>(i % kStratumCount);
  std::uniform_int_distribution<std::int64_t> ball(0, pert.m - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto& centers = pert.centers;

  FiniteVector x;
  FiniteVector y;
  const auto k = ball(rng);
  switch (stratum) {
    case PairStratum::SameBall:
      x = centers[k] + random_direction(pert, rng, 1.2 * unit(rng));
      y = centers[k] + random_direction(pert, rng, 1.2 * unit(rng));
      break;
    case PairStratum::NearFar:
      x = centers[k] + random_direction(pert, rng, unit(rng));
      y = centers[k] + random_direction(pert, rng, 1.0 + 2.0 * unit(rng));
      break;
    case PairStratum::BothFar:
      x = centers[k] + random_direction(pert, rng, 1.0 + 3.0 * unit(rng));
      y = x + random_direction(pert, rng, 2.0 * unit(rng));
      break;
    case PairStratum::Separated: {
      if (pert.m >= 2) {
        auto j = ball(rng);
        if (j == k) j = (k + 1) % pert.m;
        x = centers[k] + random_direction(pert, rng, unit(rng));
        y = centers[j] + random_direction(pert, rng, unit(rng));
      } else {
        x = centers[k] + random_direction(pert, rng, unit(rng));
        y = x + random_direction(pert, rng, 2.0 + 3.0 * unit(rng));
      }
      break;
    }
  }
  x.set_norm_kind(pert.norm);
  y.set_norm_kind(pert.norm);
  ++acc.strata[static_cast<int>(stratum)];

  const auto ax = evaluate_alpha(pert, x);
  const auto ay = evaluate_alpha(pert, y);
  check_point(pert, x, ax, i, acc);
  check_point(pert, y, ay, i, acc);

  const double dxy = dist(pert, x, y);
  if (dxy == 0.0) return;
  const double diff = norm_of(pert, ax - ay);
  if (pert.delta > 0.0) acc.max_lip_ratio = std::max(acc.max_lip_ratio, diff / (pert.delta * dxy));
  if (diff > pert.delta * dxy * (1.0 + kLipschitzSlack))
    acc.violations.push_back({PerturbationCheck::Lipschitz,
                              "Lipschitz ratio above delta (" + to_string(stratum) + ")", diff,
                              pert.delta * dxy, i, -1, -1, x, y});
}

void structural_checks(const PerturbationData& pert, const WeightModel& model,
                       PerturbationVerification& rep) {
  rep.min_center_distance = std::numeric_limits<double>::infinity();
  for (std::int64_t j = 0; j < pert.m; ++j)
    for (std::int64_t k = j + 1; k < pert.m; ++k) {
      const double d = dist(pert, pert.centers[j], pert.centers[k]);
      rep.min_center_distance = std::min(rep.min_center_distance, d);
      if (!(d > 2.0))
        rep.violations.push_back({PerturbationCheck::Disjointness, "balls B(c_j,1) and B(c_k,1) meet", d,
                                  2.0, -1, j, k, pert.centers[j], pert.centers[k]});
    }

  const auto orbit = perturbed_orbit(pert, model, pert.m - 1);
  for (std::int64_t j = 0; j < pert.m; ++j) {
    auto closed = pert.y[j];
    closed.add(pert.spine_index(j), pert.kappa * pert.a_value[j]);
    const double err = FiniteVector::relative_difference(orbit[j], closed);
    rep.max_orbit_error = std::max(rep.max_orbit_error, err);
    if (err > kOrbitTolerance)
      rep.violations.push_back({PerturbationCheck::OrbitIdentity, "orbit differs from closed form", err,
                                kOrbitTolerance, -1, j, -1, orbit[j], closed});
  }
  for (std::int64_t k = 0; k < pert.m; ++k) {
    const auto& x = orbit[pert.m - k - 1];
    const double v = evaluate_alpha(pert, x)[k + pert.t];
    if (std::abs(v - pert.delta) > kOrbitTolerance * pert.delta)
      rep.violations.push_back({PerturbationCheck::DeltaHitting, "alpha_{k+t} along the orbit is not delta",
                                v, pert.delta, -1, pert.m - k - 1, k, x, std::nullopt});
  }
  for (std::int64_t j = 0; j < pert.m; ++j) {
    if (!(evaluate_alpha(pert, pert.centers[j]) == pert.induction_values[j]))
      rep.violations.push_back({PerturbationCheck::SupBound,
                                "final alpha differs from the induction value at a center", 0.0, 0.0,
                                -1, j, -1, pert.centers[j], std::nullopt});
  }
}

PerturbationVerification finish(const PerturbationData& pert, const WeightModel& model,
                                 std::int64_t samples, std::uint64_t seed, SampleAccumulator acc) {
  PerturbationVerification rep;
  rep.seed = seed;
  rep.samples = samples;
  rep.max_sup_ratio = acc.max_sup_ratio;
  rep.max_lipschitz_ratio = acc.max_lip_ratio;
  for (int s = 0; s < kStratumCount; ++s) rep.pairs_per_stratum[s] = acc.strata[s];
  structural_checks(pert, model, rep);
  std::sort(acc.violations.begin(), acc.violations.end(), [](const auto& a, const auto& b) {
    return std::tie(a.sample, a.check) < std::tie(b.sample, b.check);
  });
  if (acc.violations.size() > kMaxSampleViolations) acc.violations.resize(kMaxSampleViolations);
  rep.violations.insert(rep.violations.end(), acc.violations.begin(), acc.violations.end());
  return rep;
}

}  // namespace

PerturbationVerification verify_perturbation(const PerturbationData& pert, const WeightModel& model,
                                             std::int64_t samples, std::uint64_t seed) {
  if (samples < 0) throw PreconditionError("samples must be >= 0");
  SampleAccumulator total;
#pragma omp parallel
  {
    SampleAccumulator local;
#pragma omp for schedule(dynamic, 64) nowait
    for (std::int64_t i = 0; i < samples; ++i) run_sample(pert, seed, i, local);
#pragma omp critical(shiftlab_perturbation_merge)
    total.merge(local);
  }
  return finish(pert, model, samples, seed, std::move(total));
}

PerturbationVerification verify_perturbation_serial(const PerturbationData& pert,
                                                    const WeightModel& model, std::int64_t samples,
                                                    std::uint64_t seed) {
  if (samples < 0) throw PreconditionError("samples must be >= 0");
  SampleAccumulator total;
  for (std::int64_t i = 0; i < samples; ++i) run_sample(pert, seed, i, total);
  return finish(pert, model, samples, seed, std::move(total));
}

std::optional<std::int64_t> find_divergence_witness(const WeightModel& model, double delta,
                                                    std::int64_t t, std::int64_t m_max) {
  if (!(delta > 0.0)) throw PreconditionError("delta must be > 0");
  if (t < 0) throw PreconditionError("t must be >= 0");
  const double threshold = (1.0 + delta) / (delta * delta);
  // S(m) = sum_{k<m} 1/(w_{k+1+t} ... w_{m+t}) obeys S(m+1) = (S(m) + 1) / w_{m+1+t}.
  // The loop stops at the threshold, so S stays below (threshold + 1) / inf w.
  double s = 0.0;
  for (std::int64_t m = 1; m <= m_max; ++m) {
    s = (s + 1.0) / model.weight_at(m + t);
    if (s >= threshold) return m;
  }
  return std::nullopt;
}

ContradictionBound contradiction_bound(const WeightModel& model, double delta, std::int64_t t,
                                       std::int64_t m) {
  if (!(delta > 0.0)) throw PreconditionError("delta must be > 0");
  if (m < 1 || t < 0) throw PreconditionError("need m >= 1 and t >= 0");
  CompensatedSum sum;
  double log_prod = 0.0;
  sum.add(1.0);
  for (std::int64_t k = 1; k < m; ++k) {
    log_prod += model.log2_weight_at(k + t);
    sum.add(std::exp2(log_prod));
  }
  ContradictionBound b;
  b.sum = sum.value();
  b.threshold = 1.0 + 1.0 / delta;
  b.violated = b.sum > b.threshold;
  return b;
}

}  // namespace shiftlab
