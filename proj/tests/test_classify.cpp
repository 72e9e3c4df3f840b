#include <doctest.h>

#include <cmath>
#include <random>

#include "shiftlab/classify.hpp"
#include "shiftlab/errors.hpp"
#include "shiftlab/weights.hpp"

using namespace shiftlab;

namespace {

WeightModel split(double neg, double pos, std::int64_t cut = 1) {
  return WeightModel::split(WeightModel::constant(neg), WeightModel::constant(pos), cut);
}

Verdict swapped(Verdict v) {
  if (v == Verdict::A) return Verdict::B;
  if (v == Verdict::B) return Verdict::A;
  return v;
}

// log2-uniform table on [lo, hi] with constant fills; mean drift mu per step
WeightModel noisy_table(std::mt19937_64& rng, double mu_neg, double mu_pos, std::int64_t half) {
  std::uniform_real_distribution<double> noise(-0.5, 0.5);
  std::map<std::int64_t, double> t;
  for (std::int64_t n = -half; n <= half; ++n) t[n] = std::exp2((n < 1 ? mu_neg : mu_pos) + noise(rng));
  return WeightModel::explicit_table(std::move(t), std::exp2(mu_neg), std::exp2(mu_pos));
}

}  // namespace

TEST_CASE("window statistic examples") {
  CHECK(window_statistic(WeightModel::constant(2), 2, Side::Pos, Extremum::Sup, 100) == 1.0);
  CHECK(window_statistic(WeightModel::periodic({2.0, 0.5}), 2, Side::Pos, Extremum::Sup, 100) == 0.0);
  CHECK(window_statistic(split(0.5, 2.0), 8, Side::Neg, Extremum::Sup, 100) == -1.0);
  // windows straddling the cut only exist on the All side
  CHECK(window_statistic(split(0.5, 2.0), 2, Side::All, Extremum::Sup, 100) == 1.0);
  CHECK(window_statistic(split(0.5, 2.0), 2, Side::All, Extremum::Inf, 100) == -1.0);
}

TEST_CASE("decide_condition examples") {
  ClassifyOptions o;
  o.n_max = 4;
  o.margin = 0.5;
  const auto e = decide_condition(WeightModel::constant(0.5), ConditionId::Sss1, o);
  CHECK(e.decision == Decision::Holds);
  REQUIRE(e.trace.size() == 4);
  for (const auto& p : e.trace) CHECK(p.bound == -1.0);
  CHECK(decide_condition(WeightModel::constant(1), ConditionId::Sss1).decision == Decision::Fails);
  ClassifyOptions o8;
  o8.n_max = 8;
  CHECK(decide_condition(split(0.5, 2.0), ConditionId::Sss2, o8).decision == Decision::Holds);
}

TEST_CASE("explicit tables are decided by certificates") {
  std::map<std::int64_t, double> t;
  for (std::int64_t n = -20; n <= 20; ++n) t[n] = n % 3 == 0 ? 1.5 : 0.5;
  const auto m = WeightModel::explicit_table(t, 0.5, 0.5);
  const auto e = decide_condition(m, ConditionId::ASupZ);
  CHECK(e.decision == Decision::Holds);
  CHECK_FALSE(e.exact_limit);
  CHECK(e.certificate_length);
  CHECK(classify_sss(m).verdict == Verdict::A);
}

TEST_CASE("verdicts on the reference models") {
  const auto a = classify_sss(WeightModel::constant(0.5));
  CHECK(a.verdict == Verdict::A);
  CHECK(a.hyperbolic);
  CHECK(a.sss);
  CHECK(a.shadowing());
  CHECK(classify_sss(WeightModel::constant(2)).verdict == Verdict::B);
  const auto c = classify_sss(split(0.5, 2.0));
  CHECK(c.verdict == Verdict::C);
  CHECK(c.generalized_hyperbolic);
  CHECK_FALSE(c.hyperbolic);
  const auto one = classify_sss(WeightModel::constant(1));
  CHECK(one.verdict == Verdict::None);
  CHECK_FALSE(one.sss);
  const auto l23 = classify_sss(split(2.0, 0.5));
  CHECK(l23.verdict == Verdict::None);
  CHECK(l23.lemma23_pattern);
}

TEST_CASE("contracting-right expanding-left detector") {
  CHECK(detect_lemma23(split(2.0, 0.5)).detected);
  CHECK_FALSE(detect_lemma23(split(0.5, 2.0)).detected);
  CHECK_FALSE(detect_lemma23(WeightModel::constant(1)).detected);
}

TEST_CASE("constant-weight oracle") {
  for (double c : {0.1, 0.5, 0.9, 0.97, 1.0, 1.04, 1.5, 3.0, 100.0}) {
    const auto v = classify_sss(WeightModel::constant(c)).verdict;
    if (c < 1) CHECK(v == Verdict::A);
    if (c > 1) CHECK(v == Verdict::B);
    if (c == 1) CHECK(v == Verdict::None);
  }
}

TEST_CASE("conjugacy swap") {
  std::vector<WeightModel> models = {WeightModel::constant(0.5), WeightModel::constant(2), split(0.5, 2.0),
                                     WeightModel::constant(1), split(2.0, 0.5)};
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> lw(-2.0, 2.0);
  for (int i = 0; i < 20; ++i) {
    std::vector<double> v(1 + i % 4);
    for (auto& x : v) x = std::exp2(lw(rng));
    models.push_back(WeightModel::periodic(v, i - 10));
    models.push_back(WeightModel::split(WeightModel::periodic(v), WeightModel::constant(std::exp2(lw(rng))), i - 5));
  }
  for (int i = 0; i < 6; ++i) models.push_back(noisy_table(rng, i % 2 ? 0.6 : -0.6, i % 3 ? 0.7 : -0.7, 30));
  int decided = 0;
  for (const auto& m : models) {
    const auto v = classify_sss(m).verdict;
    const auto w = classify_sss(m.reflected_inverse()).verdict;
    if (v == Verdict::Inconclusive || w == Verdict::Inconclusive) continue;
    ++decided;
    CHECK_MESSAGE(w == swapped(v), m.describe());
  }
  CHECK(decided >= 40);
}

TEST_CASE("subadditivity of the sup statistic") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 4; ++i) {
    const auto m = noisy_table(rng, -0.2, 0.3, 300);
    for (std::int64_t l1 = 1; l1 <= 24; ++l1)
      for (std::int64_t l2 = 1; l2 <= 24; ++l2) {
        const double a = [&](std::int64_t l) {
          return static_cast<double>(l) * window_statistic(m, l, Side::Pos, Extremum::Sup, 400);
        }(l1 + l2);
        const double b = static_cast<double>(l1) * window_statistic(m, l1, Side::Pos, Extremum::Sup, 400) +
                         static_cast<double>(l2) * window_statistic(m, l2, Side::Pos, Extremum::Sup, 400);
        CHECK(a <= b + 1e-9);
      }
  }
}

TEST_CASE("report flags are consistent") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> lw(-1.5, 1.5);
  for (int i = 0; i < 40; ++i) {
    const auto r = classify_sss(split(std::exp2(lw(rng)), std::exp2(lw(rng)), i));
    CHECK(r.sss == r.shadowing());
    CHECK(r.hyperbolic == (r.verdict == Verdict::A || r.verdict == Verdict::B));
    CHECK(r.sss == (r.verdict == Verdict::A || r.verdict == Verdict::B || r.verdict == Verdict::C));
    if (r.lemma23_pattern) CHECK(r.verdict == Verdict::None);
  }
}

TEST_CASE("unilateral and unbounded models are rejected") {
  auto space = std::make_shared<const PowerSeriesSpace>(BlockRule::geometric(4), 100);
  CHECK_THROWS_AS(classify_sss(WeightModel::fhc_block(space)), PreconditionError);
}

TEST_CASE("summability quantities") {
  const auto half = lemma22_quantities(WeightModel::constant(0.5), 60, 60);
  CHECK(half.limit.decision == Decision::Holds);
  CHECK(std::abs(half.ii() - 2.0) <= 1e-9);
  CHECK(std::abs(half.iii() - 1.0) <= 1e-9);
  // finite-horizon closed forms
  for (std::size_t K = 0; K < half.ii_by_horizon.size(); ++K)
    CHECK(half.ii_by_horizon[K] == doctest::Approx(2.0 - std::ldexp(1.0, -static_cast<int>(K))).epsilon(1e-14));
  for (std::size_t m = 1; m <= half.iii_by_horizon.size(); ++m)
    CHECK(half.iii_by_horizon[m - 1] == doctest::Approx(1.0 - std::ldexp(1.0, -static_cast<int>(m))).epsilon(1e-14));
  CHECK(half.growth_ii == Growth::Bounded);
  CHECK(half.growth_iii == Growth::Bounded);

  const auto one = lemma22_quantities(WeightModel::constant(1), 60, 60);
  CHECK(one.limit.decision == Decision::Fails);
  CHECK(one.ii() == 61.0);
  CHECK(one.iii() == 60.0);
  CHECK(one.ii() > 50);
  CHECK(one.iii() > 50);
  CHECK(one.growth_ii == Growth::Growing);
  CHECK(one.growth_iii == Growth::Growing);

  const auto two = lemma22_quantities(WeightModel::constant(2), 60, 60);
  CHECK(two.ii() == doctest::Approx(std::exp2(61) - 1));
  CHECK(two.growth_ii == Growth::Growing);
  CHECK(two.growth_iii == Growth::Growing);
}

TEST_CASE("summability indicators agree on random bounded sequences") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> mag(0.3, 1.0);
  int certified = 0, tried = 0;
  while (certified < 20 && tried < 200) {
    ++tried;
    const double mu = (tried % 2 ? -1.0 : 1.0) * mag(rng);
    const auto m = noisy_table(rng, mu, mu, 200);
    const auto q = lemma22_quantities(m, 60, 60);
    if (q.growth_i == Growth::Unknown) continue;
    ++certified;
    CHECK_MESSAGE(q.growth_ii == q.growth_i, "mu = " << mu);
    CHECK_MESSAGE(q.growth_iii == q.growth_i, "mu = " << mu);
  }
  CHECK(certified == 20);
}
