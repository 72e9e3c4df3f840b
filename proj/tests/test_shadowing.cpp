#include <doctest.h>

#include <cmath>

#include "shiftlab/errors.hpp"
#include "shiftlab/shadowing.hpp"

using namespace shiftlab;

namespace {

WeightModel c_model() {
  return WeightModel::split(WeightModel::constant(0.5), WeightModel::constant(2.0), 1);
}

WeightModel l23_model() {
  return WeightModel::split(WeightModel::constant(2.0), WeightModel::constant(0.5), 1);
}

bool supported_in(const FiniteVector& x, const Splitting& s, bool stable) {
  for (const auto& [n, v] : x.coefficients())
    if (s.stable(n) != stable) return false;
  return true;
}

}  // namespace

TEST_CASE("pseudotrajectory recursion and defects") {
  const auto w = c_model();
  const FiniteVector x0{{0, 1.0}, {-2, 0.5}};
  const auto pt = make_pseudotrajectory(w, x0, 0.1, 6, 42, DefectStyle::Random);
  CHECK(pt.x(0) == x0);
  for (std::int64_t n = -6; n < 6; ++n) {
    const auto next = apply_shift(w, pt.x(n), ShiftDirection::Forward) + pt.d(n);
    CHECK(FiniteVector::relative_difference(pt.x(n + 1), next) <= 1e-12);
  }
  const auto adv = make_pseudotrajectory(w, x0, 0.1, 3, 1, DefectStyle::ConstantAtZero);
  for (std::int64_t n = -3; n < 3; ++n) CHECK(adv.d(n) == FiniteVector{{0, 0.1}});
}

TEST_CASE("defect norms never exceed delta") {
  const auto w = WeightModel::constant(0.5);
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto pt = make_pseudotrajectory(w, FiniteVector{}, 0.01, 5, seed, DefectStyle::Random);
    for (const auto& d : pt.defects) REQUIRE(d.norm() <= 0.01 * (1 + 1e-15));
  }
}

TEST_CASE("zero delta gives the exact orbit") {
  const auto w = c_model();
  const FiniteVector x0{{3, 1.0}, {-1, 2.0}};
  const auto pt = make_pseudotrajectory(w, x0, 0.0, 5, 1, DefectStyle::Random);
  for (std::int64_t n = -5; n <= 5; ++n)
    CHECK(FiniteVector::relative_difference(pt.x(n), apply_shift_power(w, x0, n)) <= 1e-12);
  const auto report = classify_sss(w);
  const auto r = shadow(w, pt, report);
  CHECK(r.x == x0);
  CHECK(r.error == 0.0);
  CHECK(shadow_error(w, x0, pt) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(best_window_shadow(w, pt).value <= 1e-12);
}

TEST_CASE("shadow constants") {
  const auto c = shadow_constant(c_model(), Splitting::from_verdict(Verdict::C));
  CHECK(c.total() == doctest::Approx(4.0));
  const auto a = shadow_constant(WeightModel::constant(0.5), Splitting::from_verdict(Verdict::A));
  CHECK(a.total() == doctest::Approx(2.0));
  CHECK(a.unstable == 0.0);
  const auto b = shadow_constant(WeightModel::constant(4.0), Splitting::from_verdict(Verdict::B));
  CHECK(b.total() == doctest::Approx(1.0 / (1 - 0.25)));
}

TEST_CASE("condition C suite: 100 seeds within 4 delta") {
  const auto w = c_model();
  const auto report = classify_sss(w);
  REQUIRE(report.verdict == Verdict::C);
  const auto rows = shadow_suite(w, report, 0.01, 50, 1, 100);
  REQUIRE(rows.size() == 100);
  for (const auto& r : rows) {
    CHECK(r.bound == doctest::Approx(0.04));
    CHECK(r.error <= 4 * 0.01);
  }
  const auto serial = shadow_suite_serial(w, report, 0.01, 50, 1, 100);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].seed == serial[i].seed);
    CHECK(rows[i].error == serial[i].error);
  }
}

TEST_CASE("A and B models stay within their bounds") {
  for (double c : {0.5, 0.8, 1.5, 2.0}) {
    const auto w = WeightModel::constant(c);
    const auto report = classify_sss(w);
    for (const auto& r : shadow_suite(w, report, 0.01, 50, 7, 100)) CHECK(r.error <= r.bound);
  }
  // 3^50 delta is far beyond double resolution; at T = 20 it is not
  const auto three = WeightModel::constant(3.0);
  for (const auto& r : shadow_suite(three, classify_sss(three), 0.01, 20, 7, 30)) {
    CHECK(r.resolution < r.bound);
    CHECK(r.error <= r.bound);
  }
  for (const auto& r : shadow_suite(three, classify_sss(three), 0.01, 50, 7, 5)) {
    CHECK(r.resolution > r.bound);
    CHECK(r.error <= r.bound + r.resolution);
  }
  const auto w = WeightModel::split(WeightModel::periodic({0.4, 0.9}), WeightModel::periodic({3.0, 1.2}), -2);
  const auto report = classify_sss(w);
  REQUIRE(report.verdict == Verdict::C);
  for (const auto& r : shadow_suite(w, report, 0.01, 50, 7, 100)) CHECK(r.error <= r.bound);
}

TEST_CASE("correction is linear in the defects") {
  const auto w = c_model();
  const auto report = classify_sss(w);
  const auto pt = make_pseudotrajectory(w, FiniteVector{{2, 1.0}}, 0.01, 20, 3, DefectStyle::Random);
  const auto base = shadow(w, pt, report).correction;
  for (double c : {2.0, -0.5, 10.0, 1e-3}) {
    const auto scaled = shadow(w, scale_defects(w, pt, c), report).correction;
    CHECK(FiniteVector::relative_difference(scaled, c * base) <= 1e-9);
  }
}

TEST_CASE("splitting invariance") {
  const auto w = c_model();
  const auto s = Splitting::from_verdict(Verdict::C);
  FiniteVector stable, unstable;
  for (std::int64_t n = -10; n < 0; ++n) stable.add(n, 1.0 + n);
  for (std::int64_t n = 0; n < 10; ++n) unstable.add(n, 1.0 + n);
  CHECK(supported_in(apply_shift(w, stable, ShiftDirection::Forward), s, true));
  CHECK(supported_in(apply_shift(w, unstable, ShiftDirection::Inverse), s, false));
  const FiniteVector x{{-3, 1.0}, {0, 2.0}, {4, -1.0}};
  CHECK(s.project_stable(x) + s.project_unstable(x) == x);
  CHECK(supported_in(s.project_stable(x), s, true));
  CHECK(Splitting::from_verdict(Verdict::A).stable(100));
  CHECK_FALSE(Splitting::from_verdict(Verdict::B).stable(-100));
  CHECK_THROWS_AS(Splitting::from_verdict(Verdict::None), PreconditionError);
}

TEST_CASE("shadow needs a decided splitting") {
  const auto w = WeightModel::constant(1);
  const auto pt = make_pseudotrajectory(w, FiniteVector{}, 0.01, 5, 1, DefectStyle::Random);
  CHECK_THROWS_AS(shadow(w, pt, classify_sss(w)), PreconditionError);
}

TEST_CASE("window oracle is below the constructed shadow") {
  const auto w = c_model();
  const auto report = classify_sss(w);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto pt = make_pseudotrajectory(w, FiniteVector{}, 0.01, 8, seed, DefectStyle::Random);
    const auto s = shadow(w, pt, report);
    const auto o = best_window_shadow(w, pt);
    CHECK(o.value <= s.error + 1e-12);
    CHECK(shadow_error(w, o.x, pt) == doctest::Approx(o.value));
  }
}

TEST_CASE("contracting-right expanding-left model: oracle grows with T") {
  const auto w = l23_model();
  double prev = -1;
  for (std::int64_t T : {5, 10, 20}) {
    const auto pt = make_pseudotrajectory(w, FiniteVector{}, 0.01, T, 0, DefectStyle::ConstantAtZero);
    const double v = best_window_shadow(w, pt).value;
    CHECK(v > prev);
    prev = v;
  }
  CHECK_THROWS_AS(best_window_shadow(w, make_pseudotrajectory(w, FiniteVector{}, 0.01, 21, 0,
                                                               DefectStyle::ConstantAtZero)),
                  PreconditionError);
}

TEST_CASE("defect style names") {
  CHECK(parse_defect_style("random") == DefectStyle::Random);
  CHECK(parse_defect_style("adversarial") == DefectStyle::ConstantAtZero);
  CHECK(parse_defect_style("constant-at-0") == DefectStyle::ConstantAtZero);
  CHECK(to_string(DefectStyle::ConstantAtZero) == "adversarial");
  CHECK_THROWS(parse_defect_style("nasty"));
}
