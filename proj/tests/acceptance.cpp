// One line per acceptance criterion. Exit status is nonzero if any fails.
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "cli.hpp"
#include "frozen.hpp"
#include "shiftlab/classify.hpp"
#include "shiftlab/freq_sets.hpp"
#include "shiftlab/kothe.hpp"
#include "shiftlab/perturbation.hpp"
#include "shiftlab/shadowing.hpp"

using namespace shiftlab;

namespace {

struct Outcome {
  bool ok = true;
  std::string note;
  void require(bool cond, const std::string& what) {
    if (!cond && ok) note = what;
    ok = ok && cond;
  }
};

WeightModel split(double neg, double pos) {
  return WeightModel::split(WeightModel::constant(neg), WeightModel::constant(pos), 1);
}

Verdict swapped(Verdict v) {
  if (v == Verdict::A) return Verdict::B;
  if (v == Verdict::B) return Verdict::A;
  return v;
}

Outcome classification() {
  Outcome o;
  const std::vector<std::pair<WeightModel, Verdict>> cases = {
      {WeightModel::constant(0.5), Verdict::A}, {WeightModel::constant(2), Verdict::B},
      {split(0.5, 2), Verdict::C},              {WeightModel::constant(1), Verdict::None},
      {split(2, 0.5), Verdict::None}};
  for (const auto& [m, want] : cases) {
    const auto r = classify_sss(m);
    o.require(r.verdict == want, m.describe() + " classified " + to_string(r.verdict));
    o.require(classify_sss(m.reflected_inverse()).verdict == swapped(r.verdict), "conjugacy swap on " + m.describe());
  }
  o.require(classify_sss(split(2, 0.5)).lemma23_pattern, "SSS1+SSS5 pattern not detected");
  return o;
}

Outcome summability() {
  Outcome o;
  const auto half = lemma22_quantities(WeightModel::constant(0.5), 60, 60);
  o.require(std::abs(half.ii() - 2) <= 1e-9 && std::abs(half.iii() - 1) <= 1e-9, "x = 1/2 limits");
  const auto one = lemma22_quantities(WeightModel::constant(1), 60, 60);
  o.require(one.ii() > 50 && one.iii() > 50, "x = 1 sums");
  o.require(one.growth_ii == Growth::Growing && one.growth_iii == Growth::Growing, "x = 1 divergence flag");
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> mag(0.3, 1.0), noise(-0.5, 0.5);
  int certified = 0;
  for (int tried = 1; certified < 20 && tried <= 200; ++tried) {
    const double mu = (tried % 2 ? -1.0 : 1.0) * mag(rng);
    std::map<std::int64_t, double> t;
    for (std::int64_t n = -200; n <= 200; ++n) t[n] = std::exp2(mu + noise(rng));
    const auto q = lemma22_quantities(WeightModel::explicit_table(t, std::exp2(mu), std::exp2(mu)), 60, 60);
    if (q.growth_i == Growth::Unknown) continue;
    ++certified;
    o.require(q.growth_ii == q.growth_i && q.growth_iii == q.growth_i, "indicators disagree, mu = " + std::to_string(mu));
  }
  o.require(certified == 20, "fewer than 20 certified sequences");
  return o;
}

Outcome perturbation_grid() {
  Outcome o;
  for (const auto& w : {WeightModel::constant(1), WeightModel::constant(0.5), split(0.5, 2)})
    for (double delta : {0.5, 0.1})
      for (std::int64_t m : {1, 2, 5, 8})
        for (std::int64_t t : {0, 3}) {
          const auto p = build_perturbation(w, delta, m, t);
          const auto orbit = perturbed_orbit(p, w, m);
          const std::string tag = w.describe() + " delta=" + std::to_string(delta) + " m=" + std::to_string(m) +
                                  " t=" + std::to_string(t);
          for (std::int64_t j = 0; j < m; ++j) {
            const auto closed = FiniteVector::basis(p.spine_index(j), p.kappa * p.a_value[j]) + p.y[j];
            o.require(FiniteVector::relative_difference(orbit[j], closed) <= 1e-9, "orbit identity " + tag);
            const std::int64_t k = m - 1 - j;
            o.require(std::abs(evaluate_alpha(p, orbit[j])[k + t] - delta) <= 1e-9 * delta, "delta hitting " + tag);
          }
          const auto v = verify_perturbation(p, w, 10000, 1);
          o.require(v.max_sup_ratio <= 1.0, "sup bound " + tag);
          o.require(v.max_lipschitz_ratio <= 1.0 + 1e-6, "lipschitz " + tag);
          o.require(v.passed(PerturbationCheck::Disjointness), "disjointness " + tag);
          o.require(v.ok(), "verification " + tag);
        }
  return o;
}

Outcome witnesses() {
  Outcome o;
  const auto one = WeightModel::constant(1);
  o.require(find_divergence_witness(one, 0.1, 0, 10000) == 110, "w = 1 witness");
  const auto b = contradiction_bound(one, 0.1, 0, 110);
  o.require(b.sum == 110 && std::abs(b.threshold - 11) < 1e-12 && b.violated, "contradiction bound");
  o.require(!find_divergence_witness(WeightModel::constant(2), 0.1, 0, 10000), "w = 2 has a witness");
  return o;
}

Outcome frequency_sets() {
  Outcome o;
  const auto s = generate_sets(6, 100000);
  o.require(verify_properties(s).empty(), "violations at H = 1e5");
  const auto big = generate_sets(6, 200000);
  for (std::int64_t r = 1; r <= 6; ++r) {
    const auto& x = s.set(r);
    const auto& y = big.set(r);
    o.require(x.size() <= y.size() && std::equal(x.begin(), x.end(), y.begin()), "prefix stability");
  }
  std::vector<std::int64_t> cps;
  for (int k = 3; k <= 8; ++k) cps.push_back(std::int64_t{1} << (2 * k));
  for (std::int64_t r = 1; r <= 4; ++r)
    o.require(lower_density_profile(s, r, cps).min >= kFrozenDensity[r - 1], "density A_" + std::to_string(r));
  return o;
}

Outcome kothe() {
  Outcome o;
  const auto space = std::make_shared<const PowerSeriesSpace>(BlockRule::geometric(4), 100000);
  mpz_class running = 0;
  std::int64_t n = 0;
  for (std::size_t k = 1; k < space->block_count(); ++k) {
    for (; n < space->block_start(k); ++n) running += space->alpha(n);
    o.require(space->block_alpha(k) == running, "prefix identity");
    o.require(chaos_ratio(*space, space->block_start(k)) == 1, "chaos ratio");
  }
  const auto small = std::make_shared<const PowerSeriesSpace>(BlockRule::geometric(4), 10001);
  const auto w = build_fhc_weights(small);
  o.require(continuity_check(*small, w, 16, 10000).ok(), "continuity");
  const auto tele = telescoped_log2_v(w, 10000);
  for (std::int64_t i = 0; i <= 10000; ++i)
    o.require(v_value(w, i) == LogMagnitude::pow2(tele[i]), "v_n closed form");

  const auto sets = generate_sets(6, 100000);
  const PowerSeriesSpace fit(BlockRule::geometric(4), 100000 + 6);
  for (std::int64_t r = 1; r <= 6; ++r)
    for (std::uint64_t p = 1; p <= 8; ++p) {
      const auto c = verify_fhc_condition_i(fit, sets, r, p);
      o.require(c.violations.empty() && c.strictly_decreasing_blocks && c.reaches_below(-100),
                "condition (i) r=" + std::to_string(r) + " p=" + std::to_string(p));
    }
  for (std::int64_t r = 1; r <= 6; ++r)
    for (std::int64_t s = 1; s <= 6; ++s) {
      const auto c = verify_fhc_condition_ii(fit, sets, r, s);
      o.require(c.ok() && c.chain_holds_at_witness, "condition (ii) r=" + std::to_string(r) + " s=" + std::to_string(s));
    }
  return o;
}

Outcome shadowing() {
  Outcome o;
  const auto w = split(0.5, 2);
  const auto report = classify_sss(w);
  for (const auto& r : shadow_suite(w, report, 0.01, 50, 1, 100))
    o.require(r.error <= 4 * 0.01, "seed " + std::to_string(r.seed) + " error " + std::to_string(r.error));
  const auto pt = make_pseudotrajectory(w, FiniteVector{}, 0.01, 50, 3, DefectStyle::Random);
  const auto base = shadow(w, pt, report).correction;
  for (double c : {2.0, -0.5, 10.0})
    o.require(FiniteVector::relative_difference(shadow(w, scale_defects(w, pt, c), report).correction, c * base) <= 1e-9,
              "linearity");
  const auto l23 = split(2, 0.5);
  double prev = -1;
  for (std::int64_t T : {5, 10, 20}) {
    const double v = best_window_shadow(l23, make_pseudotrajectory(l23, FiniteVector{}, 0.01, T, 0,
                                                                   DefectStyle::ConstantAtZero)).value;
    o.require(v > prev, "oracle not increasing at T=" + std::to_string(T));
    prev = v;
  }
  return o;
}

int exit_status(const std::string& cmd) {
  const int s = std::system(cmd.c_str());
  return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
}

Outcome cli_contract() {
  Outcome o;
  const std::string exe = SHIFTLAB_EXE;
  const auto dir = std::filesystem::temp_directory_path();
  const auto a = (dir / "shiftlab_acc_a.json").string(), b = (dir / "shiftlab_acc_b.json").string();
  const std::string pass = exe + " classify --weights constant:0.5 --seed 4 --quiet --json ";
  o.require(exit_status(pass + a) == 0, "pass scenario exit code");
  o.require(exit_status(pass + b) == 0, "pass scenario rerun");
  auto load = [](const std::string& p) {
    std::ifstream f(p);
    return nlohmann::json::parse(f);
  };
  o.require(cli::stable_view(load(a)).dump() == cli::stable_view(load(b)).dump(), "classify json not deterministic");
  const std::string bad = exe + " perturb --weights constant:1 --delta 0.5 --m 2 --kappa-scale 0.5 --seed 4 --quiet --json ";
  o.require(exit_status(bad + a) == 1, "violation scenario exit code");
  const auto ja = load(a);
  o.require(!ja["violations"].empty() && ja["violations"][0]["property"] == "disjointness", "violation payload");
  o.require(exit_status(bad + b) == 1, "violation scenario rerun");
  o.require(cli::stable_view(ja).dump() == cli::stable_view(load(b)).dump(), "perturb json not deterministic");
  o.require(exit_status(exe + " classify --weights constant:-1 --quiet 2>/dev/null") == 2, "invalid scenario exit code");
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;  // 0 = no limit
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all = {
      {1, "classification suite", 5, classification},
      {2, "summability suite", 0, summability},
      {3, "perturbation suite", 30, perturbation_grid},
      {4, "divergence witnesses", 0, witnesses},
      {5, "frequency sets", 0, frequency_sets},
      {6, "koethe suite", 0, kothe},
      {7, "shadowing suite", 60, shadowing},
      {8, "cli determinism and exit codes", 0, cli_contract},
  };
  int failed = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.note = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_s > 0 && secs >= c.limit_s) o.require(false, "over the time limit");
    std::printf("criterion %d %s: %s (%.2f s%s)%s%s\n", c.id, o.ok ? "PASS" : "FAIL", c.name, secs,
                c.limit_s > 0 ? (" < " + std::to_string(static_cast<int>(c.limit_s)) + " s").c_str() : "",
                o.ok ? "" : " - ", o.note.c_str());
    failed += o.ok ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
