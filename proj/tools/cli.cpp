#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>

#include <CLI11.hpp>

#include "shiftlab/classify.hpp"
#include "shiftlab/errors.hpp"
#include "shiftlab/freq_sets.hpp"
#include "shiftlab/kothe.hpp"
#include "shiftlab/perturbation.hpp"
#include "shiftlab/shadowing.hpp"
#include "spec_parser.hpp"

#ifndef SHIFTLAB_VERSION
#define SHIFTLAB_VERSION "unknown"
#endif

namespace shiftlab::cli {

using nlohmann::json;

json RunReport::to_json() const {
  json j;
  j["schema"] = schema;
  j["version"] = version;
  j["command"] = command;
  j["config"] = config;
  j["results"] = results;
  j["violations"] = violations;
  j["seeds"] = seeds;
  j["duration_seconds"] = duration_seconds;
  j["exit_code"] = exit_code;
  if (!error.empty()) j["error"] = error;
  return j;
}

RunReport RunReport::from_json(const json& j) {
  RunReport r;
  r.schema = j.at("schema").get<int>();
  r.version = j.at("version").get<std::string>();
  r.command = j.at("command").get<std::string>();
  r.config = j.at("config");
  r.results = j.at("results");
  r.violations = j.at("violations");
  r.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  r.duration_seconds = j.at("duration_seconds").get<double>();
  r.exit_code = j.at("exit_code").get<int>();
  r.error = j.value("error", std::string());
  return r;
}

json stable_view(const json& report) {
  json j = report;
  j.erase("duration_seconds");
  return j;
}

namespace {

struct Globals {
  std::string json_path;
  std::string csv_path;
  std::uint64_t seed = 1;
  bool quiet = false;
};

struct Context {
  Globals globals;
  RunReport& report;
  std::ostream& out;

  void say(const std::string& line) const {
    if (!globals.quiet) out << line << '\n';
  }
  void violation(json v) const { report.violations.push_back(std::move(v)); }
  std::optional<std::ofstream> csv() const {
    if (globals.csv_path.empty()) return std::nullopt;
    std::ofstream f(globals.csv_path);
    if (!f) throw PreconditionError("cannot write " + globals.csv_path);
    return f;
  }
};

json trace_json(const std::vector<TracePoint>& trace) {
  json a = json::array();
  for (const auto& p : trace) a.push_back({p.length, p.bound});
  return a;
}

json evidence_json(const ConditionEvidence& e) {
  json j;
  j["id"] = to_string(e.id);
  j["decision"] = to_string(e.decision);
  j["exact_limit"] = e.exact_limit ? json(*e.exact_limit) : json(nullptr);
  j["rigorous_sweep"] = e.rigorous_sweep;
  j["certificate_length"] = e.certificate_length ? json(*e.certificate_length) : json(nullptr);
  j["reason"] = e.reason;
  j["trace"] = trace_json(e.trace);
  j["offset_trace"] = trace_json(e.offset_trace);
  return j;
}

Verdict conjugate_of(Verdict v) {
  if (v == Verdict::A) return Verdict::B;
  if (v == Verdict::B) return Verdict::A;
  return v;
}

// ---------------------------------------------------------------- classify

struct ClassifyArgs {
  std::string weights;
  ClassifyOptions options;
};

void run_classify(const Context& ctx, const ClassifyArgs& a) {
  ctx.report.config = {{"weights", a.weights},
                       {"nmax", a.options.n_max},
                       {"margin", a.options.margin},
                       {"kmax", a.options.k_max}};
  const auto model = parse_weights(a.weights);
  const auto rep = classify_sss(model, a.options);
  json conds = json::array();
  for (const auto& e : rep.conditions) conds.push_back(evidence_json(e));
  const auto conj = classify_sss(model.reflected_inverse(), a.options);
  const bool consistent =
      rep.verdict == Verdict::Inconclusive || conj.verdict == Verdict::Inconclusive ||
      conj.verdict == conjugate_of(rep.verdict);
  ctx.report.results = {{"model", model.describe()},
                        {"verdict", to_string(rep.verdict)},
                        {"hyperbolic", rep.hyperbolic},
                        {"generalized_hyperbolic", rep.generalized_hyperbolic},
                        {"sss", rep.sss},
                        {"shadowing", rep.shadowing()},
                        {"lemma23_pattern", rep.lemma23_pattern},
                        {"conditions", conds},
                        {"conjugate", {{"verdict", to_string(conj.verdict)}, {"consistent", consistent}}}};
  if (!consistent)
    ctx.violation({{"property", "conjugacy"},
                   {"detail", "inverse shift classified " + to_string(conj.verdict) + ", expected " +
                                  to_string(conjugate_of(rep.verdict))}});
  if (auto f = ctx.csv()) {
    *f << "condition,L,bound\n";
    for (const auto& e : rep.conditions)
      for (const auto& p : e.trace) *f << to_string(e.id) << ',' << p.length << ',' << p.bound << '\n';
  }
  ctx.say("verdict: " + to_string(rep.verdict) + (rep.lemma23_pattern ? " (SSS1 and SSS5 both hold)" : ""));
  for (const auto& e : rep.conditions) ctx.say("  " + to_string(e.id) + ": " + to_string(e.decision) + " - " + e.reason);
}

// ----------------------------------------------------------------- perturb

struct PerturbArgs {
  std::string weights;
  double delta = 0.5;
  std::int64_t m = 2;
  std::int64_t t = 0;
  std::string norm = "sup";
  std::int64_t samples = 10000;
  double kappa_scale = 1.0;
  double kappa_safety = 1.0;
  std::int64_t witness_mmax = 10000;
};

void run_perturb(const Context& ctx, const PerturbArgs& a) {
  ctx.report.config = {{"weights", a.weights}, {"delta", a.delta},       {"m", a.m},
                       {"t", a.t},             {"norm", a.norm},         {"samples", a.samples},
                       {"kappa_scale", a.kappa_scale}, {"kappa_safety", a.kappa_safety},
                       {"witness_mmax", a.witness_mmax}};
  ctx.report.seeds = {ctx.globals.seed};
  const auto model = parse_weights(a.weights);
  PerturbationOptions opt;
  opt.norm = NormKind::parse(a.norm);
  opt.kappa_safety = a.kappa_safety;
  auto pert = build_perturbation(model, a.delta, a.m, a.t, opt);
  if (a.kappa_scale != 1.0) {
    opt.kappa_override = pert.kappa * a.kappa_scale;
    pert = build_perturbation(model, a.delta, a.m, a.t, opt);
  }
  const auto ver = verify_perturbation(pert, model, a.samples, ctx.globals.seed);

  json a_log = json::array(), centers = json::array();
  for (const auto& lp : pert.a) a_log.push_back(lp.log2);
  for (const auto& c : pert.centers) centers.push_back(c.to_string());
  json strata = json::object();
  for (int s = 0; s < kStratumCount; ++s) strata[to_string(static_cast<PairStratum>(s))] = ver.pairs_per_stratum[s];
  json res = {{"kappa", pert.kappa},
              {"a_log2", a_log},
              {"centers", centers},
              {"u", pert.u.to_string()},
              {"verification",
               {{"seed", ver.seed},
                {"samples", ver.samples},
                {"max_sup_ratio", ver.max_sup_ratio},
                {"max_lipschitz_ratio", ver.max_lipschitz_ratio},
                {"pairs_per_stratum", strata},
                {"min_center_distance", std::isfinite(ver.min_center_distance) ? json(ver.min_center_distance) : json(nullptr)},
                {"max_orbit_error", ver.max_orbit_error}}}};
  if (a.delta > 0.0) {
    const auto w = find_divergence_witness(model, a.delta, a.t, a.witness_mmax);
    const auto bound = contradiction_bound(model, a.delta, a.t, w.value_or(a.m));
    res["witness"] = w ? json(*w) : json(nullptr);
    res["contradiction"] = {{"m", w.value_or(a.m)}, {"sum", bound.sum}, {"threshold", bound.threshold}, {"violated", bound.violated}};
  }
  ctx.report.results = res;
  for (const auto& v : ver.violations)
    ctx.violation({{"property", to_string(v.check)}, {"detail", v.detail}, {"observed", v.observed},
                   {"bound", v.bound}, {"sample", v.sample}, {"j", v.j}, {"k", v.k},
                   {"x", v.x ? json(v.x->to_string()) : json(nullptr)},
                   {"y", v.y ? json(v.y->to_string()) : json(nullptr)}});
  ctx.say("kappa = " + std::to_string(pert.kappa) + ", " + std::to_string(ver.violations.size()) + " violation(s)");
}

// ---------------------------------------------------------------- freqsets

struct FreqArgs {
  std::string blocks = "geometric:4";
  std::int64_t r_max = 6;
  std::int64_t horizon = 100000;
};

std::vector<std::int64_t> power_checkpoints(const BlockRule& rule, std::int64_t horizon) {
  std::vector<std::int64_t> cps;
  for (std::size_t k = 3; k <= 8; ++k) {
    const auto n = rule.start(k);
    if (n <= horizon) cps.push_back(n);
  }
  return cps;
}

void run_freqsets(const Context& ctx, const FreqArgs& a) {
  ctx.report.config = {{"blocks", a.blocks}, {"rmax", a.r_max}, {"horizon", a.horizon}};
  const auto schedule = FrequencySchedule::standard(parse_blocks(a.blocks), a.r_max);
  const auto sets = generate_sets(schedule, a.horizon);
  const auto cps = power_checkpoints(schedule.rule, a.horizon);
  json arr = json::array();
  for (std::int64_t r = 1; r <= a.r_max; ++r) {
    const auto& s = sets.set(r);
    const auto prof = lower_density_profile(sets, r, cps);
    json dens = json::array();
    for (const auto& p : prof.points) dens.push_back({p.n, p.density});
    arr.push_back({{"r", r},
                   {"size", s.size()},
                   {"first", std::vector<std::int64_t>(s.begin(), s.begin() + std::min<std::size_t>(s.size(), 10))},
                   {"density", dens},
                   {"min_density", prof.min}});
  }
  const auto viol = verify_properties(sets);
  ctx.report.results = {{"stride", schedule.stride}, {"early_end", schedule.early_end}, {"sets", arr},
                        {"violation_count", viol.size()}};
  for (std::size_t i = 0; i < std::min<std::size_t>(viol.size(), 64); ++i)
    ctx.violation({{"property", to_string(viol[i].property)}, {"r", viol[i].r}, {"n", viol[i].n},
                   {"s", viol[i].s}, {"m", viol[i].m}, {"detail", viol[i].detail}});
  if (auto f = ctx.csv()) {
    *f << "r,n\n";
    for (std::int64_t r = 1; r <= a.r_max; ++r)
      for (auto n : sets.set(r)) *f << r << ',' << n << '\n';
  }
  ctx.say(std::to_string(viol.size()) + " violation(s) of disjointness/(a)/(b) up to " + std::to_string(a.horizon));
}

// ------------------------------------------------------------------- kothe

struct KotheArgs {
  std::string action;
  std::string blocks = "geometric:4";
  std::int64_t horizon = 100000;
  std::uint64_t p_max = 16;
  std::int64_t r_max = 6;
  std::uint64_t fhc_p_max = 8;
};

void kothe_alpha(const Context& ctx, const PowerSeriesSpace& space) {
  json blocks = json::array();
  mpz_class running = 0;
  std::int64_t n = 0;
  for (std::size_t k = 0; k < space.block_count(); ++k) {
    const auto start = space.block_start(k);
    for (; n < start; ++n) running += space.alpha(n);
    const bool identity = k == 0 ? space.block_alpha(0) == 1 : space.block_alpha(k) == running;
    blocks.push_back({{"k", k}, {"start", start}, {"alpha", space.block_alpha(k).get_str()},
                      {"prefix", running.get_str()}, {"identity", identity}});
    if (!identity) ctx.violation({{"property", "alpha-prefix-identity"}, {"k", k}});
  }
  ctx.report.results = {{"blocks", blocks}};
  ctx.say(std::to_string(space.block_count()) + " blocks up to " + std::to_string(space.horizon()));
}

void kothe_weights(const Context& ctx, const PowerSeriesSpace& space) {
  json rows = json::array();
  for (std::size_t k = 1; k < space.block_count(); ++k) {
    const auto e = space.weight_exponent(space.block_start(k));
    const mpz_class expected = k == 1 ? mpz_class(0) : space.block_alpha(k - 1);
    rows.push_back({{"k", k}, {"start", space.block_start(k)}, {"exponent", e.get_str()},
                    {"expected", expected.get_str()}, {"identity", e == expected}});
    if (e != expected) ctx.violation({{"property", "block-start-weight"}, {"k", k}});
  }
  ctx.report.results = {{"block_start_weights", rows}};
  ctx.say("block-start weight exponents checked for " + std::to_string(rows.size()) + " blocks");
}

void kothe_chaos(const Context& ctx, const PowerSeriesSpace& space) {
  std::vector<std::int64_t> cps;
  for (std::size_t k = 1; k < space.block_count(); ++k) {
    const auto mid = space.block_start(k) + (space.block_start(k) - space.block_start(k - 1)) / 2;
    if (mid <= space.horizon()) cps.push_back(mid);
  }
  const auto v = supports_chaotic_verdict(space, cps);
  json trace = json::array();
  bool ones = true;
  for (const auto& t : v.trace) {
    trace.push_back({{"n", t.n}, {"ratio", t.ratio.get_str()}, {"block_start", t.block_start}});
    if (t.block_start && t.ratio != 1) ones = false;
  }
  ctx.report.results = {{"evidence", to_string(v.evidence)}, {"ratio_one_at_block_starts", ones},
                        {"first_tail_min", v.first_tail_min}, {"last_tail_min", v.last_tail_min},
                        {"trace", trace}};
  if (!ones) ctx.violation({{"property", "chaos-ratio-at-block-start"}});
  ctx.say("chaos evidence: " + to_string(v.evidence));
}

void kothe_continuity(const Context& ctx, const PowerSeriesSpace& space, const KotheArgs& a,
                      std::shared_ptr<const PowerSeriesSpace> shared) {
  const auto model = build_fhc_weights(std::move(shared));
  const auto rep = continuity_check(space, model, a.p_max, a.horizon);
  ctx.report.results = {{"p_max", rep.p_max}, {"horizon", rep.horizon}, {"checked", rep.checked},
                        {"tightest_margin", rep.tightest_margin}, {"tightest_p", rep.tightest_p},
                        {"tightest_n", rep.tightest_n}, {"exact", rep.exact},
                        {"violation_count", rep.violation_count}};
  for (const auto& v : rep.violations)
    ctx.violation({{"property", "continuity"}, {"p", v.p}, {"n", v.n}, {"margin", v.margin}});
  ctx.say("continuity: " + std::string(rep.ok() ? "pass" : "FAIL") + ", tightest margin " + std::to_string(rep.tightest_margin));
}

void kothe_fhc(const Context& ctx, const KotheArgs& a) {
  const auto rule = parse_blocks(a.blocks);
  const auto sets = generate_sets(FrequencySchedule::standard(rule, a.r_max), a.horizon);
  const PowerSeriesSpace space(rule, a.horizon + a.r_max);
  json cond_i = json::array(), cond_ii = json::array();
  for (std::int64_t r = 1; r <= a.r_max; ++r)
    for (std::uint64_t p = 1; p <= a.fhc_p_max; ++p) {
      const auto c = verify_fhc_condition_i(space, sets, r, p);
      const bool below = c.reaches_below(-100.0);
      cond_i.push_back({{"r", r}, {"p", p}, {"points", c.trace.size()},
                        {"strictly_decreasing_blocks", c.strictly_decreasing_blocks},
                        {"below_minus_100", below},
                        {"last_value", c.last_value ? json(*c.last_value) : json(nullptr)},
                        {"bound_violations", c.violations.size()}});
      for (const auto& v : c.violations)
        ctx.violation({{"property", "fhc-i"}, {"r", r}, {"p", p}, {"n", v.n}, {"detail", v.kind}});
      if (!c.strictly_decreasing_blocks || !below)
        ctx.violation({{"property", "fhc-i-trace"}, {"r", r}, {"p", p},
                       {"detail", !c.strictly_decreasing_blocks ? "block maxima not strictly decreasing"
                                                                : "trace stays above -100"}});
    }
  for (std::int64_t r = 1; r <= a.r_max; ++r)
    for (std::int64_t s = 1; s <= a.r_max; ++s) {
      const auto c = verify_fhc_condition_ii(space, sets, r, s);
      cond_ii.push_back({{"r", r}, {"s", s}, {"triples", c.triples}, {"max_value", c.max_value},
                         {"threshold", c.threshold}, {"witness", {c.witness_m, c.witness_n, c.witness_j}},
                         {"chain_holds_at_witness", c.chain_holds_at_witness},
                         {"violation_count", c.violation_count}});
      for (const auto& v : c.violations)
        ctx.violation({{"property", "fhc-ii"}, {"r", r}, {"s", s}, {"m", v.m}, {"n", v.n}, {"j", v.j},
                       {"value", v.value}, {"bound", v.bound}, {"detail", v.kind}});
      if (!c.chain_holds_at_witness)
        ctx.violation({{"property", "fhc-ii-chain"}, {"r", r}, {"s", s}});
    }
  ctx.report.results = {{"condition_i", cond_i}, {"condition_ii", cond_ii}};
  ctx.say("fhc criterion: " + std::to_string(ctx.report.violations.size()) + " violation(s)");
}

void run_kothe(const Context& ctx, const KotheArgs& a) {
  ctx.report.config = {{"action", a.action}, {"blocks", a.blocks}, {"horizon", a.horizon},
                       {"pmax", a.p_max}, {"rmax", a.r_max}, {"fhc_pmax", a.fhc_p_max}};
  if (a.horizon < 1) throw PreconditionError("horizon must be >= 1");
  if (a.action == "fhc") return kothe_fhc(ctx, a);
  const auto space = std::make_shared<const PowerSeriesSpace>(parse_blocks(a.blocks), a.horizon + 1);
  if (a.action == "alpha") return kothe_alpha(ctx, *space);
  if (a.action == "weights") return kothe_weights(ctx, *space);
  if (a.action == "chaos") return kothe_chaos(ctx, *space);
  if (a.action == "continuity") return kothe_continuity(ctx, *space, a, space);
  throw PreconditionError("unknown kothe action '" + a.action + "'");
}

// ------------------------------------------------------------------ shadow

struct ShadowArgs {
  std::string weights;
  double delta = 0.01;
  std::int64_t T = 50;
  std::int64_t seeds = 100;
  std::string style = "random";
  std::string norm = "sup";
};

void run_shadow(const Context& ctx, const ShadowArgs& a) {
  ctx.report.config = {{"weights", a.weights}, {"delta", a.delta}, {"T", a.T},
                       {"seeds", a.seeds},     {"style", a.style}, {"norm", a.norm}};
  const auto model = parse_weights(a.weights);
  const auto style = parse_defect_style(a.style);
  const auto norm = NormKind::parse(a.norm);
  const auto cls = classify_sss(model);
  auto csv = ctx.csv();
  if (csv) *csv << "seed,T,delta,measured_error,bound\n";
  json res = {{"verdict", to_string(cls.verdict)}};

  if (cls.sss) {
    std::vector<ShadowSuiteRow> rows;
    if (style == DefectStyle::Random) {
      rows = shadow_suite(model, cls, a.delta, a.T, ctx.globals.seed, a.seeds, norm);
    } else {
      const auto pt = make_pseudotrajectory(model, FiniteVector(norm), a.delta, a.T, 0, style);
      const auto r = shadow(model, pt, cls);
      rows.push_back({0, r.error, r.bound, r.resolution});
    }
    double worst = 0.0, floor = 0.0;
    std::int64_t unresolved = 0;
    for (const auto& r : rows) {
      ctx.report.seeds.push_back(r.seed);
      worst = std::max(worst, r.error);
      floor = std::max(floor, r.resolution);
      if (r.resolution > r.bound) ++unresolved;
      if (csv) *csv << r.seed << ',' << a.T << ',' << a.delta << ',' << r.error << ',' << r.bound << '\n';
      // errors inside the rounding floor of the orbit comparison say nothing
      if (r.error > r.bound + r.resolution)
        ctx.violation({{"property", "shadow-bound"}, {"seed", r.seed}, {"error", r.error}, {"bound", r.bound},
                       {"resolution", r.resolution}});
    }
    res["max_resolution"] = floor;
    res["unresolved"] = unresolved;
    if (unresolved > 0)
      ctx.say(std::to_string(unresolved) + " trajectories grow too large for the bound to be resolved in double precision");
    res["splitting"] = Splitting::from_verdict(cls.verdict).name();
    res["bound"] = rows.empty() ? json(nullptr) : json(rows.front().bound);
    res["worst_error"] = worst;
    res["trajectories"] = rows.size();
    ctx.say("worst shadow error " + std::to_string(worst) + " over " + std::to_string(rows.size()) + " trajectories");
  } else {
    // no splitting to shadow with; show how the best window error grows with T
    json ladder = json::array();
    double prev = -1.0;
    bool increasing = true;
    for (std::int64_t T : {5, 10, 20}) {
      if (T > a.T) break;
      const auto pt = make_pseudotrajectory(model, FiniteVector(norm), a.delta, T, ctx.globals.seed, style);
      const auto best = best_window_shadow(model, pt);
      ladder.push_back({{"T", T}, {"best_window_error", best.value}});
      if (csv) *csv << ctx.globals.seed << ',' << T << ',' << a.delta << ',' << best.value << ",inf\n";
      increasing = increasing && best.value > prev;
      prev = best.value;
    }
    res["oracle_ladder"] = ladder;
    res["strictly_increasing"] = increasing;
    ctx.report.seeds = {ctx.globals.seed};
    ctx.say(std::string("not shadowable by the splitting construction; oracle ") +
            (increasing ? "grows" : "does not grow") + " along T");
  }
  ctx.report.results = res;
}

// ----------------------------------------------------------------- lemma22

struct Lemma22Args {
  std::string weights;
  std::int64_t t_max = 60;
  std::int64_t m_max = 60;
};

void run_lemma22(const Context& ctx, const Lemma22Args& a) {
  ctx.report.config = {{"weights", a.weights}, {"tmax", a.t_max}, {"mmax", a.m_max}};
  const auto model = parse_weights(a.weights);
  const auto q = lemma22_quantities(model, a.t_max, a.m_max);
  const bool agree = q.growth_i == q.growth_ii && q.growth_ii == q.growth_iii;
  ctx.report.results = {{"limit", evidence_json(q.limit)},
                        {"ii", q.ii()},
                        {"iii", q.iii()},
                        {"growth", {to_string(q.growth_i), to_string(q.growth_ii), to_string(q.growth_iii)}},
                        {"agree", agree},
                        {"overflow", q.overflow}};
  if (!agree && q.growth_i != Growth::Unknown)
    ctx.violation({{"property", "lemma22-agreement"},
                   {"detail", to_string(q.growth_i) + "/" + to_string(q.growth_ii) + "/" + to_string(q.growth_iii)}});
  ctx.say("(ii) = " + std::to_string(q.ii()) + ", (iii) = " + std::to_string(q.iii()) +
          (agree ? ", indicators agree" : ", indicators disagree"));
}

void write_report(const Globals& g, const RunReport& report, std::ostream& err) {
  if (g.json_path.empty()) return;
  std::ofstream f(g.json_path);
  if (!f) {
    err << "shiftlab: cannot write " << g.json_path << '\n';
    return;
  }
  f << report.to_json().dump(2) << '\n';
}

}  // namespace

RunResult run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  RunResult result;
  RunReport& report = result.report;
  report.version = SHIFTLAB_VERSION;
  Globals g;

  CLI::App app{"shiftlab: weighted shift laboratory", "shiftlab"};
  app.require_subcommand(1);
  app.add_option("--json", g.json_path, "write the run report as JSON");
  app.add_option("--csv", g.csv_path, "write tabular results as CSV");
  app.add_option("--seed", g.seed, "base random seed");
  app.add_flag("--quiet", g.quiet, "suppress the human-readable summary");

  ClassifyArgs ca;
  auto* classify = app.add_subcommand("classify", "decide the SSS conditions and the A/B/C verdict");
  classify->fallthrough();
  classify->add_option("--weights", ca.weights)->required();
  classify->add_option("--nmax", ca.options.n_max)->check(CLI::PositiveNumber);
  classify->add_option("--margin", ca.options.margin)->check(CLI::NonNegativeNumber);
  classify->add_option("--kmax", ca.options.k_max)->check(CLI::PositiveNumber);

  PerturbArgs pa;
  auto* perturb = app.add_subcommand("perturb", "build and verify the Lipschitz perturbation");
  perturb->fallthrough();
  perturb->add_option("--weights", pa.weights)->required();
  perturb->add_option("--delta", pa.delta);
  perturb->add_option("--m", pa.m);
  perturb->add_option("--t", pa.t);
  perturb->add_option("--norm", pa.norm);
  perturb->add_option("--samples", pa.samples);
  perturb->add_option("--kappa-scale", pa.kappa_scale, "multiply kappa (values < 1 plant a broken construction)");
  perturb->add_option("--kappa-safety", pa.kappa_safety);
  perturb->add_option("--witness-mmax", pa.witness_mmax);

  FreqArgs fa;
  auto* freq = app.add_subcommand("freqsets", "generate and verify the frequency sets");
  freq->fallthrough();
  freq->add_option("--blocks", fa.blocks);
  freq->add_option("--rmax", fa.r_max);
  freq->add_option("--horizon", fa.horizon);

  KotheArgs ka;
  auto* kothe = app.add_subcommand("kothe", "power series space checks");
  kothe->fallthrough();
  kothe->add_option("action", ka.action)->required()->check(CLI::IsMember({"alpha", "weights", "chaos", "continuity", "fhc"}));
  kothe->add_option("--blocks", ka.blocks);
  kothe->add_option("--horizon", ka.horizon);
  kothe->add_option("--pmax", ka.p_max);
  kothe->add_option("--rmax", ka.r_max);
  kothe->add_option("--fhc-pmax", ka.fhc_p_max);

  ShadowArgs sa;
  auto* shadow_cmd = app.add_subcommand("shadow", "shadow pseudotrajectories");
  shadow_cmd->fallthrough();
  shadow_cmd->add_option("--weights", sa.weights)->required();
  shadow_cmd->add_option("--delta", sa.delta);
  shadow_cmd->add_option("--T", sa.T);
  shadow_cmd->add_option("--seeds", sa.seeds);
  shadow_cmd->add_option("--style", sa.style);
  shadow_cmd->add_option("--norm", sa.norm);

  Lemma22Args la;
  auto* l22 = app.add_subcommand("lemma22", "the three equivalent summability quantities");
  l22->fallthrough();
  l22->add_option("--weights", la.weights)->required();
  l22->add_option("--tmax", la.t_max);
  l22->add_option("--mmax", la.m_max);

  auto finish = [&](int code) {
    report.exit_code = code;
    report.duration_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_report(g, report, err);
    result.exit_code = code;
    return result;
  };

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    result.exit_code = kExitOk;
    return result;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    report.error = e.what();
    return finish(kExitInvalid);
  }

  Context ctx{g, report, out};
  try {
    if (*classify) {
      report.command = "classify";
      run_classify(ctx, ca);
    } else if (*perturb) {
      report.command = "perturb";
      run_perturb(ctx, pa);
    } else if (*freq) {
      report.command = "freqsets";
      run_freqsets(ctx, fa);
    } else if (*kothe) {
      report.command = "kothe";
      run_kothe(ctx, ka);
    } else if (*shadow_cmd) {
      report.command = "shadow";
      run_shadow(ctx, sa);
    } else if (*l22) {
      report.command = "lemma22";
      run_lemma22(ctx, la);
    }
  } catch (const ParseError& e) {
    err << "shiftlab: invalid specification " << e.what() << '\n';
    report.error = e.what();
    return finish(kExitInvalid);
  } catch (const PreconditionError& e) {
    err << "shiftlab: " << e.what() << '\n';
    report.error = e.what();
    return finish(kExitInvalid);
  } catch (const DomainError& e) {
    err << "shiftlab: " << e.what() << '\n';
    report.error = e.what();
    return finish(kExitInvalid);
  }
  if (!report.violations.empty()) {
    if (!g.quiet) out << report.violations.size() << " violation(s) reported\n";
    return finish(kExitViolations);
  }
  return finish(kExitOk);
}

}  // namespace shiftlab::cli
