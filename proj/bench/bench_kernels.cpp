// Serial reference vs OpenMP kernel, pairwise. Run with
// OMP_NUM_THREADS=<n> to see the scaling; on one core the pairs mostly show
// the overhead of the parallel path.
#include <benchmark/benchmark.h>

#include <random>

#include "shiftlab/freq_sets.hpp"
#include "shiftlab/kernels.hpp"
#include "shiftlab/kothe.hpp"
#include "shiftlab/perturbation.hpp"
#include "shiftlab/shadowing.hpp"

using namespace shiftlab;

namespace {

const std::vector<double>& logs() {
  static const std::vector<double> v = [] {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> d(-2, 2);
    std::vector<double> out(20064);
    for (auto& x : out) x = d(rng);
    return out;
  }();
  return v;
}

const FrequencySets& sets() {
  static const FrequencySets s = generate_sets(6, 100000);
  return s;
}

const PowerSeriesSpace& space() {
  static const PowerSeriesSpace s(BlockRule::geometric(4), 100006);
  return s;
}

void BM_WindowExtrema(benchmark::State& st) {
  for (auto _ : st)
    benchmark::DoNotOptimize(kernels::window_extrema_all_lengths(logs(), 0, 19999, 64, 0));
}
void BM_WindowExtremaSerial(benchmark::State& st) {
  for (auto _ : st)
    benchmark::DoNotOptimize(kernels::window_extrema_all_lengths_serial(logs(), 0, 19999, 64, 0));
}

void BM_FreqVerify(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(verify_properties(sets()));
}
void BM_FreqVerifySerial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(verify_properties_serial(sets()));
}

void BM_FhcII(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(verify_fhc_condition_ii(space(), sets(), 1, 1));
}
void BM_FhcIISerial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(verify_fhc_condition_ii_serial(space(), sets(), 1, 1));
}

const WeightModel& c_model() {
  static const WeightModel w = WeightModel::split(WeightModel::constant(0.5), WeightModel::constant(2), 1);
  return w;
}

void BM_Perturbation(benchmark::State& st) {
  const auto p = build_perturbation(c_model(), 0.1, 8, 3);
  for (auto _ : st) benchmark::DoNotOptimize(verify_perturbation(p, c_model(), 10000, 1));
}
void BM_PerturbationSerial(benchmark::State& st) {
  const auto p = build_perturbation(c_model(), 0.1, 8, 3);
  for (auto _ : st) benchmark::DoNotOptimize(verify_perturbation_serial(p, c_model(), 10000, 1));
}

void BM_ShadowSuite(benchmark::State& st) {
  const auto r = classify_sss(c_model());
  for (auto _ : st) benchmark::DoNotOptimize(shadow_suite(c_model(), r, 0.01, 50, 1, 100));
}
void BM_ShadowSuiteSerial(benchmark::State& st) {
  const auto r = classify_sss(c_model());
  for (auto _ : st) benchmark::DoNotOptimize(shadow_suite_serial(c_model(), r, 0.01, 50, 1, 100));
}

}  // namespace

BENCHMARK(BM_WindowExtrema)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WindowExtremaSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FreqVerify)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FreqVerifySerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FhcII)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FhcIISerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Perturbation)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PerturbationSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ShadowSuite)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ShadowSuiteSerial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
