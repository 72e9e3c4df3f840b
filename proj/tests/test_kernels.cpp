#include <doctest.h>

#include <omp.h>

#include <random>

#include "shiftlab/freq_sets.hpp"
#include "shiftlab/kernels.hpp"

using namespace shiftlab;

namespace {

struct Threads {
  int saved = omp_get_max_threads();
  explicit Threads(int n) { omp_set_num_threads(n); }
  ~Threads() { omp_set_num_threads(saved); }
};

std::vector<double> random_logs(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

}  // namespace

TEST_CASE("window extrema: parallel agrees with the direct sums") {
  Threads t(4);
  const auto logs = random_logs(5000, 1);
  for (std::int64_t len : {1, 2, 7, 64, 500}) {
    const auto a = kernels::window_extrema(logs, 0, 5000 - len, len);
    const auto b = kernels::window_extrema_serial(logs, 0, 5000 - len, len);
    CHECK(a.sup == doctest::Approx(b.sup).epsilon(1e-12));
    CHECK(a.inf == doctest::Approx(b.inf).epsilon(1e-12));
  }
}

TEST_CASE("window extrema on exactly representable logs are exact") {
  Threads t(4);
  std::vector<double> logs(3000);
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> d(-4, 4);
  for (auto& x : logs) x = d(rng);
  const auto a = kernels::window_extrema_all_lengths(logs, 100, 2000, 64, -1);
  const auto b = kernels::window_extrema_all_lengths_serial(logs, 100, 2000, 64, -1);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].sup == b[i].sup);
    CHECK(a[i].inf == b[i].inf);
  }
  // brute force for one length
  const std::int64_t L = 10;
  double sup = -1e300, inf = 1e300;
  for (std::int64_t s = 100 - (L - 1); s <= 2000 - (L - 1); ++s) {
    double w = 0;
    for (std::int64_t i = 0; i < L; ++i) w += logs[s + i];
    sup = std::max(sup, w);
    inf = std::min(inf, w);
  }
  CHECK(a[L - 1].sup == sup);
  CHECK(a[L - 1].inf == inf);
}

TEST_CASE("frequency-set scan does not depend on thread count") {
  auto s = generate_sets(6, 100000);
  s.sets[0].push_back(99999);
  s.sets[3].insert(s.sets[3].begin() + 5, s.sets[3][5] + 16);
  std::vector<FrequencyViolation> one, four;
  {
    Threads t(1);
    one = verify_properties(s);
  }
  {
    Threads t(4);
    four = verify_properties(s);
  }
  CHECK_FALSE(one.empty());
  CHECK(one == four);
  CHECK(one == verify_properties_serial(s));
}
