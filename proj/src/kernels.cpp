#include "shiftlab/kernels.hpp"

#include <algorithm>
#include <limits>

#include <omp.h>

#include "shiftlab/compensated_sum.hpp"
#include "shiftlab/errors.hpp"

namespace shiftlab::kernels {

namespace {

void check_range(std::span<const double> logs, std::int64_t first, std::int64_t last,
                 std::int64_t length) {
  if (length < 1 || first > last || first < 0 ||
      last + length > static_cast<std::int64_t>(logs.size()))
    throw DomainError("window sweep outside the log-weight array");
}

std::vector<long double> prefix_sums(std::span<const double> logs) {
  std::vector<long double> prefix(logs.size() + 1, 0.0L);
  for (std::size_t i = 0; i < logs.size(); ++i) prefix[i + 1] = prefix[i] + logs[i];
  return prefix;
}

WindowExtrema sweep_prefix(const std::vector<long double>& prefix, std::int64_t first,
                           std::int64_t last, std::int64_t length) {
  double sup = -std::numeric_limits<double>::infinity();
  double inf = std::numeric_limits<double>::infinity();
  for (std::int64_t s = first; s <= last; ++s) {
    const auto v = static_cast<double>(prefix[s + length] - prefix[s]);
    sup = std::max(sup, v);
    inf = std::min(inf, v);
  }
  return {sup, inf};
}

}  // namespace

int thread_count() { return omp_get_max_threads(); }

WindowExtrema window_extrema(std::span<const double> logs, std::int64_t first, std::int64_t last,
                             std::int64_t length) {
  check_range(logs, first, last, length);
  const auto prefix = prefix_sums(logs);
  double sup = -std::numeric_limits<double>::infinity();
  double inf = std::numeric_limits<double>::infinity();
#pragma omp parallel for schedule(static) reduction(max : sup) reduction(min : inf)
  for (std::int64_t s = first; s <= last; ++s) {
    const auto v = static_cast<double>(prefix[s + length] - prefix[s]);
    sup = std::max(sup, v);
    inf = std::min(inf, v);
  }
  return {sup, inf};
}

WindowExtrema window_extrema_serial(std::span<const double> logs, std::int64_t first,
                                    std::int64_t last, std::int64_t length) {
  check_range(logs, first, last, length);
  double sup = -std::numeric_limits<double>::infinity();
  double inf = std::numeric_limits<double>::infinity();
  for (std::int64_t s = first; s <= last; ++s) {
    CompensatedSum acc;
    for (std::int64_t i = s; i < s + length; ++i) acc.add(logs[i]);
    sup = std::max(sup, acc.value());
    inf = std::min(inf, acc.value());
  }
  return {sup, inf};
}

std::vector<WindowExtrema> window_extrema_all_lengths(std::span<const double> logs,
                                                      std::int64_t first, std::int64_t last,
                                                      std::int64_t max_length, std::int64_t shift) {
  std::vector<WindowExtrema> out(static_cast<std::size_t>(std::max<std::int64_t>(max_length, 0)));
  for (std::int64_t len = 1; len <= max_length; ++len)
    check_range(logs, first + shift * (len - 1), last + shift * (len - 1), len);
  const auto prefix = prefix_sums(logs);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t len = 1; len <= max_length; ++len)
    out[len - 1] = sweep_prefix(prefix, first + shift * (len - 1), last + shift * (len - 1), len);
  return out;
}

std::vector<WindowExtrema> window_extrema_all_lengths_serial(std::span<const double> logs,
                                                             std::int64_t first, std::int64_t last,
                                                             std::int64_t max_length,
                                                             std::int64_t shift) {
  std::vector<WindowExtrema> out;
  for (std::int64_t len = 1; len <= max_length; ++len)
    out.push_back(window_extrema_serial(logs, first + shift * (len - 1), last + shift * (len - 1), len));
  return out;
}

}  // namespace shiftlab::kernels
