#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace shiftlab::kernels {

// Extremal window sums of a log-weight array.
struct WindowExtrema {
  double sup;
  double inf;
};

// Sup and inf of sum(logs[s .. s+length-1]) over starts s in [first, last].
// OpenMP over starts on top of a long-double prefix sum.
WindowExtrema window_extrema(std::span<const double> logs, std::int64_t first, std::int64_t last,
                             std::int64_t length);

// Reference implementation: each window summed directly with compensated
// summation, no prefix sums, no threads.
WindowExtrema window_extrema_serial(std::span<const double> logs, std::int64_t first,
                                    std::int64_t last, std::int64_t length);

// window_extrema for every length 1..max_length; starts for length L are
// [first(L), last(L)] = [first + shift*(L-1), last + shift*(L-1)], which lets
// callers sweep windows that grow to the left (shift = -1) or right (0).
std::vector<WindowExtrema> window_extrema_all_lengths(std::span<const double> logs,
                                                      std::int64_t first, std::int64_t last,
                                                      std::int64_t max_length, std::int64_t shift);

std::vector<WindowExtrema> window_extrema_all_lengths_serial(std::span<const double> logs,
                                                             std::int64_t first, std::int64_t last,
                                                             std::int64_t max_length,
                                                             std::int64_t shift);

// Number of OpenMP threads the parallel kernels will use.
int thread_count();

}  // namespace shiftlab::kernels
