#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace shiftlab {

// Block starts N_0 = 0 < N_1 < ...; geometric: N_k = base^k (k >= 1).
// A list rule's last block runs to infinity.
class BlockRule {
 public:
  static constexpr std::int64_t kUnbounded = std::numeric_limits<std::int64_t>::max();

  static BlockRule geometric(std::int64_t base);
  static BlockRule list(std::vector<std::int64_t> starts);

  // `geometric:<base>` or `list:<n0,n1,...>`.
  static BlockRule parse(std::string_view text);

  // N_k, or kUnbounded when the rule has fewer than k+1 representable starts.
  std::int64_t start(std::size_t k) const {
    return k < starts_.size() ? starts_[k] : kUnbounded;
  }

  // The k with N_k <= n < N_{k+1}. Requires n >= 0.
  std::size_t index_of(std::int64_t n) const;

  // Number of stored starts (all representable ones for geometric rules).
  std::size_t stored_starts() const { return starts_.size(); }

  bool is_geometric() const { return base_ > 0; }
  std::int64_t base() const { return base_; }
  const std::vector<std::int64_t>& starts() const { return starts_; }

  std::string to_string() const;

  friend bool operator==(const BlockRule&, const BlockRule&) = default;

 private:
  BlockRule() = default;

  std::int64_t base_ = 0;
  std::vector<std::int64_t> starts_;
};

}  // namespace shiftlab
