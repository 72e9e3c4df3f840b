#include "shiftlab/power_series.hpp"

#include <string>

#include "shiftlab/errors.hpp"

namespace shiftlab {

PowerSeriesSpace::PowerSeriesSpace(BlockRule rule, std::int64_t horizon)
    : rule_(std::move(rule)), horizon_(horizon) {
  if (horizon < 0) throw PreconditionError("power series space horizon must be >= 0");
  blocks_.push_back({0, mpz_class(1), mpz_class(0)});
  for (std::size_t k = 1; rule_.start(k) <= horizon_; ++k) {
    const Block& prev = blocks_.back();
    const std::int64_t start = rule_.start(k);
    mpz_class prefix = prev.prefix + mpz_class(static_cast<long>(start - prev.start)) * prev.alpha;
    blocks_.push_back({start, prefix, prefix});
  }
}

void PowerSeriesSpace::check_index(std::int64_t n) const {
  if (n < 0 || n > horizon_)
    throw DomainError("index " + std::to_string(n) + " outside [0, " + std::to_string(horizon_) + "]");
}

std::size_t PowerSeriesSpace::block_of(std::int64_t n) const {
  check_index(n);
  return rule_.index_of(n);
}

const mpz_class& PowerSeriesSpace::block_alpha(std::size_t k) const {
  if (k >= blocks_.size()) throw DomainError("block " + std::to_string(k) + " beyond horizon");
  return blocks_[k].alpha;
}

const mpz_class& PowerSeriesSpace::block_prefix(std::size_t k) const {
  if (k >= blocks_.size()) throw DomainError("block " + std::to_string(k) + " beyond horizon");
  return blocks_[k].prefix;
}

const mpz_class& PowerSeriesSpace::alpha(std::int64_t n) const { return blocks_[block_of(n)].alpha; }

mpz_class PowerSeriesSpace::prefix_sum(std::int64_t n) const {
  if (n == 0) return 0;
  const Block& b = blocks_[block_of(n - 1)];
  return b.prefix + mpz_class(static_cast<long>(n - b.start)) * b.alpha;
}

mpz_class PowerSeriesSpace::weight_exponent(std::int64_t n) const {
  const std::size_t k = block_of(n);
  const Block& b = blocks_[k];
  if (k == 0 || n != b.start) return b.alpha;
  return b.alpha - (b.prefix - blocks_[k - 1].prefix);
}

mpz_class PowerSeriesSpace::log2_v(std::int64_t n) const {
  const Block& b = blocks_[block_of(n)];
  return blocks_[0].alpha - mpz_class(static_cast<long>(n - b.start + 1)) * b.alpha;
}

}  // namespace shiftlab
