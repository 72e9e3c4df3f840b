#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <gmpxx.h>

#include "shiftlab/blocks.hpp"

namespace shiftlab {

// alpha_0 = 1, alpha constant on each block, alpha_{N_k} = sum_{n < N_k} alpha_n.
// Table filled once up to the horizon; read-only afterwards.
class PowerSeriesSpace {
 public:
  PowerSeriesSpace(BlockRule rule, std::int64_t horizon);

  const BlockRule& rule() const { return rule_; }
  std::int64_t horizon() const { return horizon_; }

  // Blocks with N_k <= horizon.
  std::size_t block_count() const { return blocks_.size(); }
  std::size_t block_of(std::int64_t n) const;
  std::int64_t block_start(std::size_t k) const { return rule_.start(k); }
  // alpha_{N_k}.
  const mpz_class& block_alpha(std::size_t k) const;
  // sum_{n < N_k} alpha_n.
  const mpz_class& block_prefix(std::size_t k) const;

  const mpz_class& alpha(std::int64_t n) const;
  // sum_{i < n} alpha_i for 0 <= n <= horizon + 1.
  mpz_class prefix_sum(std::int64_t n) const;

  // Exact log2 of the weight: alpha_n off block starts and
  // alpha_{N_k} - (alpha_{N_{k-1}} + ... + alpha_{N_k - 1}) at N_k, k >= 1.
  mpz_class weight_exponent(std::int64_t n) const;

  // log2 v_n, v_n = 1/(w_1...w_n), in closed form:
  // alpha_0 - (alpha_{N_k} + ... + alpha_n) for N_k <= n < N_{k+1}.
  mpz_class log2_v(std::int64_t n) const;

 private:
  struct Block {
    std::int64_t start;
    mpz_class alpha;
    mpz_class prefix;
  };

  void check_index(std::int64_t n) const;

  BlockRule rule_;
  std::int64_t horizon_;
  std::vector<Block> blocks_;
};

}  // namespace shiftlab
