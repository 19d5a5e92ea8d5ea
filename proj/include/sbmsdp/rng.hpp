#pragma once

#include <array>
#include <cstdint>

namespace sbmsdp {

// Counter-based generator (Philox-4x32-10). Every draw is addressed by a
// (key, counter) pair, so the value for (seed, replicate, edge, slot) does not
// depend on evaluation order.
class Philox {
 public:
  using Block = std::array<std::uint32_t, 4>;

  explicit Philox(std::uint64_t key) : key_(key) {}

  std::uint64_t key() const { return key_; }

  Block block(std::uint64_t counter_hi, std::uint64_t counter_lo) const;

  // Uniform double in the open interval (0, 1), 53-bit resolution.
  double uniform(std::uint64_t stream, std::uint64_t index,
                 unsigned slot = 0) const;

  // Standard normal via Box-Muller on two uniforms at (stream, index).
  double normal(std::uint64_t stream, std::uint64_t index) const;

 private:
  std::uint64_t key_;
};

// Derives an independent 64-bit seed for child `index` of `parent`.
std::uint64_t split_seed(std::uint64_t parent, std::uint64_t index);

// Sequential stream over a Philox key, for algorithms that consume an
// unknown number of draws (k-means seeding, random restarts).
class PhiloxStream {
 public:
  explicit PhiloxStream(std::uint64_t seed, std::uint64_t stream = 0)
      : gen_(seed), stream_(stream) {}

  double uniform() { return gen_.uniform(stream_, next_++); }
  double normal() { return gen_.normal(stream_, next_++); }
  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

  // UniformRandomBitGenerator interface for <algorithm> shuffles.
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()();

 private:
  Philox gen_;
  std::uint64_t stream_;
  std::uint64_t next_ = 0;
};

}  // namespace sbmsdp
