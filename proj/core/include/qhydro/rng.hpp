#pragma once

#include <array>
#include <cstdint>

namespace qhydro {

/// Philox4x32-10 block function (Salmon et al., SC'11). Pure: the output
/// depends only on (counter, key), which makes streams reproducible and
/// independent of evaluation order.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// Random variates addressed by (seed, stream, index); stream is typically a
/// path id and index a step number.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform(std::uint64_t stream, std::uint64_t index) const;

  /// Standard normal via Box-Muller on one Philox block.
  double normal(std::uint64_t stream, std::uint64_t index) const;

 private:
  std::array<std::uint32_t, 4> block(std::uint64_t stream, std::uint64_t index) const;

  std::uint64_t seed_;
};

}  // namespace qhydro
