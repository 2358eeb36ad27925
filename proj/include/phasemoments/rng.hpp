#pragma once

#include <cstdint>
#include <random>

namespace phasemoments {

// SplitMix64 finalizer applied to z + golden ratio increment.
std::uint64_t splitmix64(std::uint64_t z);

// Seed of stream `index` under a master seed. Distinct indices give
// statistically independent mt19937_64 streams.
std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t index);

// mt19937_64 with its own uniform and normal transforms, so draws are
// identical across standard libraries.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : gen_(seed) {}

  // 53-bit uniform on [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  // Uniform on (0, 1).
  double uniform_open() { return (static_cast<double>(gen_() >> 12) + 0.5) * 0x1.0p-52; }
  // Standard normal by the Box-Muller transform; the second variate is cached.
  double normal();

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace phasemoments
