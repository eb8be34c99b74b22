#pragma once

#include <cstdint>
#include <random>

namespace svmf {

// Generator identifier recorded in benchmark manifests. All synthetic data
// flows through SeededRng so bundles reproduce bit-for-bit across
// platforms: mt19937_64 raw output mapped to doubles via the 53-bit
// mantissa trick, never through std distributions (whose output is
// implementation-defined).
inline constexpr const char* kGeneratorId = "mt19937_64/canonical53";
inline constexpr const char* kSeedMixingId = "splitmix64-fold";

std::uint64_t splitmix64(std::uint64_t x);

// Folds a label sequence into a derived stream seed:
//   s = splitmix64(s ^ splitmix64(label_i)) starting from the master seed.
std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> labels);

class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform in [0, m); m must be positive.
  std::uint64_t uniform_index(std::uint64_t m) {
    auto idx = static_cast<std::uint64_t>(uniform01() * static_cast<double>(m));
    return idx < m ? idx : m - 1;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace svmf
