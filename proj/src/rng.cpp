#include "svmf/rng.hpp"

namespace svmf {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> labels) {
  std::uint64_t s = master;
  for (std::uint64_t label : labels) {
    s = splitmix64(s ^ splitmix64(label));
  }
  return s;
}

}  // namespace svmf
