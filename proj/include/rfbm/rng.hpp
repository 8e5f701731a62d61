#pragma once

#include <cstdint>
#include <random>

#include "rfbm/types.hpp"

namespace rfbm {

std::uint64_t splitmix64(std::uint64_t x);

/// Seed of stream `stream` under root seed `root`. Streams are keyed by a
/// counter (usually the path index), so results do not depend on which
/// worker simulates which path.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream);

class RandomStream {
 public:
  RandomStream(std::uint64_t root, std::uint64_t stream);
  explicit RandomStream(std::uint64_t seed);

  double normal();
  // n independent N(0, variance) draws
  Vec normal_vector(int n, double variance);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace rfbm
