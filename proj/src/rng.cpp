#include "rfbm/rng.hpp"

#include <cmath>

namespace rfbm {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
  return splitmix64(splitmix64(root) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

RandomStream::RandomStream(std::uint64_t root, std::uint64_t stream)
    : engine_(derive_seed(root, stream)) {}

RandomStream::RandomStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

double RandomStream::normal() { return normal_(engine_); }

Vec RandomStream::normal_vector(int n, double variance) {
  const double scale = std::sqrt(variance);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = scale * normal_(engine_);
  return v;
}

}  // namespace rfbm
