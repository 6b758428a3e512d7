#include "hotspot/rng.hpp"

#include <cmath>

namespace hotspot {

long Rng::poisson(double mean) {
  if (!(mean > 0.0)) return 0;
  long total = 0;
  // Chunking keeps exp(-chunk) well away from underflow.
  constexpr double kChunk = 500.0;
  while (mean > kChunk) {
    total += poisson(kChunk);
    mean -= kChunk;
  }
  const double limit = std::exp(-mean);
  double prod = 1.0;
  long k = 0;
  do {
    ++k;
    prod *= uniform();
  } while (prod > limit);
  return total + (k - 1);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::string_view label) {
  return splitmix64(master ^ fnv1a(label));
}

}  // namespace hotspot
