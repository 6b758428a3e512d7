#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace hotspot {

// All sampling in the project goes through this wrapper. mt19937_64 output is
// pinned by the C++ standard; the transforms below are ours, so a seed fixes
// every stream bit-for-bit. Standard-library distributions are
// implementation-defined and are not used anywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller without the cached second value: one normal per two uniforms,
  // so the stream position is a pure function of the call count.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  double exponential(double mean) {
    double u = uniform();
    while (u <= 0.0) u = uniform();
    return -mean * std::log(u);
  }

  double chi_squared(int dof) {
    double s = 0.0;
    for (int i = 0; i < dof; ++i) {
      const double z = normal();
      s += z * z;
    }
    return s;
  }

  // Exact Poisson sampling. Knuth's product method, with large means split
  // into additive chunks (a sum of independent Poissons is Poisson).
  long poisson(double mean);

 private:
  static constexpr double kPi = 3.14159265358979323846;
  std::mt19937_64 eng_;
};

// Fans a master seed out to per-component streams ("rff", "bo", "synth", ...).
// FNV-1a over the label mixed through splitmix64; documented in the README.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label);

}  // namespace hotspot
