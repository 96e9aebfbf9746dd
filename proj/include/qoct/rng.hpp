#pragma once

#include <cstdint>
#include <random>

namespace qoct {

// splitmix64, used as the documented seed-derivation rule. Parallel and
// serial runs agree because every stream is keyed by (root, indices), never
// by execution order.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Stream seed for (trial, core) under a root seed; extra distinguishes
// sub-streams within one scan (jitter vs counts).
constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t trial,
                                    std::uint64_t core, std::uint64_t extra = 0) {
  std::uint64_t s = splitmix64(root ^ 0xD1B54A32D192ED03ULL);
  s = splitmix64(s ^ splitmix64(trial + 1));
  s = splitmix64(s ^ splitmix64(core + 0x100));
  return splitmix64(s ^ splitmix64(extra + 0x10000));
}

// mt19937_64 plus hand-rolled normal and Poisson samplers so that scan
// records are bit-reproducible: both samplers are fully specified here and
// consume engine draws in a fixed pattern.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() {  // in (0, 1)
    std::uint64_t u = engine_();
    return (static_cast<double>(u >> 11) + 0.5) * (1.0 / 9007199254740992.0);
  }

  double normal(double mean, double sigma) {
    if (have_spare_) {
      have_spare_ = false;
      return mean + sigma * spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * kTwoPi_ * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return mean + sigma * r * std::cos(a);
  }

  // Exact Poisson sampler: sequential inversion for small means, PTRS
  // (Hormann's transformed rejection) above. Both are exact, only speed
  // differs.
  long long poisson(double mu);

 private:
  static constexpr double kTwoPi_ = 3.14159265358979323846;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace qoct
