#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>

namespace aml {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream seed for a named sub-purpose of a run seed.
inline uint64_t mix_seed(uint64_t seed, uint64_t tag) {
  return splitmix64(seed ^ splitmix64(tag));
}

// Stream tags used across the pipeline so that draw order in one stage can
// never shift the draws of another.
namespace rng_tag {
inline constexpr uint64_t accounts = 0xA001;
inline constexpr uint64_t transactions = 0xA002;
inline constexpr uint64_t calibration_probe = 0xA003;
inline constexpr uint64_t split = 0xA004;
inline constexpr uint64_t model_init = 0xA005;
}  // namespace rng_tag

// Deterministic RNG with explicit draw mappings. std::mt19937_64 output is
// fully specified by the standard; the std distributions are not, so the
// mappings live here.
class Rng {
public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double next_unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n), n > 0.
  uint64_t next_index(uint64_t n) {
    return static_cast<uint64_t>((static_cast<unsigned __int128>(gen_()) * n) >> 64);
  }

  // Standard normal via Box-Muller; two unit draws per call, no cached state.
  double next_gauss() {
    constexpr double two_pi = 2.0 * 3.141592653589793238462643383279502884;
    double u1 = 1.0 - next_unit();  // (0, 1], keeps log() finite
    double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

  // Index into a cumulative weight table (last entry ~1). Returns the first
  // index whose cumulative weight exceeds the draw.
  size_t next_weighted(std::span<const double> cumulative) {
    double u = next_unit();
    size_t lo = 0, hi = cumulative.size();
    while (lo < hi) {
      size_t mid = lo + (hi - lo) / 2;
      if (cumulative[mid] <= u) {
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
    return lo < cumulative.size() ? lo : cumulative.size() - 1;
  }

private:
  std::mt19937_64 gen_;
};

}  // namespace aml
