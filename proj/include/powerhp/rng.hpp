#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "powerhp/errors.hpp"
#include "powerhp/vec.hpp"

namespace powerhp {

// Counter-derived RNG: xoshiro256** seeded through splitmix64, plus
// Box-Muller normals. Streams are reproducible bit-for-bit from the seed,
// and split(i) derives an independent child stream per index so parallel
// trials never share state.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
  }

  std::uint64_t seed() const { return seed_; }

  SeededRng split(std::uint64_t index) const {
    std::uint64_t sm = seed_ ^ (0x9E3779B97F4A7C15ULL * (index + 1));
    return SeededRng(splitmix64(sm));
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    // 1 - uniform() lies in (0, 1], so the log is finite.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(theta);
    have_cached_ = true;
    return r * std::cos(theta);
  }

 private:
  static std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t seed_;
  std::uint64_t s_[4];
  bool have_cached_ = false;
  double cached_ = 0.0;
};

// K draws from N(mean, sigma^2 I_d), consuming exactly K * d normal
// variates from rng in sample-major order.
inline std::vector<Vector> sample_gaussian(SeededRng& rng, const Vector& mean,
                                           double sigma, int count) {
  if (sigma <= 0.0) throw UsageError("sample_gaussian: sigma must be > 0");
  if (count < 1) throw UsageError("sample_gaussian: count must be >= 1");
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(count));
  const std::size_t d = mean.dim();
  for (int k = 0; k < count; ++k) {
    std::vector<double> w(d);
    for (std::size_t i = 0; i < d; ++i) w[i] = mean[i] + sigma * rng.normal();
    out.emplace_back(std::move(w));
  }
  return out;
}

}  // namespace powerhp
