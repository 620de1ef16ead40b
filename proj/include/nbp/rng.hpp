// Counter-based random streams for reproducible parallel Monte Carlo.
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace nbp {

// 64-bit finalizer with full avalanche (SplitMix64's mixing function).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// A stateless counter-based generator: draw n is mix64(key + n*gamma).
// Streams are keyed by (master seed, replicate index, purpose tag), so a new
// draw site with its own tag never perturbs the sequences of existing sites,
// and any draw can be reproduced from (key, counter) alone.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t replicate,
            std::string_view purpose)
      : key_(derive_key(master_seed, replicate, purpose)) {}

  std::uint64_t next_u64() noexcept { return mix64(key_ + counter_++ * kGamma); }

  // Uniform on [0, 1) with 53 random bits.
  double next_double() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1]; safe as a log() argument.
  double next_double_pos() noexcept { return 1.0 - next_double(); }

  double exponential(double rate) {
    if (!(rate > 0.0)) throw std::invalid_argument("exponential: rate must be > 0");
    return -std::log(next_double_pos()) / rate;
  }

  bool bernoulli(double prob) noexcept { return next_double() < prob; }

  double normal() noexcept {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u = next_double_pos();
    const double v = next_double();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double a = 6.283185307179586476925 * v;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  // Index into `probs` (need not be normalized; total must be positive).
  std::size_t discrete(std::span<const double> probs);

  // Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) noexcept {
    return static_cast<std::uint64_t>(next_double() * static_cast<double>(n)) % n;
  }

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t replicate,
                                  std::string_view purpose) noexcept {
    std::uint64_t k = mix64(seed);
    k = mix64(k ^ (0xd1342543de82ef95ULL * (replicate + 1)));
    k = mix64(k ^ fnv1a64(purpose));
    return k;
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace nbp
