#pragma once

#include <cstdint>

namespace lcprod {

// SplitMix64 output function.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// SplitMix64 generator. Every block of every point gets its own stream, so
// seeding has to be cheap; an mt19937_64 costs microseconds per seed.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}
  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~std::uint64_t{0}; }
  constexpr result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

 private:
  std::uint64_t state_;
};

using Rng = SplitMix64;

// Seed splitting rule shared by every sampler in the library: the stream for
// child `index` of `parent` is seeded with mix64(parent + (index + 1) * phi).
// Block k of a sampled point uses derive_seed(point_seed, k); point i of a
// study uses derive_seed(study_seed, i).
constexpr std::uint64_t derive_seed(std::uint64_t parent,
                                    std::uint64_t index) noexcept {
  return mix64(parent + (index + 1) * 0x9e3779b97f4a7c15ULL);
}

// Uniform on the open interval (0, 1) from the top 53 bits of one draw.
inline double uniform_open(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace lcprod
