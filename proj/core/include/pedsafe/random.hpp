#pragma once

#include <cstdint>
#include <random>

namespace pedsafe {

// Seed derivation. These functions are part of the stable interface:
// changing them changes every published result.
//
//   finalize(z)        splitmix64 output mix (Steele, Lea & Flood)
//   mix_seed(a, b)     finalize(a + 0x9E3779B97F4A7C15 * (b + 1))
//   episode_seed(m, mode, i) = mix_seed(mix_seed(m, mode), i)
//   substream_seed(e, key)   = mix_seed(e, key)
std::uint64_t finalize(std::uint64_t z) noexcept;
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept;
std::uint64_t episode_seed(std::uint64_t master_seed, std::uint64_t mode_id,
                           std::uint64_t episode_index) noexcept;

// Keys for per-episode sub-streams. Roles use their index directly; the
// sensors sit far above any realistic role count.
namespace stream_key {
inline constexpr std::uint64_t kOnboardSensor = 1u << 20;
inline constexpr std::uint64_t kRoadsideSensor = (1u << 20) + 1;
}  // namespace stream_key

// A seeded random stream. Uniform variates are built from raw engine bits
// so sequences are identical across standard library implementations.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t next_u64() { return engine_(); }

  // [0, 1)
  double uniform();
  // (0, 1), safe for inverse-CDF transforms
  double uniform_open();
  // [0, n)
  std::uint64_t uniform_index(std::uint64_t n);

  RandomStream substream(std::uint64_t key) const {
    return RandomStream(mix_seed(seed_, key));
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

}  // namespace pedsafe
