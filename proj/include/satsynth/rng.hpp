#pragma once

#include <array>
#include <cstdint>

namespace satsynth {

/// Domains used to derive independent streams from one seed.
enum class StreamDomain : std::uint32_t {
  kPose = 1,
  kBackground = 2,
  kAmbientOcclusion = 3,
  kNoise = 4,
  kRansac = 5,
  kDetections = 6,
  kAugmentation = 7,
};

/// Philox4x32-10 counter-based generator.
///
/// The key is the 64-bit seed and the upper half of the counter selects a
/// stream, so any (seed, stream) pair can be opened directly without
/// advancing a shared state. Output is identical on every platform because
/// the uniform and normal transforms below are implemented here rather than
/// delegated to <random> distributions.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream);

  /// Stream keyed by a domain and up to two ids (frame, pixel, variant...).
  static Rng derive(std::uint64_t seed, StreamDomain domain, std::uint64_t id0 = 0,
                    std::uint64_t id1 = 0);

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Unbiased integer in [0, n); n must be > 0.
  std::uint64_t below(std::uint64_t n);
  /// Standard normal via Box-Muller; the second deviate of each pair is cached.
  double normal();

  /// One Philox4x32-10 block, exposed for known-answer tests.
  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> counter,
                                            std::array<std::uint32_t, 2> key);

 private:
  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> buffer_{};
  int buffered_ = 0;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

/// SplitMix64 finalizer, used for hashing stream ids.
std::uint64_t mix64(std::uint64_t x);

}  // namespace satsynth
