#pragma once

#include <array>
#include <cstdint>

namespace dynlsm {

// Stream ids used by the library, so that draws made under one seed never
// alias across purposes.
inline constexpr std::uint64_t kStreamSimulate = 0;
inline constexpr std::uint64_t kStreamMask = 1;
inline constexpr std::uint64_t kStreamInit = 2;

// Philox4x32-10 counter-based generator.
//
// A stream is identified by (seed, stream). Block k of a stream is
// philox(key = seed, counter = {k_lo, k_hi, stream_lo, stream_hi}); each
// block yields two 64-bit words (word0 | word1 << 32, word2 | word3 << 32).
// Uniforms take the top 53 bits; normals use Box-Muller on two uniforms and
// return the cosine branch first, then the sine branch.
class Philox {
 public:
  explicit Philox(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();
  // Uniform on [0, 1).
  double uniform();
  // Uniform on (0, 1].
  double uniform_pos() { return 1.0 - uniform(); }
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }

  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key);

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_index_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace dynlsm
