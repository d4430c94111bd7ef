#pragma once

#include <cstdint>

namespace mvs {

// Counter-based random stream. Each (seed, x, y, t, tag) tuple owns an
// independent stream, so per-pixel draws are reproducible no matter how the
// work is scheduled across threads.
class PixelRng {
 public:
  PixelRng(std::uint64_t seed, std::uint32_t x, std::uint32_t y,
           std::int32_t t, std::uint32_t tag = 0) {
    state_ = mix(seed + 0x9E3779B97F4A7C15ULL);
    state_ = mix(state_ ^ (std::uint64_t(x) * 0xBF58476D1CE4E5B9ULL));
    state_ = mix(state_ ^ (std::uint64_t(y) * 0x94D049BB133111EBULL));
    state_ = mix(state_ ^ (std::uint64_t(std::uint32_t(t)) * 0xD6E8FEB86659FD93ULL));
    state_ = mix(state_ ^ (std::uint64_t(tag) * 0xA0761D6478BD642FULL));
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() {
    return double(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

// Stream tags so distinct solver stages never share draws.
enum RngTag : std::uint32_t {
  kRngInit = 0x1000,
  kRngRefine = 0x2000,
};

}  // namespace mvs
