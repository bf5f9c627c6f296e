#pragma once

#include <cmath>
#include <cstdint>

namespace setreg {

// Counter-based generator: the stream for (seed, radius index, sample index)
// never depends on how many samples were drawn before it, so doubling
// samples_per_radius keeps the original sample prefix intact and shards can
// be evaluated in any order.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_a = 0,
            std::uint64_t stream_b = 0) {
    state_ = mix(seed ^ mix(stream_a + 0x9e3779b97f4a7c15ull) ^
                 mix(stream_b + 0xbf58476d1ce4e5b9ull));
    if (state_ == 0) state_ = 0x2545f4914f6cdd1dull;
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  // uniform in [0, 1)
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // uniform in [lo, hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // standard normal via Box-Muller (explicit formula keeps streams
  // reproducible across standard libraries)
  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 1e-300) u1 = next_double();
    double u2 = next_double();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace setreg
