#pragma once

#include <cmath>
#include <cstdint>

namespace rwre {

// splitmix64 finalizer (Steele, Lea & Flood; constants by Vigna).
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * UINT64_C(0xBF58476D1CE4E5B9);
  z = (z ^ (z >> 27)) * UINT64_C(0x94D049BB133111EB);
  return z ^ (z >> 31);
}

// Fixed-increment splitmix64 stream. 64-bit state, value semantics, so a
// stream can be copied freely and replayed; all sampling in this project
// goes through explicit Stream arguments.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += UINT64_C(0x9E3779B97F4A7C15);
    return mix64(state_);
  }

  // uniform in [0,1), 53 random bits
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // uniform in the open interval (0,1); safe under log()
  double next_double_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // one standard normal draw (Box-Muller, no cached spare)
  double next_normal() {
    const double u1 = next_double_open();
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

// Counter-style substream derivation: hash the master seed together with a
// replicate id, a phase tag and an optional sub-index so that environment,
// walk and optimizer draws come from disjoint streams. Identical inputs give
// identical streams on every platform.
inline Stream substream(std::uint64_t master, std::uint64_t id, std::uint64_t phase,
                        std::uint64_t sub = 0) {
  std::uint64_t s = mix64(master + UINT64_C(0x9E3779B97F4A7C15));
  s = mix64(s ^ (id * UINT64_C(0xA24BAED4963EE407) + 1));
  s = mix64(s ^ (phase * UINT64_C(0x9FB21C651E98DF25) + 1));
  s = mix64(s ^ (sub * UINT64_C(0xD6E8FEB86659FD93) + 1));
  return Stream(s);
}

namespace phase {
inline constexpr std::uint64_t environment = 0;
inline constexpr std::uint64_t walk = 1;
inline constexpr std::uint64_t optimizer = 2;
inline constexpr std::uint64_t chain = 3;
}  // namespace phase

}  // namespace rwre
