#pragma once

#include <cstdint>

namespace sqap {

// splitmix64 (Steele, Lea, Flood 2014). Both solver engines share this
// generator and must consume draws in the same order, or their traces
// diverge. uniform_below uses a single 128-bit multiply per draw so the
// number of raw outputs per call is always exactly one.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    ++draws_;
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, bound). bound must be > 0.
  std::uint64_t uniform_below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * bound) >> 64);
  }

  // Uniform in [lo, hi], inclusive. lo <= hi.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(
                    uniform_below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  std::uint64_t draw_count() const { return draws_; }

private:
  std::uint64_t state_;
  std::uint64_t draws_ = 0;
};

}  // namespace sqap
