#pragma once

#include <cstdint>
#include <vector>

#include "sqap/errors.hpp"
#include "sqap/rng.hpp"

namespace sqap {

// Facility -> location assignment plus its inverse. Both arrays are kept
// bijections on [0, n) at all times.
struct Permutation {
  std::vector<std::int32_t> to_location;
  std::vector<std::int32_t> to_facility;

  static Permutation identity(int n) {
    Permutation p;
    p.to_location.resize(n);
    p.to_facility.resize(n);
    for (int i = 0; i < n; ++i) {
      p.to_location[i] = i;
      p.to_facility[i] = i;
    }
    return p;
  }

  // Fisher-Yates, high index to low, one uniform draw per step (n-1 draws).
  static Permutation random(int n, SplitMix64& rng) {
    Permutation p = identity(n);
    for (int i = n - 1; i >= 1; --i) {
      int j = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(i) + 1));
      std::swap(p.to_location[i], p.to_location[j]);
    }
    for (int i = 0; i < n; ++i) p.to_facility[p.to_location[i]] = i;
    return p;
  }

  int size() const { return static_cast<int>(to_location.size()); }

  bool operator==(const Permutation& other) const = default;
};

// Swap the locations of facilities r and s, keeping the inverse consistent.
inline void apply_swap(Permutation& p, int r, int s) {
  if (r == s) throw InvalidConfigError("apply_swap: r == s");
  std::swap(p.to_location[r], p.to_location[s]);
  p.to_facility[p.to_location[r]] = r;
  p.to_facility[p.to_location[s]] = s;
}

}  // namespace sqap
