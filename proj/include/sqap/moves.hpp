#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

namespace sqap {

// A move is an unordered facility pair (u, v), u < v, addressed by its
// linear index into triangular storage: id = v*(v-1)/2 + u. The linear
// index doubles as the deterministic tie-break everywhere a minimum is
// selected, so it must be a total order shared by both engines.
using MoveId = std::int32_t;

inline std::int64_t move_count(int n) {
  return static_cast<std::int64_t>(n) * (n - 1) / 2;
}

inline MoveId move_id(int u, int v) {
  if (u > v) std::swap(u, v);
  return static_cast<MoveId>(static_cast<std::int64_t>(v) * (v - 1) / 2 + u);
}

// Inverse of move_id: returns (u, v) with u < v.
inline std::pair<int, int> move_pair(MoveId id) {
  // v is the largest integer with v*(v-1)/2 <= id. The floating guess is
  // within one of the answer; the loops make it exact.
  int v = static_cast<int>((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(id))) / 2.0);
  if (v < 1) v = 1;
  std::int64_t base = static_cast<std::int64_t>(v) * (v - 1) / 2;
  while (base > id) {
    --v;
    base = static_cast<std::int64_t>(v) * (v - 1) / 2;
  }
  while (base + v <= id) {
    base += v;
    ++v;
  }
  return {static_cast<int>(id - base), v};
}

}  // namespace sqap
