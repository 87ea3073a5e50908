#pragma once

namespace sqap::detail {

// Best-effort cache-line prefetch hints for the scattered loops; the tabled
// deltas and queue slots are far larger than L2 at interesting sizes, so
// issuing loads a few dozen entries ahead hides most of the miss latency.
// High locality pulls the line all the way to L1: every prefetched line
// here is consumed within a few dozen instructions.
inline void prefetch_read(const void* p) {
#if defined(__GNUC__) || defined(__clang__)
  __builtin_prefetch(p, 0, 3);
#else
  (void)p;
#endif
}

inline void prefetch_write(const void* p) {
#if defined(__GNUC__) || defined(__clang__)
  __builtin_prefetch(p, 1, 3);
#else
  (void)p;
#endif
}

}  // namespace sqap::detail
