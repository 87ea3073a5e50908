#pragma once

// Helpers for building test instances straight from matrices.

#include <cstdint>
#include <vector>

#include "sqap/instance.hpp"
#include "sqap/rng.hpp"

namespace testutil {

using sqap::QapInstance;
using sqap::value_t;

inline QapInstance make_instance(int n, std::vector<value_t> flow, std::vector<value_t> dist,
                                 std::string name = "inline") {
  QapInstance inst;
  inst.n = n;
  inst.flow = std::move(flow);
  inst.dist = std::move(dist);
  inst.name = std::move(name);
  sqap::detail::build_adjacency(inst);
  return inst;
}

// Random symmetric null-diagonal matrix; each upper entry is nonzero with
// probability `density` and then uniform in [1, max_value].
inline std::vector<value_t> random_symmetric(int n, double density, value_t max_value,
                                             sqap::SplitMix64& rng) {
  std::vector<value_t> m(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const bool present =
          static_cast<double>(rng.next() >> 11) * 0x1.0p-53 < density;
      const value_t v =
          present ? static_cast<value_t>(1 + rng.uniform_below(static_cast<std::uint64_t>(max_value)))
                  : 0;
      m[static_cast<std::size_t>(i) * n + j] = v;
      m[static_cast<std::size_t>(j) * n + i] = v;
    }
  return m;
}

inline QapInstance random_instance(int n, double flow_density, sqap::SplitMix64& rng) {
  return make_instance(n, random_symmetric(n, flow_density, 9, rng),
                       random_symmetric(n, 1.0, 20, rng));
}

inline std::vector<std::int32_t> random_locations(int n, sqap::SplitMix64& rng) {
  std::vector<std::int32_t> loc(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) loc[static_cast<std::size_t>(i)] = i;
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(i) + 1));
    std::swap(loc[static_cast<std::size_t>(i)], loc[static_cast<std::size_t>(j)]);
  }
  return loc;
}

}  // namespace testutil
