#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sqap/errors.hpp"
#include "sqap/rng.hpp"

namespace sqap {

using value_t = std::int32_t;  // single matrix entry
using cost_t = std::int64_t;   // total costs and move deltas

// Symmetric null-diagonal QAP instance. The flow matrix is kept both dense
// and as per-facility adjacency lists (sorted by neighbor) holding exactly
// the nonzero off-diagonal entries.
struct QapInstance {
  int n = 0;
  std::vector<value_t> dist;  // n*n, row-major
  std::vector<value_t> flow;  // n*n, row-major
  std::vector<std::vector<std::pair<std::int32_t, value_t>>> adjacency;
  std::string name;

  value_t dist_at(int i, int j) const { return dist[static_cast<std::size_t>(i) * n + j]; }
  value_t flow_at(int i, int j) const { return flow[static_cast<std::size_t>(i) * n + j]; }
  const value_t* dist_row(int i) const { return dist.data() + static_cast<std::size_t>(i) * n; }
  const value_t* flow_row(int i) const { return flow.data() + static_cast<std::size_t>(i) * n; }

  bool same_data(const QapInstance& o) const {
    return n == o.n && dist == o.dist && flow == o.flow && adjacency == o.adjacency;
  }
};

struct GeneratorConfig {
  int n = 0;
  int k = 0;
  std::uint64_t seed = 0;
  value_t distance_scale = 1000;
};

struct Violation {
  std::string invariant;
  int i = -1;
  int j = -1;
  std::string message;
};

namespace detail {

inline void build_adjacency(QapInstance& inst) {
  inst.adjacency.assign(inst.n, {});
  for (int i = 0; i < inst.n; ++i)
    for (int j = 0; j < inst.n; ++j)
      if (i != j && inst.flow_at(i, j) != 0)
        inst.adjacency[i].emplace_back(j, inst.flow_at(i, j));
}

inline cost_t max_entry(const std::vector<value_t>& m) {
  cost_t best = 0;
  for (value_t v : m) best = std::max<cost_t>(best, v);
  return best;
}

}  // namespace detail

// Largest total cost any permutation can reach is bounded by
// n^2 * max(F) * max(D); it must fit in cost_t or delta arithmetic could
// silently wrap and break the engine cross-checks.
inline bool cost_bound_ok(const QapInstance& inst) {
  const cost_t mf = detail::max_entry(inst.flow);
  const cost_t md = detail::max_entry(inst.dist);
  if (mf == 0 || md == 0) return true;
  const cost_t n2 = static_cast<cost_t>(inst.n) * inst.n;
  return mf <= std::numeric_limits<cost_t>::max() / md / n2;
}

inline std::vector<Violation> validate(const QapInstance& inst) {
  std::vector<Violation> out;
  const int n = inst.n;
  auto expect_size = static_cast<std::size_t>(n) * n;
  if (n < 0 || inst.dist.size() != expect_size || inst.flow.size() != expect_size) {
    out.push_back({"matrix-shape", -1, -1, "dist/flow are not n x n"});
    return out;
  }
  for (int i = 0; i < n; ++i) {
    if (inst.dist_at(i, i) != 0)
      out.push_back({"null-diagonal", i, i, "dist[" + std::to_string(i) + "][" + std::to_string(i) + "] != 0"});
    if (inst.flow_at(i, i) != 0)
      out.push_back({"null-diagonal", i, i, "flow[" + std::to_string(i) + "][" + std::to_string(i) + "] != 0"});
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (inst.dist_at(i, j) != inst.dist_at(j, i))
        out.push_back({"symmetry", i, j, "dist[" + std::to_string(i) + "][" + std::to_string(j) + "] != dist[" + std::to_string(j) + "][" + std::to_string(i) + "]"});
      if (inst.flow_at(i, j) != inst.flow_at(j, i))
        out.push_back({"symmetry", i, j, "flow[" + std::to_string(i) + "][" + std::to_string(j) + "] != flow[" + std::to_string(j) + "][" + std::to_string(i) + "]"});
    }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (inst.dist_at(i, j) < 0)
        out.push_back({"nonnegative", i, j, "dist entry is negative"});
      if (inst.flow_at(i, j) < 0)
        out.push_back({"nonnegative", i, j, "flow entry is negative"});
    }
  if (static_cast<int>(inst.adjacency.size()) != n) {
    out.push_back({"adjacency", -1, -1, "adjacency list count != n"});
  } else {
    for (int i = 0; i < n; ++i) {
      std::size_t nonzero = 0;
      for (int j = 0; j < n; ++j)
        if (j != i && inst.flow_at(i, j) != 0) ++nonzero;
      if (inst.adjacency[i].size() != nonzero) {
        out.push_back({"adjacency", i, -1, "adjacency[" + std::to_string(i) + "] size mismatch"});
        continue;
      }
      std::int32_t prev = -1;
      for (auto [j, w] : inst.adjacency[i]) {
        if (j <= prev) {
          out.push_back({"adjacency", i, j, "adjacency not sorted/unique"});
          break;
        }
        prev = j;
        if (j < 0 || j >= n || j == i || inst.flow_at(i, j) != w) {
          out.push_back({"adjacency", i, j, "adjacency entry disagrees with flow matrix"});
          break;
        }
      }
    }
  }
  if (!cost_bound_ok(inst))
    out.push_back({"cost-bound", -1, -1, "n^2 * max(F) * max(D) overflows the 64-bit cost type"});
  return out;
}

// Fraction of off-diagonal flow entries that are nonzero.
inline double sparsity(const QapInstance& inst) {
  if (inst.n < 2) return 0.0;
  std::int64_t nonzero = 0;
  for (int i = 0; i < inst.n; ++i)
    for (int j = 0; j < inst.n; ++j)
      if (i != j && inst.flow_at(i, j) != 0) ++nonzero;
  return static_cast<double>(nonzero) /
         static_cast<double>(static_cast<std::int64_t>(inst.n) * inst.n - inst.n);
}

enum class MatrixOrder { flow_first, dist_first };

// Whitespace-separated text: n, then n*n integers, then n*n integers.
// By default the first matrix is flow and the second distance; published
// QAP files disagree on the order, so the caller can flip it.
inline QapInstance parse_qaplib(std::istream& in, MatrixOrder order = MatrixOrder::flow_first) {
  std::vector<std::int64_t> tokens;
  std::string tok;
  while (in >> tok) {
    std::int64_t v = 0;
    std::size_t pos = 0;
    bool ok = true;
    try {
      v = std::stoll(tok, &pos);
    } catch (const std::exception&) {
      ok = false;
    }
    if (!ok || pos != tok.size())
      throw MalformedFileError("token " + std::to_string(tokens.size()) + " is not an integer: '" + tok + "'");
    tokens.push_back(v);
  }
  if (tokens.empty()) throw MalformedFileError("empty input, expected instance size");
  if (tokens[0] < 1 || tokens[0] > 100000)
    throw MalformedFileError("token 0: instance size " + std::to_string(tokens[0]) + " out of range");
  const int n = static_cast<int>(tokens[0]);
  const std::size_t expected = 1 + 2 * static_cast<std::size_t>(n) * n;
  if (tokens.size() != expected)
    throw MalformedFileError("expected " + std::to_string(expected) + " tokens for n=" + std::to_string(n) +
                             ", found " + std::to_string(tokens.size()) +
                             " (first mismatch at token index " +
                             std::to_string(std::min(tokens.size(), expected)) + ")");

  auto read_matrix = [&](std::size_t offset, const char* which) {
    std::vector<value_t> m(static_cast<std::size_t>(n) * n);
    for (std::size_t idx = 0; idx < m.size(); ++idx) {
      std::int64_t v = tokens[offset + idx];
      if (v < 0)
        throw UnsupportedInstanceError(std::string(which) + "[" + std::to_string(idx / n) + "][" +
                                       std::to_string(idx % n) + "] = " + std::to_string(v) +
                                       " is negative");
      if (v > std::numeric_limits<value_t>::max())
        throw UnsupportedInstanceError(std::string(which) + "[" + std::to_string(idx / n) + "][" +
                                       std::to_string(idx % n) + "] = " + std::to_string(v) +
                                       " exceeds the 32-bit entry limit");
      m[idx] = static_cast<value_t>(v);
    }
    return m;
  };

  QapInstance inst;
  inst.n = n;
  const std::size_t m1 = 1, m2 = 1 + static_cast<std::size_t>(n) * n;
  if (order == MatrixOrder::flow_first) {
    inst.flow = read_matrix(m1, "flow");
    inst.dist = read_matrix(m2, "dist");
  } else {
    inst.dist = read_matrix(m1, "dist");
    inst.flow = read_matrix(m2, "flow");
  }

  auto check_square = [&](const std::vector<value_t>& m, const char* which) {
    for (int i = 0; i < n; ++i) {
      if (m[static_cast<std::size_t>(i) * n + i] != 0)
        throw UnsupportedInstanceError(std::string(which) + "[" + std::to_string(i) + "][" +
                                       std::to_string(i) + "] is nonzero; only null-diagonal instances are supported");
      for (int j = i + 1; j < n; ++j)
        if (m[static_cast<std::size_t>(i) * n + j] != m[static_cast<std::size_t>(j) * n + i])
          throw UnsupportedInstanceError(std::string(which) + "[" + std::to_string(i) + "][" +
                                         std::to_string(j) + "] != " + which + "[" + std::to_string(j) +
                                         "][" + std::to_string(i) + "]; only symmetric instances are supported");
    }
  };
  check_square(inst.flow, "flow");
  check_square(inst.dist, "dist");
  if (!cost_bound_ok(inst))
    throw UnsupportedInstanceError("n^2 * max(F) * max(D) overflows the 64-bit cost type");

  detail::build_adjacency(inst);
  return inst;
}

inline QapInstance parse_qaplib(const std::string& text, MatrixOrder order = MatrixOrder::flow_first) {
  std::istringstream in(text);
  return parse_qaplib(in, order);
}

// Canonical form: n on its own line, then flow rows, then distance rows.
inline void write_qaplib(const QapInstance& inst, std::ostream& out) {
  out << inst.n << "\n";
  auto write_matrix = [&](const std::vector<value_t>& m) {
    for (int i = 0; i < inst.n; ++i) {
      for (int j = 0; j < inst.n; ++j) {
        if (j) out << ' ';
        out << m[static_cast<std::size_t>(i) * inst.n + j];
      }
      out << "\n";
    }
  };
  write_matrix(inst.flow);
  write_matrix(inst.dist);
}

inline std::string write_qaplib(const QapInstance& inst) {
  std::ostringstream out;
  write_qaplib(inst, out);
  return out.str();
}

namespace detail {

// One pairing attempt over the leftover stubs. Pairs that would form a
// self-loop or duplicate edge are thrown back and re-shuffled; returns
// false when the leftovers cannot possibly be matched, which forces a
// full restart.
inline bool pair_stubs(int n, int k, SplitMix64& rng, std::vector<std::uint8_t>& adj_bits,
                       std::vector<std::pair<int, int>>& edges) {
  std::vector<int> stubs;
  stubs.reserve(static_cast<std::size_t>(n) * k);
  for (int v = 0; v < n; ++v)
    for (int c = 0; c < k; ++c) stubs.push_back(v);
  edges.clear();
  std::fill(adj_bits.begin(), adj_bits.end(), 0);
  auto has_edge = [&](int a, int b) -> std::uint8_t& {
    return adj_bits[static_cast<std::size_t>(a) * n + b];
  };

  while (!stubs.empty()) {
    for (std::size_t i = stubs.size() - 1; i > 0; --i) {
      std::size_t j = rng.uniform_below(i + 1);
      std::swap(stubs[i], stubs[j]);
    }
    std::vector<int> leftover;
    for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
      int a = stubs[i], b = stubs[i + 1];
      if (a == b || has_edge(a, b)) {
        leftover.push_back(a);
        leftover.push_back(b);
      } else {
        has_edge(a, b) = has_edge(b, a) = 1;
        edges.emplace_back(a, b);
      }
    }
    if (leftover.size() == stubs.size()) {
      // No progress: check whether any legal pair remains among leftovers.
      bool possible = false;
      for (std::size_t i = 0; i < leftover.size() && !possible; ++i)
        for (std::size_t j = i + 1; j < leftover.size() && !possible; ++j)
          if (leftover[i] != leftover[j] && !has_edge(leftover[i], leftover[j])) possible = true;
      if (!possible) return false;
    }
    stubs = std::move(leftover);
  }
  return true;
}

}  // namespace detail

// Locations on a ceil(sqrt(n)) grid, row-major, with rounded scaled
// Euclidean distances; flows form a k-regular random graph with unit
// weights. Pure function of the seed.
inline QapInstance generate_instance(const GeneratorConfig& cfg) {
  const int n = cfg.n, k = cfg.k;
  if (n < 2) throw InvalidConfigError("generate: n must be at least 2");
  if (k <= 0 || k >= n)
    throw InvalidConfigError("generate: need 0 < k < n, got k=" + std::to_string(k) +
                             ", n=" + std::to_string(n));
  if ((static_cast<std::int64_t>(n) * k) % 2 != 0)
    throw InvalidConfigError("generate: n*k must be even (no " + std::to_string(k) +
                             "-regular graph on " + std::to_string(n) + " nodes exists)");
  if (cfg.distance_scale <= 0) throw InvalidConfigError("generate: distance_scale must be positive");

  QapInstance inst;
  inst.n = n;
  inst.name = "grid-kreg-n" + std::to_string(n) + "-k" + std::to_string(k) + "-s" + std::to_string(cfg.seed);

  const int side = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  inst.dist.assign(static_cast<std::size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i) {
    const int xi = i % side, yi = i / side;
    for (int j = i + 1; j < n; ++j) {
      const int dx = xi - j % side, dy = yi - j / side;
      const double euclid = std::sqrt(static_cast<double>(dx) * dx + static_cast<double>(dy) * dy);
      const value_t d = static_cast<value_t>(std::llround(cfg.distance_scale * euclid));
      inst.dist[static_cast<std::size_t>(i) * n + j] = d;
      inst.dist[static_cast<std::size_t>(j) * n + i] = d;
    }
  }

  SplitMix64 rng(cfg.seed);
  std::vector<std::uint8_t> adj_bits(static_cast<std::size_t>(n) * n, 0);
  std::vector<std::pair<int, int>> edges;
  while (!detail::pair_stubs(n, k, rng, adj_bits, edges)) {
  }

  inst.flow.assign(static_cast<std::size_t>(n) * n, 0);
  for (auto [a, b] : edges) {
    inst.flow[static_cast<std::size_t>(a) * n + b] = 1;
    inst.flow[static_cast<std::size_t>(b) * n + a] = 1;
  }
  detail::build_adjacency(inst);
  if (!cost_bound_ok(inst))
    throw UnsupportedInstanceError("generated instance exceeds the 64-bit cost bound");
  return inst;
}

}  // namespace sqap
