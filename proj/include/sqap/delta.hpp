#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "sqap/errors.hpp"
#include "sqap/instance.hpp"
#include "sqap/moves.hpp"
#include "sqap/permutation.hpp"
#include "sqap/hugepage.hpp"
#include "sqap/prefetch.hpp"

namespace sqap {

// Sum over all ordered pairs of F[i][j] * D[p(i)][p(j)].
inline cost_t total_cost(const QapInstance& inst, const Permutation& p) {
  cost_t acc = 0;
  for (int i = 0; i < inst.n; ++i) {
    const value_t* frow = inst.flow_row(i);
    const value_t* drow = inst.dist_row(p.to_location[i]);
    for (int j = 0; j < inst.n; ++j)
      acc += static_cast<cost_t>(frow[j]) * drow[p.to_location[j]];
  }
  return acc;
}

// Exact cost change of swapping facilities r and s (cost after minus cost
// before), for symmetric null-diagonal instances:
//   delta = 2 * sum_{k != r,s} (F[s][k] - F[r][k]) * (D[p(r)][p(k)] - D[p(s)][p(k)])
inline cost_t swap_delta_full(const QapInstance& inst, const Permutation& p, int r, int s) {
  const value_t* fr = inst.flow_row(r);
  const value_t* fs = inst.flow_row(s);
  const value_t* dr = inst.dist_row(p.to_location[r]);
  const value_t* ds = inst.dist_row(p.to_location[s]);
  cost_t acc = 0;
  for (int k = 0; k < inst.n; ++k) {
    if (k == r || k == s) continue;
    const int pk = p.to_location[k];
    acc += static_cast<cost_t>(fs[k] - fr[k]) * (dr[pk] - ds[pk]);
  }
  return 2 * acc;
}

// Same value as swap_delta_full, but the sum only visits the union of the
// two adjacency lists: every omitted k has F[s][k] - F[r][k] = 0. A k
// adjacent to both r and s contributes a single merged term.
inline cost_t swap_delta_sparse(const QapInstance& inst, const Permutation& p, int r, int s) {
  const auto& ar = inst.adjacency[r];
  const auto& as = inst.adjacency[s];
  const value_t* dr = inst.dist_row(p.to_location[r]);
  const value_t* ds = inst.dist_row(p.to_location[s]);
  cost_t acc = 0;
  std::size_t i = 0, j = 0;
  while (i < ar.size() || j < as.size()) {
    int k;
    value_t fr_k = 0, fs_k = 0;
    if (j >= as.size() || (i < ar.size() && ar[i].first < as[j].first)) {
      k = ar[i].first;
      fr_k = ar[i].second;
      ++i;
    } else if (i >= ar.size() || as[j].first < ar[i].first) {
      k = as[j].first;
      fs_k = as[j].second;
      ++j;
    } else {
      k = ar[i].first;
      fr_k = ar[i].second;
      fs_k = as[j].second;
      ++i;
      ++j;
    }
    if (k == r || k == s) continue;
    const int pk = p.to_location[k];
    acc += static_cast<cost_t>(fs_k - fr_k) * (dr[pk] - ds[pk]);
  }
  return 2 * acc;
}

// O(1) update of a stored delta after facilities r and s were swapped,
// valid when {u, v} and {r, s} are disjoint. p_after is the post-swap
// permutation and old_delta the exact pre-swap value:
//   delta' = delta + 2 * (F[r][u] - F[r][v] + F[s][v] - F[s][u])
//              * (D[p'(s)][p'(u)] - D[p'(s)][p'(v)] + D[p'(r)][p'(v)] - D[p'(r)][p'(u)])
inline cost_t swap_delta_incremental(const QapInstance& inst, const Permutation& p_after,
                                     cost_t old_delta, int r, int s, int u, int v) {
  if (u == r || u == s || v == r || v == s)
    throw InvalidConfigError("swap_delta_incremental: {u,v} must be disjoint from {r,s}");
  const value_t* fr = inst.flow_row(r);
  const value_t* fs = inst.flow_row(s);
  const value_t* dr = inst.dist_row(p_after.to_location[r]);
  const value_t* ds = inst.dist_row(p_after.to_location[s]);
  const int pu = p_after.to_location[u], pv = p_after.to_location[v];
  const cost_t fterm = static_cast<cost_t>(fr[u]) - fr[v] + fs[v] - fs[u];
  const cost_t dterm = static_cast<cost_t>(ds[pu]) - ds[pv] + dr[pv] - dr[pu];
  return old_delta + 2 * fterm * dterm;
}

struct DeltaChange {
  MoveId move;
  cost_t value;
};

// Per-move swap cost for every unordered pair, in triangular storage
// addressed by MoveId, plus the refresh that repairs it after a swap.
//
// Alongside the table itself, build() keeps a flat CSR copy of the
// adjacency lists and the per-facility contribution
//   contrib[x] = sum_{k in adj(x)} F[x][k] * D[p(x)][p(k)],
// maintained incrementally across refreshes. Both exist so the refresh
// walks only contiguous arrays and rows of D that stay cache-hot for the
// whole pass.
struct DeltaTable {
  std::vector<cost_t, detail::HugePageAllocator<cost_t>> deltas;

  // Flat layout: cell m holds the delta for move m.
  void build(const QapInstance& inst, const Permutation& p) { build_layout(inst, p, 0); }

  // Paired layout: the delta for move m sits at cell 2m, and cell 2m+1 is
  // left for a caller-managed mirror of the same key (a queue store's
  // stored copy). A 16-byte pair never straddles a cache line, so every
  // key write here drags the mirror's line into cache with it, and the
  // mirror's reader finds the line already resident. Table semantics are
  // unchanged — at(), size(), and the refresh sink all speak move ids —
  // and the mirror cells are never read or written by the table.
  void build_paired(const QapInstance& inst, const Permutation& p) { build_layout(inst, p, 1); }

  cost_t at(MoveId m) const { return deltas[static_cast<std::size_t>(m) << shift_]; }
  std::size_t size() const { return deltas.size() >> shift_; }
  // log2 of the cell stride: 0 for flat tables, 1 for paired.
  unsigned stride_shift() const { return shift_; }

  // Repairs the table after facilities r and s were swapped (p_after is the
  // post-swap permutation) and appends to `changed` exactly the entries
  // whose value changed. Moves meeting {r,s} are recomputed from scratch;
  // moves with an endpoint adjacent to r or s get the O(1) incremental
  // correction; every other move has a zero correction and is untouched.
  void refresh_after_move(const QapInstance& inst, const Permutation& p_after, int r, int s,
                          std::vector<DeltaChange>& changed) {
    changed.clear();
    refresh_after_move_streamed(inst, p_after, r, s,
                                [&](MoveId m, cost_t, cost_t fresh) { changed.push_back({m, fresh}); });
  }

  // Core of refresh_after_move: invokes sink(move, old_value, new_value)
  // once per changed entry, already written to the table, instead of
  // collecting a list.
  template <class Sink>
  void refresh_after_move_streamed(const QapInstance& inst, const Permutation& p_after, int r,
                                   int s, Sink&& sink) {
    if (shift_ == 0)
      refresh_impl<0>(inst, p_after, r, s, sink);
    else
      refresh_impl<1>(inst, p_after, r, s, sink);
  }

 private:
  // Shift is the compile-time copy of shift_, so the flat path keeps its
  // plain addressing.
  template <unsigned Shift, class Sink>
  void refresh_impl(const QapInstance& inst, const Permutation& p_after, int r, int s,
                    Sink& sink) {
    const auto cell = [this](MoveId m) -> cost_t& {
      return deltas[static_cast<std::size_t>(m) << Shift];
    };
    const int n = inst.n;
    const std::int32_t* p = p_after.to_location.data();
    const value_t* dr = inst.dist_row(p[r]);
    const value_t* ds = inst.dist_row(p[s]);
    const std::int32_t* coff = csr_off_.data();
    const std::int32_t* cnbr = csr_nbr_.data();
    const value_t* cwt = csr_wt_.data();

    // Union of the two adjacency lists minus {r,s}, ascending, with the
    // flow difference g(k) = F[r][k] - F[s][k] captured during the merge;
    // g vanishes off the union.
    nbrs_.clear();
    gvals_.clear();
    {
      std::int32_t i = coff[r], iend = coff[r + 1];
      std::int32_t j = coff[s], jend = coff[s + 1];
      while (i < iend || j < jend) {
        std::int32_t k;
        cost_t g;
        if (j >= jend || (i < iend && cnbr[i] < cnbr[j])) {
          k = cnbr[i];
          g = cwt[i];
          ++i;
        } else if (i >= iend || cnbr[j] < cnbr[i]) {
          k = cnbr[j];
          g = -static_cast<cost_t>(cwt[j]);
          ++j;
        } else {
          k = cnbr[i];
          g = static_cast<cost_t>(cwt[i]) - cwt[j];
          ++i;
          ++j;
        }
        if (k == r || k == s) continue;
        nbrs_.push_back(k);
        gvals_.push_back(g);
      }
    }

    // h(y) = D[p(r)][p(y)] - D[p(s)][p(y)]: the distance factor shared by
    // every incremental correction of this refresh.
    if (h_.size() != static_cast<std::size_t>(n)) h_.assign(static_cast<std::size_t>(n), 0);
    for (int y = 0; y < n; ++y)
      h_[static_cast<std::size_t>(y)] = static_cast<cost_t>(dr[p[y]]) - ds[p[y]];

    // Node contributions under the new permutation: a neighbor's sum only
    // changed in its r and s terms, which collapse to g*h; r and s changed
    // throughout, so recompute them.
    for (std::size_t idx = 0; idx < nbrs_.size(); ++idx)
      contrib_[static_cast<std::size_t>(nbrs_[idx])] +=
          gvals_[idx] * h_[static_cast<std::size_t>(nbrs_[idx])];
    contrib_[static_cast<std::size_t>(r)] = node_contribution(inst, p, r);
    contrib_[static_cast<std::size_t>(s)] = node_contribution(inst, p, s);

    // Moves meeting {r,s}: exact recompute of delta(x,r) and delta(x,s) as
    //   2 * (T1 - T2 - T3 + T4)
    // around rows of D that stay hot for the whole x sweep: T1 sums
    // F[r][k] * D[p(k)][p(x)] over adj(r), T4 sums F[x][k] * D[p(r)][p(k)]
    // over adj(x), and T2/T3 are contrib[r] and contrib[x] minus their
    // (equal) k=x / k=r corrections. Identical value to the sparse-form
    // delta, term for term.
    rowr_.clear();
    wr_.clear();
    for (std::int32_t e = coff[r]; e < coff[r + 1]; ++e) {
      rowr_.push_back(inst.dist_row(p[cnbr[e]]));
      wr_.push_back(cwt[e]);
    }
    rows_.clear();
    ws_.clear();
    for (std::int32_t e = coff[s]; e < coff[s + 1]; ++e) {
      rows_.push_back(inst.dist_row(p[cnbr[e]]));
      ws_.push_back(cwt[e]);
    }
    const value_t* const* rowr = rowr_.data();
    const value_t* const* rows = rows_.data();
    const cost_t* wrp = wr_.data();
    const cost_t* wsp = ws_.data();
    const std::size_t degr = rowr_.size(), degs = rows_.size();
    const cost_t contrib_r = contrib_[static_cast<std::size_t>(r)];
    const cost_t contrib_s = contrib_[static_cast<std::size_t>(s)];
    for (int x = 0; x < n; ++x) {
      if (x == r || x == s) continue;
      {
        const int xa = x + 24;
        if (xa < n) {
          detail::prefetch_write(&cell(move_id(xa, r)));
          detail::prefetch_write(&cell(move_id(xa, s)));
        }
      }
      const int px = p[x];
      cost_t t1r = 0, t1s = 0;
      for (std::size_t jj = 0; jj < degr; ++jj)
        t1r += wrp[jj] * static_cast<cost_t>(rowr[jj][px]);
      for (std::size_t jj = 0; jj < degs; ++jj)
        t1s += wsp[jj] * static_cast<cost_t>(rows[jj][px]);
      cost_t t4r = 0, t4s = 0, wxr = 0, wxs = 0;
      for (std::int32_t e = coff[x]; e < coff[x + 1]; ++e) {
        const std::int32_t k = cnbr[e];
        const cost_t w = cwt[e];
        const int pk = p[k];
        t4r += w * static_cast<cost_t>(dr[pk]);
        t4s += w * static_cast<cost_t>(ds[pk]);
        if (k == r) wxr = w;
        if (k == s) wxs = w;
      }
      const cost_t cx = contrib_[static_cast<std::size_t>(x)];
      // Unsigned combination keeps extreme intermediates defined; the
      // result always fits, by the instance cost bound.
      const cost_t fresh_r = static_cast<cost_t>(
          2 * (static_cast<std::uint64_t>(t1r) + static_cast<std::uint64_t>(t4r) +
               2 * static_cast<std::uint64_t>(wxr * static_cast<cost_t>(dr[px])) -
               static_cast<std::uint64_t>(contrib_r) - static_cast<std::uint64_t>(cx)));
      const cost_t fresh_s = static_cast<cost_t>(
          2 * (static_cast<std::uint64_t>(t1s) + static_cast<std::uint64_t>(t4s) +
               2 * static_cast<std::uint64_t>(wxs * static_cast<cost_t>(ds[px])) -
               static_cast<std::uint64_t>(contrib_s) - static_cast<std::uint64_t>(cx)));
      const MoveId mr = move_id(x, r);
      cost_t& slot_r = cell(mr);
      const cost_t oldr = slot_r;
      if (fresh_r != oldr) {
        slot_r = fresh_r;
        sink(mr, oldr, fresh_r);
      }
      const MoveId ms = move_id(x, s);
      cost_t& slot_s = cell(ms);
      const cost_t olds = slot_s;
      if (fresh_s != olds) {
        slot_s = fresh_s;
        sink(ms, olds, fresh_s);
      }
    }
    {
      const MoveId mrs = move_id(r, s);
      const cost_t fresh = swap_delta_sparse(inst, p_after, r, s);
      cost_t& slot = cell(mrs);
      const cost_t old = slot;
      if (fresh != old) {
        slot = fresh;
        sink(mrs, old, fresh);
      }
    }

    // Moves not meeting {r,s}: the correction for pair (w,x) is
    //   2 * (g(w) - g(x)) * (h(x) - h(w)),
    // zero unless an endpoint lies in the union. Pairs inside the union
    // are corrected once, from their smaller endpoint; pairs with one
    // endpoint w in the union sweep all generic x, jumping the skip list
    // (union plus r and s, so x never collides with a recomputed move).
    skip_.assign(nbrs_.begin(), nbrs_.end());
    skip_.push_back(std::min(r, s));
    skip_.push_back(std::max(r, s));
    std::sort(skip_.begin(), skip_.end());

    const std::size_t nu = nbrs_.size();
    for (std::size_t wi = 0; wi < nu; ++wi) {
      const std::int32_t w = nbrs_[wi];
      const cost_t gw = gvals_[wi];
      const cost_t hw = h_[static_cast<std::size_t>(w)];
      for (std::size_t wj = wi + 1; wj < nu; ++wj) {
        const cost_t fterm = gw - gvals_[wj];
        if (fterm == 0) continue;
        const std::int32_t x = nbrs_[wj];
        const cost_t dterm = h_[static_cast<std::size_t>(x)] - hw;
        if (dterm == 0) continue;
        const MoveId m = move_id(w, x);
        cost_t& slot = cell(m);
        const cost_t old = slot;
        const cost_t fresh = old + 2 * fterm * dterm;
        slot = fresh;
        sink(m, old, fresh);
      }
      if (gw == 0) continue;
      const std::int64_t wbase = static_cast<std::int64_t>(w) * (w - 1) / 2;
      std::int32_t begin = 0;
      for (std::size_t si = 0; si <= skip_.size(); ++si) {
        const std::int32_t end = si < skip_.size() ? skip_[si] : n;
        for (std::int32_t x = begin; x < end; ++x) {
          if (x > w) {
            const std::int32_t xa = x + 32;
            if (xa < n)
              detail::prefetch_write(&cell(static_cast<MoveId>(
                  static_cast<std::int64_t>(xa) * (xa - 1) / 2 + w)));
          }
          const cost_t dterm = h_[static_cast<std::size_t>(x)] - hw;
          if (dterm == 0) continue;
          const MoveId m = static_cast<MoveId>(
              x < w ? wbase + x : static_cast<std::int64_t>(x) * (x - 1) / 2 + w);
          cost_t& slot = cell(m);
          const cost_t old = slot;
          const cost_t fresh = old + 2 * gw * dterm;
          slot = fresh;
          sink(m, old, fresh);
        }
        begin = end + 1;
      }
    }
  }

  void build_layout(const QapInstance& inst, const Permutation& p, unsigned shift) {
    shift_ = shift;
    const int n = inst.n;
    deltas.assign(static_cast<std::size_t>(move_count(n)) << shift, 0);
    csr_off_.assign(static_cast<std::size_t>(n) + 1, 0);
    std::size_t edges = 0;
    for (int i = 0; i < n; ++i) edges += inst.adjacency[i].size();
    csr_nbr_.clear();
    csr_nbr_.reserve(edges);
    csr_wt_.clear();
    csr_wt_.reserve(edges);
    for (int i = 0; i < n; ++i) {
      for (const auto& [j, w] : inst.adjacency[i]) {
        csr_nbr_.push_back(j);
        csr_wt_.push_back(w);
      }
      csr_off_[static_cast<std::size_t>(i) + 1] = static_cast<std::int32_t>(csr_nbr_.size());
    }
    const std::int32_t* pl = p.to_location.data();
    contrib_.assign(static_cast<std::size_t>(n), 0);
    for (int x = 0; x < n; ++x) contrib_[static_cast<std::size_t>(x)] = node_contribution(inst, pl, x);
    h_.assign(static_cast<std::size_t>(n), 0);
    for (int v = 1; v < n; ++v)
      for (int u = 0; u < v; ++u)
        deltas[static_cast<std::size_t>(move_id(u, v)) << shift] = swap_delta_sparse(inst, p, u, v);
  }

  cost_t node_contribution(const QapInstance& inst, const std::int32_t* p, int x) const {
    const value_t* dx = inst.dist_row(p[x]);
    cost_t acc = 0;
    for (std::int32_t e = csr_off_[static_cast<std::size_t>(x)];
         e < csr_off_[static_cast<std::size_t>(x) + 1]; ++e)
      acc += static_cast<cost_t>(csr_wt_[static_cast<std::size_t>(e)]) *
             dx[p[csr_nbr_[static_cast<std::size_t>(e)]]];
    return acc;
  }

  unsigned shift_ = 0;
  std::vector<std::int32_t> csr_off_;
  std::vector<std::int32_t> csr_nbr_;
  std::vector<value_t> csr_wt_;
  std::vector<cost_t> contrib_;
  std::vector<cost_t> h_;
  std::vector<std::int32_t> nbrs_;
  std::vector<cost_t> gvals_;
  std::vector<std::int32_t> skip_;
  std::vector<const value_t*> rowr_, rows_;
  std::vector<cost_t> wr_, ws_;
};

}  // namespace sqap
