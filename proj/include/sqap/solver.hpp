#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sqap/delta.hpp"
#include "sqap/errors.hpp"
#include "sqap/instance.hpp"
#include "sqap/moves.hpp"
#include "sqap/permutation.hpp"
#include "sqap/queue_bank.hpp"
#include "sqap/rng.hpp"

namespace sqap {

enum class InitKind : std::uint8_t { random = 0, identity = 1 };

struct SolverParams {
  std::int64_t iterations = 1000;
  std::uint64_t seed = 0;
  std::int64_t tenure_min = -1;  // -1: floor(0.9 n)
  std::int64_t tenure_max = -1;  // -1: ceil(1.1 n)
  std::int64_t aspiration = -1;  // -1: 5 n^2
  InitKind init = InitKind::random;
  bool debug_checks = false;
  bool instrument = false;
};

inline SolverParams resolve_params(SolverParams p, int n) {
  if (n < 2) throw InvalidConfigError("solver needs n >= 2");
  if (p.tenure_min < 0) p.tenure_min = (9 * static_cast<std::int64_t>(n)) / 10;
  if (p.tenure_max < 0) p.tenure_max = (11 * static_cast<std::int64_t>(n) + 9) / 10;
  if (p.aspiration < 0) p.aspiration = 5 * static_cast<std::int64_t>(n) * n;
  if (p.iterations < 0) throw InvalidConfigError("iterations must be >= 0");
  if (p.tenure_min < 1) throw InvalidConfigError("tenure_min must be >= 1");
  if (p.tenure_min > p.tenure_max) throw InvalidConfigError("tenure_min must be <= tenure_max");
  if (p.aspiration <= p.tenure_max)
    throw InvalidConfigError("aspiration threshold must exceed tenure_max");
  return p;
}

enum class Rule : std::uint8_t { global_improving = 1, aspired = 2, authorized = 3, fallback = 4 };

inline const char* to_string(Rule r) {
  switch (r) {
    case Rule::global_improving: return "global_improving";
    case Rule::aspired: return "aspired";
    case Rule::authorized: return "authorized";
    case Rule::fallback: return "fallback";
  }
  return "?";
}

struct MoveRecord {
  std::int64_t iteration;
  MoveId move;
  cost_t delta;
  Rule rule;
  std::int64_t tenure;
  cost_t cost_after;

  bool operator==(const MoveRecord&) const = default;
};

inline std::string to_string(const MoveRecord& r) {
  const auto [u, v] = move_pair(r.move);
  return "iter " + std::to_string(r.iteration) + " move " + std::to_string(r.move) + " (" +
         std::to_string(u) + "," + std::to_string(v) + ") delta " + std::to_string(r.delta) +
         " rule " + to_string(r.rule) + " tenure " + std::to_string(r.tenure) + " cost " +
         std::to_string(r.cost_after);
}

struct PhaseTimes {
  double selection = 0;
  double delta_update = 0;
  double queue_ops = 0;

  double total() const { return selection + delta_update + queue_ops; }
};

struct RunResult {
  cost_t best_cost = 0;
  cost_t last_cost = 0;
  Permutation best;
  Permutation last;
  std::int64_t iterations = 0;
  std::vector<MoveRecord> trace;
  PhaseTimes phases;
  double wall_seconds = 0;
  std::uint64_t rng_draws = 0;
  std::uint64_t queue_repairs = 0;
  std::int64_t migrations = 0;
};

namespace detail {

struct Candidate {
  MoveId move;
  cost_t delta;
};

struct Choice {
  MoveId move;
  cost_t delta;
  Rule rule;
};

// The selection cascade both engines share. `global` is the minimum
// (delta, move) over every move regardless of state; it wins outright if
// taking it would improve on the best cost seen. Otherwise the best
// aspired move, then the best authorized move; when every move is
// ineligible, `fallback()` supplies the one closest to release.
template <class FallbackFn>
Choice choose_move(const Candidate& global, const std::optional<Candidate>& aspired,
                   const std::optional<Candidate>& authorized, cost_t current, cost_t best,
                   FallbackFn&& fallback) {
  if (current + global.delta < best) return {global.move, global.delta, Rule::global_improving};
  if (aspired) return {aspired->move, aspired->delta, Rule::aspired};
  if (authorized) return {authorized->move, authorized->delta, Rule::authorized};
  const Candidate fb = fallback();
  return {fb.move, fb.delta, Rule::fallback};
}

inline bool candidate_less(cost_t d1, MoveId m1, cost_t d2, MoveId m2) {
  return d1 < d2 || (d1 == d2 && m1 < m2);
}

inline void check_cost_and_table(const QapInstance& inst, const Permutation& p, cost_t cost,
                                 const DeltaTable& table, std::int64_t iter) {
  if (total_cost(inst, p) != cost)
    throw DebugCheckError("iter " + std::to_string(iter) + ": running cost " +
                          std::to_string(cost) + " != recomputed " +
                          std::to_string(total_cost(inst, p)));
  DeltaTable fresh;
  fresh.build(inst, p);
  for (MoveId m = 0; m < static_cast<MoveId>(fresh.size()); ++m)
    if (fresh.at(m) != table.at(m))
      throw DebugCheckError("iter " + std::to_string(iter) + ": table delta for move " +
                            std::to_string(m) + " is " + std::to_string(table.at(m)) +
                            ", from scratch " + std::to_string(fresh.at(m)));
}

}  // namespace detail

// Reference engine: per-iteration full scans over the move table, with move
// states derived on the fly from the eligibility array.
class DenseEngine {
 public:
  DenseEngine(const QapInstance& inst, const SolverParams& raw)
      : inst_(inst), params_(resolve_params(raw, inst.n)), rng_(params_.seed) {
    p_ = params_.init == InitKind::random ? Permutation::random(inst.n, rng_)
                                          : Permutation::identity(inst.n);
    table_.build(inst_, p_);
    eligible_.assign(table_.size(), 0);
    cost_ = total_cost(inst_, p_);
    best_cost_ = cost_;
    best_p_ = p_;
  }

  void step() {
    ++iter_;
    detail::Choice choice{};
    timed(phases_.selection, [&] { choice = select(); });

    const auto [r, s] = move_pair(choice.move);
    apply_swap(p_, r, s);
    cost_ += choice.delta;
    const std::int64_t tenure = rng_.uniform_int(params_.tenure_min, params_.tenure_max);
    eligible_[static_cast<std::size_t>(choice.move)] = iter_ + tenure;

    timed(phases_.delta_update, [&] { update_table(r, s); });

    if (cost_ < best_cost_) {
      best_cost_ = cost_;
      best_p_ = p_;
    }
    trace_.push_back({iter_, choice.move, choice.delta, choice.rule, tenure, cost_});

    if (params_.debug_checks) detail::check_cost_and_table(inst_, p_, cost_, table_, iter_);
  }

  const SolverParams& params() const { return params_; }
  std::int64_t iteration() const { return iter_; }
  cost_t current_cost() const { return cost_; }
  cost_t best_cost() const { return best_cost_; }
  const Permutation& permutation() const { return p_; }
  const Permutation& best_permutation() const { return best_p_; }
  const std::vector<MoveRecord>& trace() const { return trace_; }
  const DeltaTable& table() const { return table_; }
  const PhaseTimes& phases() const { return phases_; }
  void reset_phases() { phases_ = {}; }
  std::uint64_t rng_draws() const { return rng_.draw_count(); }

  RunResult snapshot() const {
    RunResult r;
    r.best_cost = best_cost_;
    r.last_cost = cost_;
    r.best = best_p_;
    r.last = p_;
    r.iterations = iter_;
    r.trace = trace_;
    r.phases = phases_;
    r.rng_draws = rng_.draw_count();
    return r;
  }

 private:
  detail::Choice select() const {
    const std::int64_t count = static_cast<std::int64_t>(table_.size());
    MoveId g_m = -1, asp_m = -1, auth_m = -1, fb_m = -1;
    cost_t g_d = 0, asp_d = 0, auth_d = 0;
    std::int64_t fb_e = 0;
    for (MoveId m = 0; m < count; ++m) {
      const cost_t d = table_.deltas[static_cast<std::size_t>(m)];
      if (g_m < 0 || d < g_d) {
        g_d = d;
        g_m = m;
      }
      const std::int64_t e = eligible_[static_cast<std::size_t>(m)];
      if (iter_ <= e) {
        if (fb_m < 0 || e < fb_e) {
          fb_e = e;
          fb_m = m;
        }
      } else if (iter_ - params_.aspiration > e) {
        if (asp_m < 0 || d < asp_d) {
          asp_d = d;
          asp_m = m;
        }
      } else {
        if (auth_m < 0 || d < auth_d) {
          auth_d = d;
          auth_m = m;
        }
      }
    }
    std::optional<detail::Candidate> asp, auth;
    if (asp_m >= 0) asp = detail::Candidate{asp_m, asp_d};
    if (auth_m >= 0) auth = detail::Candidate{auth_m, auth_d};
    return detail::choose_move(detail::Candidate{g_m, g_d}, asp, auth, cost_, best_cost_, [&] {
      return detail::Candidate{fb_m, table_.deltas[static_cast<std::size_t>(fb_m)]};
    });
  }

  // Classic post-swap repair: O(n) recompute for the moves meeting {r,s},
  // the O(1) correction applied to every other pair without looking at the
  // sparsity structure.
  void update_table(int r, int s) {
    const int n = inst_.n;
    for (int x = 0; x < n; ++x) {
      if (x == r || x == s) continue;
      table_.deltas[static_cast<std::size_t>(move_id(x, r))] = swap_delta_full(inst_, p_, x, r);
      table_.deltas[static_cast<std::size_t>(move_id(x, s))] = swap_delta_full(inst_, p_, x, s);
    }
    table_.deltas[static_cast<std::size_t>(move_id(r, s))] = swap_delta_full(inst_, p_, r, s);

    const value_t* fr = inst_.flow_row(r);
    const value_t* fs = inst_.flow_row(s);
    const value_t* dr = inst_.dist_row(p_.to_location[r]);
    const value_t* ds = inst_.dist_row(p_.to_location[s]);
    for (int v = 1; v < n; ++v) {
      if (v == r || v == s) continue;
      const value_t frv = fr[v], fsv = fs[v];
      const int pv = p_.to_location[v];
      const cost_t dspv = ds[pv], drpv = dr[pv];
      cost_t* row = table_.deltas.data() + move_id(0, v);
      for (int u = 0; u < v; ++u) {
        if (u == r || u == s) continue;
        const cost_t fterm = static_cast<cost_t>(fr[u]) - frv + fsv - fs[u];
        const int pu = p_.to_location[u];
        const cost_t dterm = static_cast<cost_t>(ds[pu]) - dspv + drpv - dr[pu];
        row[u] += 2 * fterm * dterm;
      }
    }
  }

  template <class F>
  void timed(double& acc, F&& f) {
    if (!params_.instrument) {
      f();
      return;
    }
    const auto a = std::chrono::steady_clock::now();
    f();
    acc += std::chrono::duration<double>(std::chrono::steady_clock::now() - a).count();
  }

  const QapInstance& inst_;
  SolverParams params_;
  SplitMix64 rng_;
  Permutation p_, best_p_;
  DeltaTable table_;
  std::vector<std::int64_t> eligible_;
  cost_t cost_ = 0, best_cost_ = 0;
  std::int64_t iter_ = 0;
  std::vector<MoveRecord> trace_;
  PhaseTimes phases_;
};

// Queue-backed engine: move states live in the queue bank, selection works
// off validated queue minima, and the delta table is repaired only where
// the sparsity structure allows a change.
class SparseEngine {
 public:
  SparseEngine(const QapInstance& inst, const SolverParams& raw)
      : inst_(inst),
        params_(resolve_params(raw, inst.n)),
        rng_(params_.seed),
        bank_(static_cast<std::int32_t>(move_count(inst.n))) {
    p_ = params_.init == InitKind::random ? Permutation::random(inst.n, rng_)
                                          : Permutation::identity(inst.n);
    // Paired key layout: the refresh's own table writes pull the queue
    // store's stored-copy lines into cache, so the reconcile pass that
    // follows each refresh probes warm lines.
    table_.build_paired(inst_, p_);
    bank_.init_all_ineligible(table_);
    cost_ = total_cost(inst_, p_);
    best_cost_ = cost_;
    best_p_ = p_;
  }

  void step() {
    ++iter_;
    timed(phases_.queue_ops, [&] { migrations_ += bank_.migrate(iter_, params_.aspiration); });

    detail::Choice choice{};
    timed(phases_.selection, [&] { choice = select(); });

    const auto [r, s] = move_pair(choice.move);
    apply_swap(p_, r, s);
    cost_ += choice.delta;
    const std::int64_t tenure = rng_.uniform_int(params_.tenure_min, params_.tenure_max);

    timed(phases_.queue_ops,
          [&] { bank_.reset_to_ineligible(choice.move, iter_ + tenure, table_.at(choice.move)); });
    timed(phases_.delta_update, [&] {
      pending_.clear();
      table_.refresh_after_move_streamed(
          inst_, p_, r, s, [&](MoveId m, cost_t old_value, cost_t new_value) {
            // The table write is the authoritative-key write (shared truth
            // storage), so raised keys are already fully deferred; only
            // lowered keys can need an eager reposition, reconciled in a
            // batch after the refresh.
            if (new_value < old_value) pending_.push_back({m, new_value});
          });
    });
    timed(phases_.queue_ops, [&] { bank_.update_deltas(pending_); });

    if (cost_ < best_cost_) {
      best_cost_ = cost_;
      best_p_ = p_;
    }
    trace_.push_back({iter_, choice.move, choice.delta, choice.rule, tenure, cost_});

    if (params_.debug_checks) {
      detail::check_cost_and_table(inst_, p_, cost_, table_, iter_);
      bank_.audit(table_, iter_, params_.aspiration);
    }
  }

  const SolverParams& params() const { return params_; }
  std::int64_t iteration() const { return iter_; }
  cost_t current_cost() const { return cost_; }
  cost_t best_cost() const { return best_cost_; }
  const Permutation& permutation() const { return p_; }
  const Permutation& best_permutation() const { return best_p_; }
  const std::vector<MoveRecord>& trace() const { return trace_; }
  const DeltaTable& table() const { return table_; }
  const QueueBank& bank() const { return bank_; }
  const PhaseTimes& phases() const { return phases_; }
  void reset_phases() { phases_ = {}; }
  std::uint64_t rng_draws() const { return rng_.draw_count(); }
  std::int64_t migrations() const { return migrations_; }

  RunResult snapshot() const {
    RunResult r;
    r.best_cost = best_cost_;
    r.last_cost = cost_;
    r.best = best_p_;
    r.last = p_;
    r.iterations = iter_;
    r.trace = trace_;
    r.phases = phases_;
    r.rng_draws = rng_.draw_count();
    r.queue_repairs = bank_.repair_count();
    r.migrations = migrations_;
    return r;
  }

 private:
  detail::Choice select() {
    const auto inel = bank_.peek_ineligible_delta();
    const auto auth = bank_.peek_authorized_delta();
    const auto asp = bank_.peek_aspired_delta();

    detail::Candidate global{-1, 0};
    auto consider = [&](const std::optional<LazyIndexedQueue::Entry>& e) {
      if (e && (global.move < 0 || detail::candidate_less(e->key, e->handle, global.delta, global.move)))
        global = {e->handle, e->key};
    };
    consider(inel);
    consider(auth);
    consider(asp);

    std::optional<detail::Candidate> aspired, authorized;
    if (asp) aspired = detail::Candidate{asp->handle, asp->key};
    if (auth) authorized = detail::Candidate{auth->handle, auth->key};
    return detail::choose_move(global, aspired, authorized, cost_, best_cost_, [&] {
      const auto fb = bank_.peek_fallback();
      if (!fb) throw QueueError("fallback requested with no ineligible moves");
      return detail::Candidate{fb->handle, table_.at(fb->handle)};
    });
  }

  template <class F>
  void timed(double& acc, F&& f) {
    if (!params_.instrument) {
      f();
      return;
    }
    const auto a = std::chrono::steady_clock::now();
    f();
    acc += std::chrono::duration<double>(std::chrono::steady_clock::now() - a).count();
  }

  const QapInstance& inst_;
  SolverParams params_;
  SplitMix64 rng_;
  Permutation p_, best_p_;
  DeltaTable table_;
  QueueBank bank_;
  std::vector<DeltaChange> pending_;
  cost_t cost_ = 0, best_cost_ = 0;
  std::int64_t iter_ = 0;
  std::int64_t migrations_ = 0;
  std::vector<MoveRecord> trace_;
  PhaseTimes phases_;
};

template <class Engine>
RunResult run_engine(Engine& eng, std::int64_t iterations) {
  const auto t0 = std::chrono::steady_clock::now();
  for (std::int64_t i = 0; i < iterations; ++i) eng.step();
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  RunResult r = eng.snapshot();
  r.wall_seconds = wall;
  return r;
}

inline RunResult solve_dense(const QapInstance& inst, const SolverParams& params) {
  DenseEngine eng(inst, params);
  return run_engine(eng, eng.params().iterations);
}

inline RunResult solve_sparse(const QapInstance& inst, const SolverParams& params) {
  SparseEngine eng(inst, params);
  return run_engine(eng, eng.params().iterations);
}

// Runs both engines in lockstep and reports the first observable
// divergence, or nullopt when the runs are identical.
inline std::optional<std::string> verify_equivalence(const QapInstance& inst,
                                                     const SolverParams& raw) {
  const SolverParams params = resolve_params(raw, inst.n);
  DenseEngine dense(inst, params);
  SparseEngine sparse(inst, params);
  if (!(dense.permutation() == sparse.permutation()))
    return "initial permutations differ";
  for (std::int64_t i = 0; i < params.iterations; ++i) {
    dense.step();
    sparse.step();
    if (dense.trace().back() != sparse.trace().back())
      return "divergent step: dense {" + to_string(dense.trace().back()) + "} sparse {" +
             to_string(sparse.trace().back()) + "}";
    if (dense.rng_draws() != sparse.rng_draws())
      return "iter " + std::to_string(i + 1) + ": rng draw counts differ (dense " +
             std::to_string(dense.rng_draws()) + ", sparse " + std::to_string(sparse.rng_draws()) +
             ")";
    if (!(dense.permutation() == sparse.permutation()))
      return "iter " + std::to_string(i + 1) + ": permutations differ";
  }
  if (dense.best_cost() != sparse.best_cost())
    return "best costs differ: dense " + std::to_string(dense.best_cost()) + ", sparse " +
           std::to_string(sparse.best_cost());
  if (!(dense.best_permutation() == sparse.best_permutation()))
    return "best permutations differ";
  return std::nullopt;
}

}  // namespace sqap
