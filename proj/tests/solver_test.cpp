#include "sqap/solver.hpp"

#include <gtest/gtest.h>

#include <set>

#include "oracles.hpp"
#include "support.hpp"

namespace {

using sqap::DenseEngine;
using sqap::InitKind;
using sqap::QapInstance;
using sqap::Rule;
using sqap::SolverParams;
using sqap::SparseEngine;

TEST(Params, DefaultsFollowInstanceSize) {
  const SolverParams p = sqap::resolve_params({}, 100);
  EXPECT_EQ(p.tenure_min, 90);
  EXPECT_EQ(p.tenure_max, 110);
  EXPECT_EQ(p.aspiration, 50000);
  const SolverParams q = sqap::resolve_params({}, 7);
  EXPECT_EQ(q.tenure_min, 6);   // floor(6.3)
  EXPECT_EQ(q.tenure_max, 8);   // ceil(7.7)
  EXPECT_EQ(q.aspiration, 245);
}

TEST(Params, ValidationRejectsBadCombinations) {
  SolverParams p;
  p.tenure_min = 0;
  EXPECT_THROW(sqap::resolve_params(p, 10), sqap::InvalidConfigError);
  p.tenure_min = 5;
  p.tenure_max = 4;
  EXPECT_THROW(sqap::resolve_params(p, 10), sqap::InvalidConfigError);
  p.tenure_max = 6;
  p.aspiration = 6;
  EXPECT_THROW(sqap::resolve_params(p, 10), sqap::InvalidConfigError);
  p.aspiration = 7;
  EXPECT_NO_THROW(sqap::resolve_params(p, 10));
  SolverParams it;
  it.iterations = -1;
  EXPECT_THROW(sqap::resolve_params(it, 10), sqap::InvalidConfigError);
  EXPECT_THROW(sqap::resolve_params({}, 1), sqap::InvalidConfigError);
}

TEST(Engines, AgreeStepByStep) {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const QapInstance inst = sqap::generate_instance({20, 3, 5});
    SolverParams params;
    params.iterations = 500;
    params.seed = seed;
    EXPECT_EQ(sqap::verify_equivalence(inst, params), std::nullopt) << "seed " << seed;
  }
}

TEST(Engines, DebugChecksStayQuiet) {
  const QapInstance inst = sqap::generate_instance({16, 3, 9});
  SolverParams params;
  params.iterations = 300;
  params.seed = 4;
  params.debug_checks = true;
  EXPECT_NO_THROW(sqap::solve_dense(inst, params));
  EXPECT_NO_THROW(sqap::solve_sparse(inst, params));
}

TEST(Engines, CostBookkeepingMatchesOracle) {
  const QapInstance inst = sqap::generate_instance({12, 3, 2});
  SolverParams params;
  params.iterations = 200;
  params.seed = 7;
  const auto result = sqap::solve_sparse(inst, params);
  EXPECT_EQ(result.last_cost, oracle::cost(inst, result.last.to_location));
  EXPECT_EQ(result.best_cost, oracle::cost(inst, result.best.to_location));
  EXPECT_LE(result.best_cost, result.last_cost);
  EXPECT_EQ(result.iterations, 200);
  EXPECT_EQ(result.trace.size(), 200u);
  // cost_after chains: each record's cost is the previous plus its delta.
  sqap::cost_t expect = result.trace.front().cost_after - result.trace.front().delta;
  for (const auto& rec : result.trace) {
    expect += rec.delta;
    EXPECT_EQ(rec.cost_after, expect);
  }
}

TEST(Engines, IdentityInitSkipsShuffleDraws) {
  const QapInstance inst = sqap::generate_instance({10, 3, 3});
  SolverParams params;
  params.iterations = 50;
  params.init = InitKind::identity;
  const auto dense = sqap::solve_dense(inst, params);
  const auto sparse = sqap::solve_sparse(inst, params);
  // One tenure draw per iteration and nothing else.
  EXPECT_EQ(dense.rng_draws, 50u);
  EXPECT_EQ(sparse.rng_draws, 50u);
  EXPECT_EQ(dense.trace, sparse.trace);
}

TEST(Engines, RandomInitDrawCount) {
  const QapInstance inst = sqap::generate_instance({10, 3, 3});
  SolverParams params;
  params.iterations = 50;
  const auto result = sqap::solve_sparse(inst, params);
  EXPECT_EQ(result.rng_draws, 50u + 9u);  // n-1 shuffle draws, one tenure per step
}

TEST(Engines, TenureStaysInBounds) {
  const QapInstance inst = sqap::generate_instance({14, 3, 6});
  SolverParams params;
  params.iterations = 400;
  params.tenure_min = 3;
  params.tenure_max = 9;
  params.aspiration = 50;
  const auto result = sqap::solve_dense(inst, params);
  for (const auto& rec : result.trace) {
    EXPECT_GE(rec.tenure, 3);
    EXPECT_LE(rec.tenure, 9);
  }
}

TEST(Engines, ExecutedMoveIsTabuForItsTenure) {
  const QapInstance inst = sqap::generate_instance({12, 3, 8});
  SolverParams params;
  params.iterations = 300;
  params.seed = 11;
  const auto result = sqap::solve_sparse(inst, params);
  // A move executed at iteration t with tenure d cannot be re-executed
  // until iteration t + d + 1, except by the global-improvement rule.
  std::vector<std::int64_t> eligible(static_cast<std::size_t>(sqap::move_count(inst.n)), 0);
  for (const auto& rec : result.trace) {
    if (rec.rule != Rule::global_improving)
      EXPECT_GT(rec.iteration, eligible[static_cast<std::size_t>(rec.move)])
          << "tabu move executed at iteration " << rec.iteration;
    eligible[static_cast<std::size_t>(rec.move)] = rec.iteration + rec.tenure;
  }
}

TEST(Engines, AspiredRuleFires) {
  // Tiny aspiration bound: idle moves aspire quickly and rule 2 must show up.
  const QapInstance inst = sqap::generate_instance({10, 3, 13});
  SolverParams params;
  params.iterations = 500;
  params.seed = 5;
  params.tenure_min = 2;
  params.tenure_max = 3;
  params.aspiration = 4;
  const auto dense = sqap::solve_dense(inst, params);
  std::set<Rule> rules;
  for (const auto& rec : dense.trace) rules.insert(rec.rule);
  EXPECT_TRUE(rules.count(Rule::aspired));
  // And the engines still agree under these parameters.
  EXPECT_EQ(sqap::verify_equivalence(inst, params), std::nullopt);
}

TEST(Engines, FallbackRuleFires) {
  // Only 6 moves and very long tenures: the move pool drains and the
  // fallback must pick the ineligible move closest to release.
  const QapInstance inst = sqap::generate_instance({4, 3, 1});
  SolverParams params;
  params.iterations = 40;
  params.seed = 2;
  params.tenure_min = 30;
  params.tenure_max = 30;
  params.aspiration = 31;
  const auto dense = sqap::solve_dense(inst, params);
  std::set<Rule> rules;
  for (const auto& rec : dense.trace) rules.insert(rec.rule);
  EXPECT_TRUE(rules.count(Rule::fallback));
  EXPECT_EQ(sqap::verify_equivalence(inst, params), std::nullopt);
}

TEST(Engines, GlobalImprovingOverridesTabu) {
  // With the whole pool tabu, any strictly improving global move must still
  // be taken by rule 1 rather than the fallback.
  const QapInstance inst = sqap::generate_instance({8, 3, 21});
  SolverParams params;
  params.iterations = 200;
  params.seed = 3;
  params.tenure_min = 50;
  params.tenure_max = 60;
  params.aspiration = 100;
  const auto result = sqap::solve_dense(inst, params);
  bool saw_global = false;
  sqap::cost_t best = result.trace.front().cost_after - result.trace.front().delta;
  for (const auto& rec : result.trace) {
    if (rec.rule == Rule::global_improving) {
      saw_global = true;
      EXPECT_LT(rec.cost_after, best);  // rule 1 must strictly beat the best so far
    }
    best = std::min(best, rec.cost_after);
  }
  EXPECT_TRUE(saw_global);
  EXPECT_EQ(sqap::verify_equivalence(inst, params), std::nullopt);
}

TEST(Engines, BestTracksMinimumOfTrace) {
  const QapInstance inst = sqap::generate_instance({15, 4, 17});
  SolverParams params;
  params.iterations = 300;
  params.seed = 19;
  const auto result = sqap::solve_dense(inst, params);
  sqap::cost_t min_seen = result.trace.front().cost_after - result.trace.front().delta;
  for (const auto& rec : result.trace) min_seen = std::min(min_seen, rec.cost_after);
  EXPECT_EQ(result.best_cost, min_seen);
}

TEST(Engines, InstrumentationAccumulatesPhases) {
  const QapInstance inst = sqap::generate_instance({20, 3, 23});
  SolverParams params;
  params.iterations = 200;
  params.instrument = true;
  const auto sparse = sqap::solve_sparse(inst, params);
  EXPECT_GT(sparse.phases.selection, 0.0);
  EXPECT_GT(sparse.phases.delta_update, 0.0);
  EXPECT_GT(sparse.phases.queue_ops, 0.0);
  EXPECT_LE(sparse.phases.total(), sparse.wall_seconds * 1.5);
  const auto dense = sqap::solve_dense(inst, params);
  EXPECT_GT(dense.phases.selection, 0.0);
  EXPECT_EQ(dense.phases.queue_ops, 0.0);
}

TEST(Engines, NoInstrumentationMeansZeroPhases) {
  const QapInstance inst = sqap::generate_instance({12, 3, 29});
  SolverParams params;
  params.iterations = 100;
  const auto result = sqap::solve_sparse(inst, params);
  EXPECT_EQ(result.phases.total(), 0.0);
}

}  // namespace
