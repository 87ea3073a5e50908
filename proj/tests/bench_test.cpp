#include "sqap/bench.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

namespace {

TEST(Fits, SlopeRecoversExactPowerLaw) {
  // y = 3 * x^1.7 measured without noise must fit to slope 1.7.
  std::vector<std::pair<double, double>> pts;
  for (double x : {10.0, 20.0, 40.0, 80.0}) pts.emplace_back(x, 3.0 * std::pow(x, 1.7));
  EXPECT_NEAR(sqap::loglog_slope(pts), 1.7, 1e-12);
}

TEST(Fits, SlopeOfConstantIsZero) {
  std::vector<std::pair<double, double>> pts{{1, 5}, {2, 5}, {4, 5}, {8, 5}};
  EXPECT_NEAR(sqap::loglog_slope(pts), 0.0, 1e-12);
}

TEST(Fits, QuadraticOverLinearGivesRatioSlopeOne) {
  // Times proportional to n^2 for one engine and n for the other must give
  // ratio slope exactly 1.
  std::vector<std::pair<double, double>> dense, sparse;
  for (double n : {250.0, 500.0, 1000.0, 2000.0}) {
    dense.emplace_back(n, 3e-9 * n * n);
    sparse.emplace_back(n, 4e-7 * n);
  }
  const double ratio = sqap::loglog_slope(dense) - sqap::loglog_slope(sparse);
  EXPECT_NEAR(ratio, 1.0, 1e-12);
}

TEST(Fits, LinearFitRecoversLine) {
  std::vector<std::pair<double, double>> pts;
  for (double x : {3.0, 6.0, 9.0, 12.0}) pts.emplace_back(x, 2.5 + 0.75 * x);
  const auto fit = sqap::least_squares_fit(pts);
  EXPECT_NEAR(fit.intercept, 2.5, 1e-12);
  EXPECT_NEAR(fit.slope, 0.75, 1e-12);
  EXPECT_NEAR(fit.at(20.0), 17.5, 1e-12);
}

TEST(Fits, RejectDegenerateInputs) {
  EXPECT_THROW(sqap::least_squares_fit({{1, 1}}), sqap::InvalidConfigError);
  EXPECT_THROW(sqap::least_squares_fit({{1, 1}, {1, 2}}), sqap::InvalidConfigError);
  EXPECT_THROW(sqap::loglog_slope({{0, 1}, {2, 3}}), sqap::InvalidConfigError);
  EXPECT_THROW(sqap::loglog_slope({{1, -1}, {2, 3}}), sqap::InvalidConfigError);
}

TEST(Fits, MedianOddAndEven) {
  EXPECT_DOUBLE_EQ(sqap::median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_DOUBLE_EQ(sqap::median({4.0, 1.0, 2.0, 3.0}), 2.5);
  EXPECT_DOUBLE_EQ(sqap::median({7.0}), 7.0);
  EXPECT_THROW(sqap::median({}), sqap::InvalidConfigError);
}

TEST(Csv, HeaderAndRows) {
  std::ostringstream out;
  sqap::write_csv(out, {{100, 3, "dense", 1, 500, 0.25, 0.0},
                        {100, 3, "sparse", 1, 500, 0.005, 0.125}});
  const std::string got = out.str();
  EXPECT_EQ(got.substr(0, got.find('\n')), "n,k,engine,seed,iterations,sec_per_iter,pq_fraction");
  EXPECT_NE(got.find("100,3,dense,1,500,0.25,0"), std::string::npos);
  EXPECT_NE(got.find("100,3,sparse,1,500,0.005,0.125"), std::string::npos);
}

TEST(Measure, RefusesDebugChecks) {
  const auto inst = sqap::generate_instance({10, 3, 1});
  sqap::SolverParams params;
  params.debug_checks = true;
  sqap::SparseEngine eng(inst, params);
  EXPECT_THROW(sqap::measure_steps(eng, 100, false), sqap::InvalidConfigError);
}

TEST(Measure, QueueShareNeedsInstrumentation) {
  const auto inst = sqap::generate_instance({10, 3, 1});
  sqap::SolverParams params;
  sqap::SparseEngine eng(inst, params);
  EXPECT_THROW(sqap::measure_steps(eng, 100, true), sqap::InvalidConfigError);
  sqap::SparseEngine eng2(inst, params);
  EXPECT_NO_THROW(sqap::measure_steps(eng2, 100, false));
}

TEST(Measure, RunsTailAndReportsPositiveTime) {
  const auto inst = sqap::generate_instance({16, 3, 2});
  sqap::SolverParams params;
  params.instrument = true;
  sqap::SparseEngine eng(inst, params);
  const auto m = sqap::measure_steps(eng, 400, true);
  EXPECT_EQ(eng.iteration(), 400);
  EXPECT_GT(m.sec_per_iter, 0.0);
  EXPECT_GE(m.pq_fraction, 0.0);
  EXPECT_LT(m.pq_fraction, 1.0);
}

TEST(Bench, ScalingSmoke) {
  sqap::ScalingOptions opts;
  opts.sizes = {12, 16, 24};
  opts.k = 3;
  opts.iterations = 300;
  opts.seeds = {1};
  int called = 0;
  const auto rep = sqap::bench_scaling(opts, [&](const sqap::BenchPoint&) { ++called; });
  EXPECT_EQ(rep.points.size(), 6u);  // 3 sizes x 2 engines x 1 seed
  EXPECT_EQ(called, 6);
  EXPECT_EQ(rep.dense_median.size(), 3u);
  for (double t : rep.dense_median) EXPECT_GT(t, 0.0);
  for (double t : rep.sparse_median) EXPECT_GT(t, 0.0);
  EXPECT_NEAR(rep.ratio_slope, rep.dense_slope - rep.sparse_slope, 1e-12);
}

TEST(Bench, ScalingRejectsTooFewOrUnsortedSizes) {
  sqap::ScalingOptions opts;
  opts.iterations = 100;
  opts.seeds = {1};
  opts.sizes = {100};
  EXPECT_THROW(sqap::bench_scaling(opts), sqap::InvalidConfigError);
  opts.sizes = {100, 200};
  EXPECT_THROW(sqap::bench_scaling(opts), sqap::InvalidConfigError);
  opts.sizes = {100, 200, 150};
  EXPECT_THROW(sqap::bench_scaling(opts), sqap::InvalidConfigError);
}

TEST(Bench, DegreeRepeatabilityAcrossSeeds) {
  // Same configuration measured with two different seeds: per-degree medians
  // agree within a 20% noise budget. Wall timing on a shared machine sees
  // occasional interference spikes, so a miss re-measures (up to three
  // attempts); systematic seed dependence would fail every attempt.
  sqap::DegreeOptions a;
  a.n = 100;
  a.degrees = {3, 6};
  a.iterations = 20000;
  a.seeds = {1};
  auto b = a;
  b.seeds = {2};
  double worst = 0;
  for (int attempt = 0; attempt < 3; ++attempt) {
    const auto ra = sqap::bench_degree(a);
    const auto rb = sqap::bench_degree(b);
    worst = 0;
    for (std::size_t i = 0; i < ra.medians.size(); ++i) {
      const double lo = std::min(ra.medians[i], rb.medians[i]);
      const double hi = std::max(ra.medians[i], rb.medians[i]);
      worst = std::max(worst, hi / lo);
    }
    if (worst <= 1.20) break;
  }
  EXPECT_LE(worst, 1.20);
}

TEST(Bench, PqShareFractionInRangeAtModerateSize) {
  sqap::PqShareOptions opts;
  opts.n = 100;
  opts.k = 3;
  opts.iterations = 2000;
  const auto rep = sqap::bench_pq_share(opts);
  EXPECT_GE(rep.point.pq_fraction, 0.0);
  EXPECT_LE(rep.point.pq_fraction, 1.0);
}

TEST(Bench, DegreeSmoke) {
  sqap::DegreeOptions opts;
  opts.n = 16;
  opts.degrees = {3, 5};
  opts.iterations = 300;
  opts.seeds = {1, 2, 3};
  const auto rep = sqap::bench_degree(opts);
  EXPECT_EQ(rep.points.size(), 6u);
  EXPECT_EQ(rep.medians.size(), 2u);
  EXPECT_GE(rep.max_rel_dev, 0.0);
}

TEST(Bench, PqShareSmoke) {
  sqap::PqShareOptions opts;
  opts.n = 24;
  opts.k = 3;
  opts.iterations = 300;
  const auto rep = sqap::bench_pq_share(opts);
  EXPECT_EQ(rep.point.engine, "sparse");
  EXPECT_GT(rep.point.sec_per_iter, 0.0);
  EXPECT_GT(rep.point.pq_fraction, 0.0);
  EXPECT_LT(rep.point.pq_fraction, 1.0);
}

}  // namespace
