#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "sqap/errors.hpp"
#include "sqap/instance.hpp"
#include "sqap/solver.hpp"

namespace sqap {

struct BenchPoint {
  int n;
  int k;
  std::string engine;
  std::uint64_t seed;
  std::int64_t iterations;
  double sec_per_iter;
  double pq_fraction;
};

inline const char* csv_header() { return "n,k,engine,seed,iterations,sec_per_iter,pq_fraction"; }

inline void write_csv(std::ostream& out, const std::vector<BenchPoint>& points) {
  out << csv_header() << '\n';
  out << std::setprecision(12);
  for (const BenchPoint& p : points)
    out << p.n << ',' << p.k << ',' << p.engine << ',' << p.seed << ',' << p.iterations << ','
        << p.sec_per_iter << ',' << p.pq_fraction << '\n';
}

inline double median(std::vector<double> v) {
  if (v.empty()) throw InvalidConfigError("median of empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct LinearFit {
  double intercept;
  double slope;

  double at(double x) const { return intercept + slope * x; }
};

inline LinearFit least_squares_fit(const std::vector<std::pair<double, double>>& pts) {
  if (pts.size() < 2) throw InvalidConfigError("least squares fit needs at least two points");
  double mx = 0, my = 0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxx = 0, sxy = 0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx == 0) throw InvalidConfigError("least squares fit needs distinct x values");
  const double slope = sxy / sxx;
  return {my - slope * mx, slope};
}

// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<std::pair<double, double>>& pts) {
  std::vector<std::pair<double, double>> logged;
  logged.reserve(pts.size());
  for (const auto& [x, y] : pts) {
    if (x <= 0 || y <= 0) throw InvalidConfigError("log-log fit needs positive values");
    logged.emplace_back(std::log(x), std::log(y));
  }
  return least_squares_fit(logged).slope;
}

struct Measurement {
  double sec_per_iter;
  double pq_fraction;
};

// Times an engine over the tail of a run: the first tenth of the
// iterations is executed but not counted, absorbing one-time effects (the
// first migration releases every move at once). pq is the fraction of the
// timed wall spent on queue maintenance.
template <class Engine>
Measurement measure_steps(Engine& eng, std::int64_t iterations, bool want_pq) {
  if (eng.params().debug_checks)
    throw InvalidConfigError("refusing to benchmark with debug checks enabled");
  if (want_pq && !eng.params().instrument)
    throw InvalidConfigError("queue share measurement requires instrumentation");
  const std::int64_t warmup = iterations / 10;
  if (iterations - warmup < 1) throw InvalidConfigError("too few iterations to measure");
  for (std::int64_t i = 0; i < warmup; ++i) eng.step();
  eng.reset_phases();
  const auto t0 = std::chrono::steady_clock::now();
  for (std::int64_t i = warmup; i < iterations; ++i) eng.step();
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double per_iter = wall / static_cast<double>(iterations - warmup);
  const double pq = (want_pq && wall > 0) ? eng.phases().queue_ops / wall : 0.0;
  return {per_iter, pq};
}

using PointCallback = std::function<void(const BenchPoint&)>;

struct ScalingOptions {
  std::vector<int> sizes = {250, 500, 1000, 2000};
  int k = 3;
  std::int64_t iterations = 10000;
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  std::uint64_t instance_seed = 42;
};

struct ScalingReport {
  std::vector<BenchPoint> points;
  std::vector<int> sizes;
  std::vector<double> dense_median;
  std::vector<double> sparse_median;
  double dense_slope = 0;
  double sparse_slope = 0;
  double ratio_slope = 0;
};

inline ScalingReport bench_scaling(const ScalingOptions& opts, const PointCallback& on_point = {}) {
  if (opts.sizes.size() < 3)
    throw InvalidConfigError("scaling needs at least three sizes for a slope fit");
  for (std::size_t i = 1; i < opts.sizes.size(); ++i)
    if (opts.sizes[i] <= opts.sizes[i - 1])
      throw InvalidConfigError("scaling sizes must be strictly ascending");
  if (opts.seeds.empty()) throw InvalidConfigError("scaling needs at least one seed");
  ScalingReport rep;
  rep.sizes = opts.sizes;
  for (int n : opts.sizes) {
    const QapInstance inst = generate_instance({n, opts.k, opts.instance_seed});
    std::vector<double> dense_times, sparse_times;
    for (std::uint64_t seed : opts.seeds) {
      SolverParams params;
      params.iterations = opts.iterations;
      params.seed = seed;
      params.instrument = true;
      {
        DenseEngine eng(inst, params);
        const Measurement m = measure_steps(eng, opts.iterations, true);
        dense_times.push_back(m.sec_per_iter);
        rep.points.push_back({n, opts.k, "dense", seed, opts.iterations, m.sec_per_iter, m.pq_fraction});
        if (on_point) on_point(rep.points.back());
      }
      {
        SparseEngine eng(inst, params);
        const Measurement m = measure_steps(eng, opts.iterations, true);
        sparse_times.push_back(m.sec_per_iter);
        rep.points.push_back({n, opts.k, "sparse", seed, opts.iterations, m.sec_per_iter, m.pq_fraction});
        if (on_point) on_point(rep.points.back());
      }
    }
    rep.dense_median.push_back(median(dense_times));
    rep.sparse_median.push_back(median(sparse_times));
  }
  std::vector<std::pair<double, double>> dpts, spts;
  for (std::size_t i = 0; i < rep.sizes.size(); ++i) {
    dpts.emplace_back(rep.sizes[i], rep.dense_median[i]);
    spts.emplace_back(rep.sizes[i], rep.sparse_median[i]);
  }
  rep.dense_slope = loglog_slope(dpts);
  rep.sparse_slope = loglog_slope(spts);
  rep.ratio_slope = rep.dense_slope - rep.sparse_slope;
  return rep;
}

struct DegreeOptions {
  int n = 400;
  std::vector<int> degrees = {3, 6, 9, 12};
  std::int64_t iterations = 10000;
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  std::uint64_t instance_seed = 42;
};

struct DegreeReport {
  std::vector<BenchPoint> points;
  std::vector<int> degrees;
  std::vector<double> medians;
  LinearFit fit{0, 0};
  double max_rel_dev = 0;
};

// Sparse per-iteration time as a function of degree, with an affine fit
// over the per-degree medians and the worst relative deviation from it.
inline DegreeReport bench_degree(const DegreeOptions& opts, const PointCallback& on_point = {}) {
  if (opts.degrees.size() < 2) throw InvalidConfigError("degree sweep needs at least two degrees");
  if (opts.seeds.empty()) throw InvalidConfigError("degree sweep needs at least one seed");
  DegreeReport rep;
  rep.degrees = opts.degrees;
  for (int k : opts.degrees) {
    const QapInstance inst = generate_instance({opts.n, k, opts.instance_seed});
    std::vector<double> times;
    for (std::uint64_t seed : opts.seeds) {
      SolverParams params;
      params.iterations = opts.iterations;
      params.seed = seed;
      params.instrument = true;
      SparseEngine eng(inst, params);
      const Measurement m = measure_steps(eng, opts.iterations, true);
      times.push_back(m.sec_per_iter);
      rep.points.push_back({opts.n, k, "sparse", seed, opts.iterations, m.sec_per_iter, m.pq_fraction});
      if (on_point) on_point(rep.points.back());
    }
    rep.medians.push_back(median(times));
  }
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < rep.degrees.size(); ++i)
    pts.emplace_back(rep.degrees[i], rep.medians[i]);
  rep.fit = least_squares_fit(pts);
  for (std::size_t i = 0; i < rep.degrees.size(); ++i) {
    const double predicted = rep.fit.at(rep.degrees[i]);
    if (predicted <= 0) throw InvalidConfigError("degree fit predicts nonpositive time");
    rep.max_rel_dev = std::max(rep.max_rel_dev, std::abs(rep.medians[i] - predicted) / predicted);
  }
  return rep;
}

struct PqShareOptions {
  int n = 2500;
  int k = 3;
  std::int64_t iterations = 10000;
  std::uint64_t seed = 1;
  std::uint64_t instance_seed = 42;
};

struct PqShareReport {
  BenchPoint point{};
};

inline PqShareReport bench_pq_share(const PqShareOptions& opts, const PointCallback& on_point = {}) {
  const QapInstance inst = generate_instance({opts.n, opts.k, opts.instance_seed});
  SolverParams params;
  params.iterations = opts.iterations;
  params.seed = opts.seed;
  params.instrument = true;
  SparseEngine eng(inst, params);
  const Measurement m = measure_steps(eng, opts.iterations, true);
  PqShareReport rep;
  rep.point = {opts.n, opts.k, "sparse", opts.seed, opts.iterations, m.sec_per_iter, m.pq_fraction};
  if (on_point) on_point(rep.point);
  return rep;
}

}  // namespace sqap
