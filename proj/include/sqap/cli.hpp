#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sqap/bench.hpp"
#include "sqap/errors.hpp"
#include "sqap/instance.hpp"
#include "sqap/report.hpp"
#include "sqap/solver.hpp"

namespace sqap {

namespace detail {

inline QapInstance load_instance(const std::string& path, bool dist_first) {
  std::ifstream in(path);
  if (!in) throw MalformedFileError("cannot open " + path);
  return parse_qaplib(in, dist_first ? MatrixOrder::dist_first : MatrixOrder::flow_first);
}

struct SolveFlags {
  std::int64_t iterations = 1000;
  std::uint64_t seed = 0;
  std::int64_t tenure_min = -1;
  std::int64_t tenure_max = -1;
  std::int64_t aspiration = -1;
  std::string init = "random";
  bool debug_checks = false;
  bool instrument = false;
};

inline void add_solver_flags(CLI::App* sub, SolveFlags& f) {
  sub->add_option("--iterations", f.iterations, "tabu search iterations");
  sub->add_option("--seed", f.seed, "rng seed");
  sub->add_option("--tenure-min", f.tenure_min, "min tabu tenure (default 0.9 n)");
  sub->add_option("--tenure-max", f.tenure_max, "max tabu tenure (default 1.1 n)");
  sub->add_option("--aspiration", f.aspiration, "iterations before an idle move aspires (default 5 n^2)");
  sub->add_option("--init", f.init, "initial permutation")
      ->check(CLI::IsMember({"random", "identity"}));
  sub->add_flag("--debug-checks", f.debug_checks, "revalidate all state every iteration");
  sub->add_flag("--instrument", f.instrument, "collect per-phase timings");
}

inline SolverParams to_params(const SolveFlags& f) {
  SolverParams p;
  p.iterations = f.iterations;
  p.seed = f.seed;
  p.tenure_min = f.tenure_min;
  p.tenure_max = f.tenure_max;
  p.aspiration = f.aspiration;
  p.init = f.init == "identity" ? InitKind::identity : InitKind::random;
  p.debug_checks = f.debug_checks;
  p.instrument = f.instrument;
  return p;
}

inline void emit_csv(const std::vector<BenchPoint>& points, const std::string& path) {
  if (path.empty()) {
    write_csv(std::cout, points);
    return;
  }
  std::ofstream out(path);
  if (!out) throw MalformedFileError("cannot write " + path);
  write_csv(out, points);
}

inline PointCallback progress() {
  return [](const BenchPoint& p) {
    std::cerr << "measured n=" << p.n << " k=" << p.k << " engine=" << p.engine
              << " seed=" << p.seed << " sec/iter=" << p.sec_per_iter
              << " pq=" << p.pq_fraction << '\n';
  };
}

}  // namespace detail

inline int cli_main(int argc, const char* const* argv) {
  CLI::App app{"tabu-search solver for sparse quadratic assignment instances"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "write a grid-distance k-regular-flow instance");
  GeneratorConfig gen_cfg;
  std::string gen_out;
  gen->add_option("--n", gen_cfg.n, "facilities")->required();
  gen->add_option("--k", gen_cfg.k, "flow degree")->required();
  gen->add_option("--seed", gen_cfg.seed, "generator seed");
  gen->add_option("--scale", gen_cfg.distance_scale, "distance rounding scale");
  gen->add_option("--out", gen_out, "output path (default stdout)");

  auto* val = app.add_subcommand("validate", "check instance invariants");
  std::string val_in;
  bool val_dist_first = false;
  val->add_option("--in", val_in, "instance path")->required();
  val->add_flag("--dist-first", val_dist_first, "matrices are distance first");

  auto* solve = app.add_subcommand("solve", "run one engine on an instance");
  std::string solve_in, solve_engine = "sparse", solve_report, solve_trace;
  bool solve_dist_first = false;
  detail::SolveFlags solve_flags;
  solve->add_option("--in", solve_in, "instance path")->required();
  solve->add_option("--engine", solve_engine, "engine")
      ->check(CLI::IsMember({"dense", "sparse"}));
  solve->add_option("--report", solve_report, "write JSON report here (default stdout)");
  solve->add_option("--trace", solve_trace, "write per-iteration trace CSV here");
  solve->add_flag("--dist-first", solve_dist_first, "matrices are distance first");
  detail::add_solver_flags(solve, solve_flags);

  auto* verify = app.add_subcommand("verify", "run both engines and compare step by step");
  std::string verify_in;
  bool verify_dist_first = false;
  detail::SolveFlags verify_flags;
  verify->add_option("--in", verify_in, "instance path")->required();
  verify->add_flag("--dist-first", verify_dist_first, "matrices are distance first");
  detail::add_solver_flags(verify, verify_flags);

  auto* bench = app.add_subcommand("bench", "timing measurements");
  bench->require_subcommand(1);

  auto* scal = bench->add_subcommand("scaling", "sec/iter of both engines across sizes");
  ScalingOptions scal_opts;
  std::string scal_csv;
  bool scal_quick = false;
  scal->add_option("--sizes", scal_opts.sizes, "instance sizes")->delimiter(',');
  scal->add_option("--k", scal_opts.k, "flow degree");
  scal->add_option("--iterations", scal_opts.iterations, "iterations per run");
  scal->add_option("--seeds", scal_opts.seeds, "solver seeds")->delimiter(',');
  scal->add_option("--instance-seed", scal_opts.instance_seed, "generator seed");
  scal->add_flag("--quick", scal_quick, "single seed");
  scal->add_option("--csv", scal_csv, "write rows here (default stdout)");

  auto* deg = bench->add_subcommand("degree", "sparse sec/iter across flow degrees");
  DegreeOptions deg_opts;
  std::string deg_csv;
  bool deg_quick = false;
  deg->add_option("--n", deg_opts.n, "instance size");
  deg->add_option("--degrees", deg_opts.degrees, "flow degrees")->delimiter(',');
  deg->add_option("--iterations", deg_opts.iterations, "iterations per run");
  deg->add_option("--seeds", deg_opts.seeds, "solver seeds")->delimiter(',');
  deg->add_option("--instance-seed", deg_opts.instance_seed, "generator seed");
  deg->add_flag("--quick", deg_quick, "single seed");
  deg->add_option("--csv", deg_csv, "write rows here (default stdout)");

  auto* pq = bench->add_subcommand("pq-share", "fraction of sparse time spent on queues");
  PqShareOptions pq_opts;
  std::string pq_csv;
  pq->add_option("--n", pq_opts.n, "instance size");
  pq->add_option("--k", pq_opts.k, "flow degree");
  pq->add_option("--iterations", pq_opts.iterations, "iterations");
  pq->add_option("--seed", pq_opts.seed, "solver seed");
  pq->add_option("--instance-seed", pq_opts.instance_seed, "generator seed");
  pq->add_option("--csv", pq_csv, "write the row here (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(gen)) {
      const QapInstance inst = generate_instance(gen_cfg);
      if (gen_out.empty()) {
        write_qaplib(inst, std::cout);
      } else {
        std::ofstream out(gen_out);
        if (!out) throw MalformedFileError("cannot write " + gen_out);
        write_qaplib(inst, out);
        std::cout << inst.name << " -> " << gen_out << '\n';
      }
      return 0;
    }

    if (app.got_subcommand(val)) {
      const QapInstance inst = detail::load_instance(val_in, val_dist_first);
      const auto violations = validate(inst);
      if (violations.empty()) {
        std::cout << "ok: n=" << inst.n << " sparsity=" << sparsity(inst) << '\n';
        return 0;
      }
      for (const Violation& v : violations) std::cerr << v.invariant << ": " << v.message << '\n';
      return 1;
    }

    if (app.got_subcommand(solve)) {
      const QapInstance inst = detail::load_instance(solve_in, solve_dist_first);
      const SolverParams params = resolve_params(detail::to_params(solve_flags), inst.n);
      const RunResult result =
          solve_engine == "dense" ? solve_dense(inst, params) : solve_sparse(inst, params);
      std::optional<std::string> trace_path;
      if (!solve_trace.empty()) {
        std::ofstream out(solve_trace);
        if (!out) throw MalformedFileError("cannot write " + solve_trace);
        write_trace(out, result.trace);
        trace_path = solve_trace;
      }
      const nlohmann::json j = run_report(inst, solve_engine, params, result, trace_path);
      if (solve_report.empty()) {
        std::cout << j.dump(2) << '\n';
      } else {
        std::ofstream out(solve_report);
        if (!out) throw MalformedFileError("cannot write " + solve_report);
        out << j.dump(2) << '\n';
        std::cout << "best " << result.best_cost << " after " << result.iterations
                  << " iterations (" << result.wall_seconds << "s) -> " << solve_report << '\n';
      }
      return 0;
    }

    if (app.got_subcommand(verify)) {
      const QapInstance inst = detail::load_instance(verify_in, verify_dist_first);
      const SolverParams params = detail::to_params(verify_flags);
      if (const auto divergence = verify_equivalence(inst, params)) {
        std::cerr << "engines diverged: " << *divergence << '\n';
        return 1;
      }
      std::cout << "equivalent over " << verify_flags.iterations << " iterations\n";
      return 0;
    }

    if (bench->got_subcommand(scal)) {
      if (scal_quick) scal_opts.seeds = {scal_opts.seeds.front()};
      const ScalingReport rep = bench_scaling(scal_opts, detail::progress());
      detail::emit_csv(rep.points, scal_csv);
      std::cerr << "dense slope " << rep.dense_slope << ", sparse slope " << rep.sparse_slope
                << ", ratio slope " << rep.ratio_slope << '\n';
      return 0;
    }

    if (bench->got_subcommand(deg)) {
      if (deg_quick) deg_opts.seeds = {deg_opts.seeds.front()};
      const DegreeReport rep = bench_degree(deg_opts, detail::progress());
      detail::emit_csv(rep.points, deg_csv);
      std::cerr << "fit " << rep.fit.intercept << " + " << rep.fit.slope
                << "*k, max relative deviation " << rep.max_rel_dev << '\n';
      return 0;
    }

    if (bench->got_subcommand(pq)) {
      const PqShareReport rep = bench_pq_share(pq_opts, detail::progress());
      detail::emit_csv({rep.point}, pq_csv);
      std::cerr << "queue share " << rep.point.pq_fraction << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace sqap
