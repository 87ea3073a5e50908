#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "json.hpp"
#include "sqap/instance.hpp"
#include "sqap/solver.hpp"

namespace sqap {

inline const char* to_string(InitKind k) {
  return k == InitKind::random ? "random" : "identity";
}

inline nlohmann::json run_report(const QapInstance& inst, const std::string& engine,
                                 const SolverParams& resolved, const RunResult& result,
                                 const std::optional<std::string>& trace_path = std::nullopt) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["instance"] = {{"name", inst.name}, {"n", inst.n}, {"sparsity", sparsity(inst)}};
  j["engine"] = engine;
  j["params"] = {{"iterations", resolved.iterations},
                 {"seed", resolved.seed},
                 {"tenure_min", resolved.tenure_min},
                 {"tenure_max", resolved.tenure_max},
                 {"aspiration", resolved.aspiration},
                 {"init", to_string(resolved.init)},
                 {"debug_checks", resolved.debug_checks},
                 {"instrument", resolved.instrument}};
  j["best_cost"] = result.best_cost;
  j["best_permutation"] = result.best.to_location;
  j["iterations"] = result.iterations;
  j["wall_seconds"] = result.wall_seconds;
  j["phase_seconds"] = {{"selection", result.phases.selection},
                        {"delta_update", result.phases.delta_update},
                        {"queue_ops", result.phases.queue_ops}};
  if (trace_path) j["trace_path"] = *trace_path;
  return j;
}

inline void write_trace(std::ostream& out, const std::vector<MoveRecord>& trace) {
  out << "iteration,move,u,v,delta,rule,tenure,cost_after\n";
  for (const MoveRecord& r : trace) {
    const auto [u, v] = move_pair(r.move);
    out << r.iteration << ',' << r.move << ',' << u << ',' << v << ',' << r.delta << ','
        << to_string(r.rule) << ',' << r.tenure << ',' << r.cost_after << '\n';
  }
}

}  // namespace sqap
