#pragma once

#include <ostream>
#include <span>
#include <string>

#include <json.hpp>

#include "pardg/solver.hpp"
#include "pardg/types.hpp"
#include "pardg/verify.hpp"

namespace pardg {

/// Per-iteration trace rows; counters are the cumulative totals at the end of
/// each iteration.
inline void write_trace_csv(std::ostream& os, const RunTrace& trace) {
  os << "t,phi,stopping_value,eta,s_size,f_x,f_y,value_queries,"
        "gradient_queries,adaptive_rounds\n";
  for (const IterationRecord& rec : trace.iterations) {
    os << rec.t << ',' << format_double(rec.phi) << ','
       << format_double(rec.stopping_value) << ',' << format_double(rec.eta)
       << ',' << rec.s_size << ',' << format_double(rec.f_x) << ','
       << format_double(rec.f_y) << ',' << rec.stats.value_queries << ','
       << rec.stats.gradient_queries << ',' << rec.stats.adaptive_rounds
       << '\n';
  }
}

inline nlohmann::json report_to_json(const CheckReport& rep) {
  return nlohmann::json{{"name", rep.name},
                        {"passed", rep.passed},
                        {"worst_violation", rep.worst_violation},
                        {"samples", rep.samples},
                        {"details", rep.details}};
}

/// One JSON object per line.
inline void write_reports_jsonl(std::ostream& os,
                                std::span<const CheckReport> reports) {
  for (const CheckReport& rep : reports) {
    os << report_to_json(rep).dump() << '\n';
  }
}

inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,f_x,f_y,f_p,residual,max_gap\n";
  for (std::size_t s = 0; s < traj.samples.size(); ++s) {
    const TrajectorySample& cur = traj.samples[s];
    const double residual =
        s == 0 ? 0.0
               : discrete_invariant_residual(traj.samples[s - 1], cur,
                                             traj.alpha);
    double max_gap = 0.0;
    for (std::size_t i = 0; i < cur.x.size(); ++i) {
      max_gap = std::max(max_gap, cur.y[i] - cur.x[i]);
    }
    os << format_double(cur.t) << ',' << format_double(cur.f_x) << ','
       << format_double(cur.f_y) << ',' << format_double(cur.f_p) << ','
       << format_double(residual) << ',' << format_double(max_gap) << '\n';
  }
}

}  // namespace pardg
