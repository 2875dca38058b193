#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pardg/baselines.hpp"
#include "pardg/generator.hpp"
#include "pardg/io.hpp"
#include "pardg/solver.hpp"
#include "pardg/verify.hpp"

namespace pardg {

inline constexpr const char* kResultsSchema = "# pardg-results v1";

enum class InstanceFamily { DirectedCut, UndirectedCut, QuadraticDr };

inline std::string to_string(InstanceFamily f) {
  switch (f) {
    case InstanceFamily::DirectedCut: return "directed_cut";
    case InstanceFamily::UndirectedCut: return "undirected_cut";
    case InstanceFamily::QuadraticDr: return "quadratic_dr";
  }
  return "?";
}

inline InstanceFamily family_from_string(const std::string& s) {
  if (s == "directed_cut") return InstanceFamily::DirectedCut;
  if (s == "undirected_cut") return InstanceFamily::UndirectedCut;
  if (s == "quadratic_dr") return InstanceFamily::QuadraticDr;
  throw std::invalid_argument("unknown instance family: " + s);
}

struct ExperimentConfig {
  InstanceFamily family = InstanceFamily::DirectedCut;
  std::uint32_t n = 12;
  std::uint32_t num_instances = 1;
  double edge_probability = 0.5;  // A-mask density for quadratics
  double weight_max = 1.0;
  bool unit_weights = false;
  std::uint64_t seed = 0;
  std::vector<double> epsilons = {0.1};
  std::vector<std::string> algorithms = {"pardg"};
  int line_search_depth = 4;
  int grid_resolution = 10;  // opt lower bound for quadratics (n <= 6)
  bool timing = false;       // wall_time column reads 0 unless enabled
};

inline void validate_experiment_config(const ExperimentConfig& c) {
  require(c.n >= 1, "config: n must be >= 1");
  require(c.num_instances >= 1, "config: num_instances must be >= 1");
  require(c.edge_probability >= 0.0 && c.edge_probability <= 1.0,
          "config: edge_probability must be in [0, 1]");
  require(!c.epsilons.empty(), "config: epsilon list must be non-empty");
  require(!c.algorithms.empty(), "config: algorithm list must be non-empty");
  for (double e : c.epsilons) {
    require(e > 0.0 && e <= 0.25, "config: epsilon must lie in (0, 0.25]");
  }
  for (const std::string& a : c.algorithms) {
    require(a == "pardg" || a == "seqdg" || a == "seqdg_rand" ||
                a == "random_half",
            "config: unknown algorithm " + a);
  }
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  if (j.contains("family")) c.family = family_from_string(j.at("family"));
  if (j.contains("n")) c.n = j.at("n");
  if (j.contains("num_instances")) c.num_instances = j.at("num_instances");
  if (j.contains("edge_probability")) c.edge_probability = j.at("edge_probability");
  if (j.contains("weight_max")) c.weight_max = j.at("weight_max");
  if (j.contains("unit_weights")) c.unit_weights = j.at("unit_weights");
  if (j.contains("seed")) c.seed = j.at("seed");
  if (j.contains("epsilons")) c.epsilons = j.at("epsilons").get<std::vector<double>>();
  if (j.contains("algorithms"))
    c.algorithms = j.at("algorithms").get<std::vector<std::string>>();
  if (j.contains("line_search_depth")) c.line_search_depth = j.at("line_search_depth");
  if (j.contains("grid_resolution")) c.grid_resolution = j.at("grid_resolution");
  if (j.contains("timing")) c.timing = j.at("timing");
  validate_experiment_config(c);
  return c;
}

struct ResultRow {
  std::uint32_t instance = 0;
  std::string algorithm;
  double epsilon = 0.0;
  double value = 0.0;
  double opt = std::numeric_limits<double>::quiet_NaN();
  double ratio = std::numeric_limits<double>::quiet_NaN();
  std::string opt_kind = "none";  // exact | lower-bound | none
  std::size_t iterations = 0;
  OracleStats stats;
  double wall_time = 0.0;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<CheckReport> reports;                    // only with verify
  std::vector<std::pair<std::string, RunTrace>> traces;  // name -> pardg trace
};

namespace detail {

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag,
                                 std::uint64_t index) {
  return mix64(mix64(seed ^ mix64(fnv1a(tag))) + index);
}

struct OptInfo {
  double value = std::numeric_limits<double>::quiet_NaN();
  std::string kind = "none";
  Point point;  // maximizer / best grid point when known
};

inline std::vector<std::uint8_t> membership(std::size_t n, const IndexSet& s) {
  std::vector<std::uint8_t> in(n, 0);
  for (std::uint32_t v : s) in[v] = 1;
  return in;
}

template <DrOracle F, typename SetValueFn>
ExperimentResult run_family(const ExperimentConfig& config,
                            const std::vector<F>& instances,
                            SetValueFn&& set_value_of,
                            const std::vector<OptInfo>& opts, bool verify) {
  ExperimentResult result;
  for (std::uint32_t idx = 0; idx < instances.size(); ++idx) {
    const F& inst = instances[idx];
    const std::size_t n = inst.dimension();
    const OptInfo& opt = opts[idx];

    if (verify) {
      auto tag = [&](CheckReport rep) {
        std::ostringstream os;
        os << rep.name << "/instance_" << idx;
        rep.name = os.str();
        result.reports.push_back(std::move(rep));
      };
      tag(check_dr(inst, n, 100, config.seed));
      tag(check_gradient_fd(inst, 100, config.seed));
      tag(check_concavity_bounds(inst, 100, config.seed));
      if (!opt.point.empty()) {
        tag(check_x_or_opt(inst, opt.point, 100, config.seed));
      }
    }

    for (const std::string& algo : config.algorithms) {
      for (double eps : config.epsilons) {
        ResultRow row;
        row.instance = idx;
        row.algorithm = algo;
        row.epsilon = eps;
        const auto start = std::chrono::steady_clock::now();
        if (algo == "pardg") {
          RunTrace trace;
          if (opt.kind == "exact") {
            BatchOracle<F> oracle(inst);
            SolverConfig sc;
            sc.epsilon = eps;
            sc.m = opt.value;
            sc.line_search_depth = config.line_search_depth;
            trace = parallel_double_greedy(oracle, sc);
          } else {
            GuessResult guess =
                guess_m_and_solve(inst, eps, config.line_search_depth);
            // keep the trace of the best guess for reporting
            std::size_t best = 0;
            for (std::size_t g = 1; g < guess.traces.size(); ++g) {
              if (guess.traces[g].solution_value >
                  guess.traces[best].solution_value) {
                best = g;
              }
            }
            trace = std::move(guess.traces[best]);
          }
          row.value = trace.solution_value;
          row.iterations = trace.iterations.size();
          row.stats = trace.stats;
          if (verify) {
            if (!opt.point.empty()) {
              auto rep = check_disc_invariant(trace, inst, opt.point, eps);
              std::ostringstream os;
              os << rep.name << "/instance_" << idx << "/eps_"
                 << format_double(eps);
              rep.name = os.str();
              result.reports.push_back(std::move(rep));
            }
            auto decay = check_potential_decay(trace, eps);
            auto budget = check_round_budget(trace.stats, eps,
                                             trace.iterations.size(),
                                             config.line_search_depth);
            for (CheckReport* rep : {&decay, &budget}) {
              std::ostringstream os;
              os << rep->name << "/instance_" << idx << "/eps_"
                 << format_double(eps);
              rep->name = os.str();
              result.reports.push_back(std::move(*rep));
            }
            std::ostringstream os;
            os << "trace_instance_" << idx << "_eps_" << format_double(eps);
            result.traces.emplace_back(os.str(), std::move(trace));
          }
        } else if (algo == "seqdg" || algo == "seqdg_rand") {
          SetBatchOracle oracle(set_value_of(idx));
          const IndexSet s = sequential_double_greedy(
              oracle, n, algo == "seqdg_rand",
              derive_seed(config.seed, "seqdg_rand", idx));
          const std::vector<std::uint8_t> reqs[1] = {membership(n, s)};
          row.value = oracle.batch(reqs)[0];
          row.iterations = n;
          row.stats = oracle.stats();
        } else {  // random_half: picks its set without any queries
          const IndexSet s =
              random_half(n, derive_seed(config.seed, "random_half", idx));
          SetBatchOracle oracle(set_value_of(idx));
          const std::vector<std::uint8_t> reqs[1] = {membership(n, s)};
          row.value = oracle.batch(reqs)[0];
          row.iterations = 1;
          row.stats = oracle.stats();
        }
        if (config.timing) {
          row.wall_time =
              std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                            start)
                  .count();
        }
        if (opt.kind != "none") {
          row.opt = opt.value;
          row.opt_kind = opt.kind;
          row.ratio = row.value / opt.value;
        }
        result.rows.push_back(std::move(row));
      }
    }
  }
  return result;
}

}  // namespace detail

/// Runs every (instance, algorithm, epsilon) combination of the config in
/// that order. OPT comes from brute force for cut families (n <= 22) and from
/// a grid lower bound for quadratics (n <= 6). With verify set, the property
/// checkers run per instance and per solver trace.
inline ExperimentResult run_experiment(const ExperimentConfig& config,
                                       bool verify = false) {
  validate_experiment_config(config);
  if (config.family == InstanceFamily::QuadraticDr) {
    std::vector<QuadraticDrInstance> instances;
    std::vector<detail::OptInfo> opts;
    for (std::uint32_t i = 0; i < config.num_instances; ++i) {
      QuadraticGenParams params{config.n, config.edge_probability};
      instances.push_back(
          generate_quadratic_instance(params, config.seed, i));
    }
    for (const auto& inst : instances) {
      detail::OptInfo info;
      if (config.n <= 6) {
        auto [pt, v] = grid_search_opt(inst, static_cast<int>(config.n),
                                       config.grid_resolution);
        info = {v, "lower-bound", pt};
      }
      opts.push_back(std::move(info));
    }
    auto set_value_of = [&](std::uint32_t idx) {
      const QuadraticDrInstance& inst = instances[idx];
      return [&inst](const std::vector<std::uint8_t>& in) {
        Point x(in.size(), 0.0);
        for (std::size_t i = 0; i < in.size(); ++i) x[i] = in[i] ? 1.0 : 0.0;
        return inst.value(x);
      };
    };
    return detail::run_family(config, instances, set_value_of, opts, verify);
  }

  CutGenParams params{config.n, config.edge_probability, config.weight_max,
                      config.family == InstanceFamily::DirectedCut,
                      config.unit_weights};
  std::vector<CutInstance> instances;
  std::vector<detail::OptInfo> opts;
  for (std::uint32_t i = 0; i < config.num_instances; ++i) {
    instances.push_back({generate_cut_instance(params, config.seed, i)});
  }
  for (const auto& inst : instances) {
    detail::OptInfo info;
    if (config.n <= 22) {
      auto bf = brute_force_opt(
          [&](std::uint64_t mask) { return set_eval_cut(inst.graph, mask); },
          static_cast<int>(config.n));
      info = {bf.opt_value, "exact", indicator_point(config.n, bf.best_mask)};
    }
    opts.push_back(std::move(info));
  }
  auto set_value_of = [&](std::uint32_t idx) {
    const CutInstance& inst = instances[idx];
    return [&inst](const std::vector<std::uint8_t>& in) {
      return set_eval_cut_fn(inst.graph,
                             [&in](std::uint32_t v) { return in[v] != 0; });
    };
  };
  return detail::run_family(config, instances, set_value_of, opts, verify);
}

inline void write_results_csv(std::ostream& os,
                              std::span<const ResultRow> rows) {
  os << kResultsSchema << '\n';
  os << "instance,algorithm,epsilon,value,opt,ratio,opt_kind,iterations,"
        "adaptive_rounds,value_queries,gradient_queries,wall_time\n";
  for (const ResultRow& r : rows) {
    os << r.instance << ',' << r.algorithm << ',' << format_double(r.epsilon)
       << ',' << format_double(r.value) << ','
       << (r.opt_kind == "none" ? std::string{} : format_double(r.opt)) << ','
       << (r.opt_kind == "none" ? std::string{} : format_double(r.ratio))
       << ',' << r.opt_kind << ',' << r.iterations << ','
       << r.stats.adaptive_rounds << ',' << r.stats.value_queries << ','
       << r.stats.gradient_queries << ',' << format_double(r.wall_time)
       << '\n';
  }
}

struct SummaryRow {
  std::string algorithm;
  double epsilon = 0.0;
  std::size_t count = 0;
  double min_ratio = std::numeric_limits<double>::quiet_NaN();
  double mean_ratio = std::numeric_limits<double>::quiet_NaN();
  double mean_iterations = 0.0;
  double mean_adaptive_rounds = 0.0;
};

/// Per-(algorithm, epsilon) aggregates; ratio statistics cover only rows with
/// a known opt.
inline std::vector<SummaryRow> emit_summary(std::span<const ResultRow> rows) {
  require(!rows.empty(), "emit_summary: no rows");
  std::map<std::pair<std::string, double>, std::vector<const ResultRow*>> by_key;
  for (const ResultRow& r : rows) {
    by_key[{r.algorithm, r.epsilon}].push_back(&r);
  }
  std::vector<SummaryRow> out;
  for (const auto& [key, group] : by_key) {
    SummaryRow s;
    s.algorithm = key.first;
    s.epsilon = key.second;
    s.count = group.size();
    double ratio_sum = 0.0;
    std::size_t ratio_count = 0;
    double iter_sum = 0.0;
    double round_sum = 0.0;
    double min_ratio = std::numeric_limits<double>::infinity();
    for (const ResultRow* r : group) {
      iter_sum += static_cast<double>(r->iterations);
      round_sum += static_cast<double>(r->stats.adaptive_rounds);
      if (r->opt_kind != "none") {
        ratio_sum += r->ratio;
        min_ratio = std::min(min_ratio, r->ratio);
        ++ratio_count;
      }
    }
    if (ratio_count > 0) {
      s.min_ratio = min_ratio;
      s.mean_ratio = ratio_sum / static_cast<double>(ratio_count);
    }
    s.mean_iterations = iter_sum / static_cast<double>(group.size());
    s.mean_adaptive_rounds = round_sum / static_cast<double>(group.size());
    out.push_back(std::move(s));
  }
  return out;
}

inline void write_summary_text(std::ostream& os,
                               std::span<const SummaryRow> summary) {
  os << "algorithm epsilon count min_ratio mean_ratio mean_iterations "
        "mean_adaptive_rounds\n";
  for (const SummaryRow& s : summary) {
    os << s.algorithm << ' ' << format_double(s.epsilon) << ' ' << s.count
       << ' ' << format_double(s.min_ratio) << ' '
       << format_double(s.mean_ratio) << ' '
       << format_double(s.mean_iterations) << ' '
       << format_double(s.mean_adaptive_rounds) << '\n';
  }
}

inline nlohmann::json summary_to_json(std::span<const SummaryRow> summary) {
  nlohmann::json arr = nlohmann::json::array();
  for (const SummaryRow& s : summary) {
    arr.push_back({{"algorithm", s.algorithm},
                   {"epsilon", s.epsilon},
                   {"count", s.count},
                   {"min_ratio", s.min_ratio},
                   {"mean_ratio", s.mean_ratio},
                   {"mean_iterations", s.mean_iterations},
                   {"mean_adaptive_rounds", s.mean_adaptive_rounds}});
  }
  return arr;
}

/// Parses a results CSV produced by write_results_csv.
inline std::vector<ResultRow> read_results_csv(std::istream& is) {
  std::string line;
  std::vector<ResultRow> rows;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {  // column header
      header_seen = true;
      continue;
    }
    std::istringstream ls(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    require(fields.size() == 12, "results csv: malformed row");
    ResultRow r;
    r.instance = static_cast<std::uint32_t>(std::stoul(fields[0]));
    r.algorithm = fields[1];
    r.epsilon = std::stod(fields[2]);
    r.value = std::stod(fields[3]);
    r.opt_kind = fields[6];
    if (r.opt_kind != "none") {
      r.opt = std::stod(fields[4]);
      r.ratio = std::stod(fields[5]);
    }
    r.iterations = std::stoul(fields[7]);
    r.stats.adaptive_rounds = std::stoull(fields[8]);
    r.stats.value_queries = std::stoull(fields[9]);
    r.stats.gradient_queries = std::stoull(fields[10]);
    r.wall_time = std::stod(fields[11]);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace pardg
