#include "ctrplace/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "ctrplace/protocol_sim.hpp"
#include "json.hpp"

namespace ctrplace {

Algorithm parse_algorithm(const std::string& text) {
  if (text == "exa") return Algorithm::kExa;
  if (text == "rnd") return Algorithm::kRnd;
  if (text == "evo") return Algorithm::kEvo;
  throw UsageError("unknown algorithm '" + text + "' (expected exa, rnd or evo)");
}

Model parse_model(const std::string& text) {
  if (text == "mdo") return Model::kMdo;
  if (text == "sdo") return Model::kSdo;
  throw UsageError("unknown model '" + text + "' (expected mdo or sdo)");
}

std::uint64_t enumeration_cap_from_env(std::uint64_t fallback) {
  const char* raw = std::getenv("CTRPLACE_CAP");
  if (raw == nullptr || *raw == '\0') return fallback;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(raw, &end, 10);
  if (*end != '\0' || raw[0] == '-') {
    throw UsageError(std::string("CTRPLACE_CAP is not a non-negative integer: ") + raw);
  }
  return v;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

namespace {

struct Loaded {
  Topology topology;
  DelayMatrix delays;
};

Loaded load(const RunConfig& cfg) {
  if (cfg.topology.empty()) throw UsageError("--topology is required");
  if (!(cfg.speed_km_per_ms > 0.0) || !std::isfinite(cfg.speed_km_per_ms)) {
    throw UsageError("--speed-kmms must be a positive number");
  }
  Topology t = load_topology(cfg.topology, LoadOptions{cfg.speed_km_per_ms});
  DelayMatrix d = all_pairs_delays(t);
  return {std::move(t), std::move(d)};
}

void check_controllers(const RunConfig& cfg, std::size_t n) {
  if (cfg.controllers < 1 || cfg.controllers > n) {
    throw UsageError(fmt::format("--controllers must lie in [1, {}] for this topology", n));
  }
}

void check_t_c(const RunConfig& cfg) {
  if (!(cfg.t_c_ms >= 0.0) || !std::isfinite(cfg.t_c_ms)) {
    throw UsageError("--tc-ms must be a non-negative number");
  }
}

std::string frontier_csv(const ParetoSet& set) {
  std::string out = std::string(kDelayPointCsvHeader) + "\n";
  for (const auto& p : set.sorted()) out += to_csv_row(p) + "\n";
  return out;
}

nlohmann::ordered_json ratio_json(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

// Lexicographic C-subsets of 0..n-1.
template <class F>
void for_each_combination(std::size_t n, std::size_t c, F&& f) {
  std::vector<NodeId> combo(c);
  std::iota(combo.begin(), combo.end(), 0);
  while (true) {
    f(combo);
    std::size_t k = c;
    while (k > 0 && combo[k - 1] == static_cast<NodeId>(n - c + k - 1)) --k;
    if (k == 0) return;
    ++combo[k - 1];
    for (std::size_t j = k; j < c; ++j) combo[j] = combo[j - 1] + 1;
  }
}

}  // namespace

FrontierSummary cmd_frontier(const RunConfig& cfg, std::ostream& log) {
  const Loaded in = load(cfg);
  const std::size_t n = in.delays.size();
  check_controllers(cfg, n);

  FrontierSummary summary;
  ParetoSet frontier;
  std::string scatter;
  const char* algo = "exa";
  if (cfg.algorithm == Algorithm::kExa) {
    std::function<void(const DelayPoint&)> on_point;
    if (cfg.scatter) {
      scatter = std::string(kDelayPointCsvHeader) + "\n";
      on_point = [&](const DelayPoint& p) { scatter += to_csv_row(p) + "\n"; };
    }
    ExaPlaceResult r = exa_place(in.delays, cfg.controllers, cfg.cap, on_point);
    frontier = std::move(r.frontier);
    summary.evaluated = r.evaluated;
  } else {
    if (cfg.iterations.size() != 1) {
      throw UsageError("frontier takes exactly one --iterations value for rnd/evo");
    }
    if (cfg.iterations[0] < 1) throw UsageError("--iterations must be >= 1");
    if (cfg.scatter) throw UsageError("--scatter is only available with --algo exa");
    const SearchBudget budget{cfg.iterations[0], cfg.seed};
    if (cfg.algorithm == Algorithm::kRnd) {
      algo = "rnd";
      frontier = rnd_place(in.delays, cfg.controllers, budget);
    } else {
      algo = "evo";
      frontier = evo_place(in.delays, cfg.controllers, budget, in.topology);
    }
    summary.evaluated = budget.iterations;
  }

  summary.frontier_size = frontier.size();
  summary.gains = extreme_gains(frontier);
  summary.reduction_factor = ctr_ctr_reduction_factor(frontier);

  nlohmann::ordered_json gains;
  gains["topology"] = in.topology.name();
  gains["nodes"] = n;
  gains["controllers"] = cfg.controllers;
  gains["algo"] = algo;
  if (cfg.algorithm != Algorithm::kExa) {
    gains["iterations"] = cfg.iterations[0];
    gains["seed"] = cfg.seed;
  } else {
    gains["evaluated"] = summary.evaluated;
  }
  gains["frontier_size"] = summary.frontier_size;
  gains["sw_ratio"] = ratio_json(summary.gains.sw_ratio);
  gains["cc_ratio"] = ratio_json(summary.gains.cc_ratio);
  gains["gains_finite"] = summary.gains.finite;
  gains["ctr_ctr_reduction_factor"] = ratio_json(summary.reduction_factor);

  write_file_atomic(cfg.out_dir / "frontier.csv", frontier_csv(frontier));
  if (cfg.scatter) write_file_atomic(cfg.out_dir / "scatter.csv", scatter);
  write_file_atomic(cfg.out_dir / "gains.json", gains.dump(2) + "\n");

  log << fmt::format("{}: N={} C={} algo={} frontier_size={}\n", in.topology.name(), n,
                     cfg.controllers, algo, summary.frontier_size);
  log << fmt::format("extreme gains: sw_ratio={} cc_ratio={} reduction_factor={}\n",
                     summary.gains.sw_ratio, summary.gains.cc_ratio, summary.reduction_factor);
  return summary;
}

void cmd_errors(const RunConfig& cfg, std::ostream& log) {
  if (cfg.iterations.empty()) throw UsageError("--iterations needs at least one value");
  for (auto k : cfg.iterations) {
    if (k < 1) throw UsageError("--iterations values must be >= 1");
  }
  if (cfg.seeds < 1) throw UsageError("--seeds must be >= 1");
  const Loaded in = load(cfg);
  check_controllers(cfg, in.delays.size());

  const ExaPlaceResult exact = exa_place(in.delays, cfg.controllers, cfg.cap);
  log << fmt::format("{}: exact frontier of {} points from {} placements\n", in.topology.name(),
                     exact.frontier.size(), exact.evaluated);

  std::string agg = std::string(kErrorsCsvHeader) + "\n";
  std::string per_seed = std::string(kErrorsBySeedCsvHeader) + "\n";
  for (std::size_t i_max : cfg.iterations) {
    for (const Algorithm a : {Algorithm::kRnd, Algorithm::kEvo}) {
      const char* name = a == Algorithm::kRnd ? "rnd" : "evo";
      double sw_sum = 0.0;
      double cc_sum = 0.0;
      for (std::size_t k = 0; k < cfg.seeds; ++k) {
        const std::uint64_t seed = cfg.seed + k;
        const SearchBudget budget{i_max, seed};
        const ParetoSet approx = a == Algorithm::kRnd
                                     ? rnd_place(in.delays, cfg.controllers, budget)
                                     : evo_place(in.delays, cfg.controllers, budget, in.topology);
        const FrontierErrors e = frontier_errors(exact.frontier, approx);
        sw_sum += e.sw_err;
        cc_sum += e.cc_err;
        per_seed += fmt::format("{},{},{},{},{}\n", name, i_max, seed, e.sw_err, e.cc_err);
      }
      const double s = static_cast<double>(cfg.seeds);
      agg += fmt::format("{},{},{},{},{}\n", name, i_max, cfg.seeds, sw_sum / s, cc_sum / s);
      log << fmt::format("{} i_max={}: sw_err={} cc_err={}\n", name, i_max, sw_sum / s,
                         cc_sum / s);
    }
  }
  write_file_atomic(cfg.out_dir / "errors.csv", agg);
  write_file_atomic(cfg.out_dir / "errors_by_seed.csv", per_seed);
}

void cmd_react(const RunConfig& cfg, std::ostream& log) {
  const Loaded in = load(cfg);
  const std::size_t n = in.delays.size();

  std::vector<Placement> placements;
  if (cfg.placement) {
    try {
      placements.push_back(parse_placement(*cfg.placement, n));
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("--placement: ") + e.what());
    }
  } else {
    check_controllers(cfg, n);
    const std::uint64_t total = placement_count(n, cfg.controllers);
    if (total > cfg.cap) {
      throw EnumerationCapExceeded(fmt::format(
          "{} placements exceed the cap of {}; pass --placement instead", total, cfg.cap));
    }
    placements.reserve(total);
    for_each_combination(n, cfg.controllers,
                         [&](const std::vector<NodeId>& c) { placements.emplace_back(c, n); });
  }

  std::string out = std::string(kReactCsvHeader) + "\n";
  for (const auto& p : placements) {
    const auto c = static_cast<ControllerIndex>(p.size());
    if (cfg.leader && (*cfg.leader < 0 || *cfg.leader >= c)) {
      throw UsageError(fmt::format("--leader must lie in [0, {}]", c - 1));
    }
    const OwnerSweep sweep = owner_sweep(in.delays, p, cfg.majority);
    const double mdo = avg_mdo_reaction(in.delays, p);
    const double best = sweep.avg_reaction_ms[static_cast<std::size_t>(sweep.optimal)];
    ControllerIndex from = 0;
    ControllerIndex to = c;
    if (cfg.leader) {
      from = *cfg.leader;
      to = from + 1;
    }
    for (ControllerIndex l = from; l < to; ++l) {
      const double v = sweep.avg_reaction_ms[static_cast<std::size_t>(l)];
      out += fmt::format("{},{},{},{},{},{},{},{}\n", p.to_string(), l, p[l], v,
                         v <= best ? 1 : 0, mdo, sweep.min_reduction, sweep.max_reduction);
    }
  }
  write_file_atomic(cfg.out_dir / "react.csv", out);
  log << fmt::format("{}: {} placements written to react.csv\n", in.topology.name(),
                     placements.size());
}

void cmd_scenario(const RunConfig& cfg, std::ostream& log) {
  check_t_c(cfg);
  if (cfg.nsw_from < 3 || cfg.nsw_to > 36 || cfg.nsw_from > cfg.nsw_to) {
    throw UsageError("switch range must satisfy 3 <= from <= to <= 36");
  }
  std::vector<Scenario> which;
  for (const auto& name : cfg.scenarios) {
    if (name == "all") {
      which.assign(std::begin(kAllScenarios), std::end(kAllScenarios));
      break;
    }
    try {
      which.push_back(parse_scenario(name));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  if (which.empty()) throw UsageError("no scenario selected");

  std::ostringstream trace;
  std::string out = std::string(kScenarioCsvHeader) + "\n";
  for (const Scenario s : which) {
    for (std::size_t n_sw = cfg.nsw_from; n_sw <= cfg.nsw_to; ++n_sw) {
      const ScenarioSetup setup = build_scenario(s, n_sw, cfg.t_c_ms);
      const double predicted = arp_setup_time(setup.delays, setup.view, setup.flow, cfg.majority);
      const sim::SimResult r = sim::simulate_l2switch_flow(
          setup.network, setup.delays, setup.view, 0, static_cast<NodeId>(n_sw - 1), cfg.t_c_ms,
          cfg.majority, setup.flow.host_in_ms, setup.flow.host_out_ms);
      out += fmt::format("{},{},{},{}\n", scenario_name(s), n_sw, predicted, r.time_ms);
      if (cfg.trace) {
        sim::write_trace_jsonl(trace, r.trace, fmt::format("{}/{}", scenario_name(s), n_sw));
      }
    }
  }
  write_file_atomic(cfg.out_dir / "scenario.csv", out);
  if (cfg.trace) write_file_atomic(*cfg.trace, trace.str());
  log << fmt::format("{} rows written to scenario.csv\n",
                     which.size() * (cfg.nsw_to - cfg.nsw_from + 1));
}

void cmd_simulate(const RunConfig& cfg, std::ostream& log) {
  check_t_c(cfg);
  if (!cfg.placement) throw UsageError("--placement is required");
  const bool update = cfg.sw.has_value();
  const bool flow = cfg.src.has_value() || cfg.dst.has_value();
  if (update == flow || (flow && !(cfg.src && cfg.dst))) {
    throw UsageError("pass either --switch or both --src and --dst");
  }
  const Loaded in = load(cfg);
  const auto n = static_cast<NodeId>(in.delays.size());
  Placement p = [&] {
    try {
      return parse_placement(*cfg.placement, in.delays.size());
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("--placement: ") + e.what());
    }
  }();
  const ControllerIndex leader = cfg.leader.value_or(0);
  if (leader < 0 || leader >= static_cast<ControllerIndex>(p.size())) {
    throw UsageError(fmt::format("--leader must lie in [0, {}]", p.size() - 1));
  }
  const ClusterView view = ClusterView::with_nearest_masters(in.delays, std::move(p), leader);
  auto check_node = [&](NodeId v, const char* flag) {
    if (v < 0 || v >= n) throw UsageError(fmt::format("{} must lie in [0, {}]", flag, n - 1));
  };

  sim::SimResult r;
  double analytic = 0.0;
  if (update) {
    check_node(*cfg.sw, "--switch");
    if (cfg.model == Model::kSdo) {
      r = sim::simulate_sdo_update(in.delays, view, *cfg.sw, cfg.majority);
      analytic = sdo_reaction(in.delays, view, *cfg.sw, cfg.majority);
    } else {
      r = sim::simulate_mdo_update(in.delays, view, *cfg.sw);
      analytic = mdo_reaction(in.delays(*cfg.sw, view.master_node(*cfg.sw)));
    }
  } else {
    check_node(*cfg.src, "--src");
    check_node(*cfg.dst, "--dst");
    if (*cfg.src == *cfg.dst) throw UsageError("--src and --dst must differ");
    r = sim::simulate_l2switch_flow(in.topology, in.delays, view, *cfg.src, *cfg.dst, cfg.t_c_ms,
                                    cfg.majority);
    analytic = arp_setup_time(in.delays, view, flow_from_route(r.route, cfg.t_c_ms), cfg.majority);
  }
  if (cfg.trace) {
    std::ostringstream trace;
    sim::write_trace_jsonl(trace, r.trace);
    write_file_atomic(*cfg.trace, trace.str());
  }
  log << fmt::format("simulated_ms={} analytic_ms={} messages={}\n", r.time_ms, analytic,
                     r.trace.events.size());
}

}  // namespace ctrplace
