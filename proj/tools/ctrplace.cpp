// ctrplace: controller placement and reaction-time experiments.

#include <iostream>

#include <CLI11.hpp>

#include "ctrplace/commands.hpp"

using namespace ctrplace;

namespace {

struct Flags {
  std::string algo = "exa";
  std::string model = "sdo";
  std::string leader = "sweep";
  std::string majority = "paper";
  std::string trace;
  std::string placement;
  std::vector<std::size_t> nsw_range;
  NodeId sw = -1;
  NodeId src = -1;
  NodeId dst = -1;
};

void add_topology_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--topology", cfg.topology, "GraphML or JSON topology")->required();
  cmd->add_option("--speed-kmms", cfg.speed_km_per_ms, "Signal speed in km/ms");
}

void add_common_flags(CLI::App* cmd, RunConfig& cfg, Flags& f) {
  cmd->add_option("--majority-rule", f.majority, "paper|raft");
  cmd->add_option("--out", cfg.out_dir, "Output directory");
}

void resolve(RunConfig& cfg, const Flags& f) {
  cfg.algorithm = parse_algorithm(f.algo);
  cfg.model = parse_model(f.model);
  try {
    cfg.majority = parse_majority_rule(f.majority);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (f.leader != "sweep") {
    try {
      std::size_t used = 0;
      cfg.leader = std::stoi(f.leader, &used);
      if (used != f.leader.size()) throw std::invalid_argument(f.leader);
    } catch (const std::exception&) {
      throw UsageError("--leader expects a controller index or 'sweep'");
    }
  }
  if (!f.trace.empty()) cfg.trace = f.trace;
  if (!f.placement.empty()) cfg.placement = f.placement;
  if (!f.nsw_range.empty()) {
    if (f.nsw_range.size() > 2) throw UsageError("--n-sw takes one or two values");
    cfg.nsw_from = f.nsw_range.front();
    cfg.nsw_to = f.nsw_range.back();
  }
  if (f.sw >= 0) cfg.sw = f.sw;
  if (f.src >= 0) cfg.src = f.src;
  if (f.dst >= 0) cfg.dst = f.dst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Controller placement and reaction-time experiments"};
  app.require_subcommand(1);

  RunConfig cfg;
  Flags f;

  auto* frontier = app.add_subcommand("frontier", "Pareto frontier of Sw-Ctr vs Ctr-Ctr delay");
  add_topology_flags(frontier, cfg);
  add_common_flags(frontier, cfg, f);
  frontier->add_option("--controllers", cfg.controllers, "Number of controllers");
  frontier->add_option("--algo", f.algo, "exa|rnd|evo");
  frontier->add_option("--iterations", cfg.iterations, "Iterations for rnd/evo");
  frontier->add_option("--seed", cfg.seed, "PRNG seed");
  frontier->add_flag("--scatter", cfg.scatter, "Also write every enumerated placement (exa)");

  auto* errors = app.add_subcommand("errors", "Heuristic frontier errors against exa");
  add_topology_flags(errors, cfg);
  add_common_flags(errors, cfg, f);
  errors->add_option("--controllers", cfg.controllers, "Number of controllers");
  errors->add_option("--iterations", cfg.iterations, "One or more i_max values")->expected(1, -1);
  errors->add_option("--seed", cfg.seed, "First seed");
  errors->add_option("--seeds", cfg.seeds, "Number of seeds");

  auto* react = app.add_subcommand("react", "Average reaction times per placement and owner");
  add_topology_flags(react, cfg);
  add_common_flags(react, cfg, f);
  react->add_option("--controllers", cfg.controllers, "Number of controllers");
  react->add_option("--placement", f.placement, "Single placement, e.g. 1;5;7");
  react->add_option("--leader", f.leader, "Owner index or 'sweep'");
  react->add_option("--model", f.model, "mdo|sdo");

  auto* scenario = app.add_subcommand("scenario", "Flow setup time of the testbed layouts");
  add_common_flags(scenario, cfg, f);
  scenario->add_option("--name", cfg.scenarios, "TT|TMC|TMF|TPC|TPF|all")->expected(1, -1);
  scenario->add_option("--n-sw", f.nsw_range, "Switch count or FROM TO range")->expected(1, 2);
  scenario->add_option("--tc-ms", cfg.t_c_ms, "Controller processing time per update");
  scenario->add_option("--trace", f.trace, "Write message traces as JSON lines");

  auto* simulate = app.add_subcommand("simulate", "Replay one update or one l2 flow");
  add_topology_flags(simulate, cfg);
  add_common_flags(simulate, cfg, f);
  simulate->add_option("--placement", f.placement, "Controller nodes, e.g. 1;5;7")->required();
  simulate->add_option("--leader", f.leader, "Owner index");
  simulate->add_option("--model", f.model, "mdo|sdo");
  simulate->add_option("--switch", f.sw, "Switch issuing a single update");
  simulate->add_option("--src", f.src, "Source switch of an l2 flow");
  simulate->add_option("--dst", f.dst, "Destination switch of an l2 flow");
  simulate->add_option("--tc-ms", cfg.t_c_ms, "Controller processing time per update");
  simulate->add_option("--trace", f.trace, "Write the message trace as JSON lines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    resolve(cfg, f);
    cfg.cap = enumeration_cap_from_env(cfg.cap);
    if (*frontier) cmd_frontier(cfg, std::cout);
    if (*errors) cmd_errors(cfg, std::cout);
    if (*react) cmd_react(cfg, std::cout);
    if (*scenario) cmd_scenario(cfg, std::cout);
    if (*simulate) cmd_simulate(cfg, std::cout);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const EnumerationCapExceeded& e) {
    std::cerr << "cap exceeded: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
