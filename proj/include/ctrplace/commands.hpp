#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctrplace/pareto.hpp"
#include "ctrplace/reaction.hpp"

namespace ctrplace {

/// Bad flags or flag combinations; the CLI exits with status 2.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Algorithm { kExa, kRnd, kEvo };
enum class Model { kMdo, kSdo };

Algorithm parse_algorithm(const std::string& text);
Model parse_model(const std::string& text);

struct RunConfig {
  std::filesystem::path topology;
  std::size_t controllers = 3;
  Algorithm algorithm = Algorithm::kExa;
  std::vector<std::size_t> iterations{50};
  std::uint64_t seed = 1;
  std::size_t seeds = 20;
  Model model = Model::kSdo;
  std::optional<ControllerIndex> leader;  // nullopt = sweep all owners
  double t_c_ms = kDefaultTcMs;
  double speed_km_per_ms = kDefaultSpeedKmPerMs;
  MajorityRule majority = MajorityRule::kPaper;
  bool scatter = false;
  std::optional<std::filesystem::path> trace;
  std::filesystem::path out_dir = ".";
  std::uint64_t cap = kDefaultEnumerationCap;

  // react / simulate
  std::optional<std::string> placement;
  // scenario
  std::vector<std::string> scenarios{"TT", "TMC", "TMF", "TPC", "TPF"};
  std::size_t nsw_from = 3;
  std::size_t nsw_to = 36;
  // simulate
  std::optional<NodeId> sw;
  std::optional<NodeId> src;
  std::optional<NodeId> dst;
};

/// Enumeration cap, honoring the CTRPLACE_CAP environment variable.
std::uint64_t enumeration_cap_from_env(std::uint64_t fallback = kDefaultEnumerationCap);

/// Writes `content` to a sibling temp file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

struct FrontierSummary {
  std::size_t frontier_size = 0;
  std::uint64_t evaluated = 0;  // placements evaluated (exa) or sampled iterations
  ExtremeGains gains;
  double reduction_factor = 1.0;
};

/// frontier.csv, gains.json and (exa + --scatter) scatter.csv.
FrontierSummary cmd_frontier(const RunConfig& cfg, std::ostream& log);

/// errors.csv (mean over seeds per algorithm and i_max) and
/// errors_by_seed.csv, against the exhaustive frontier.
void cmd_errors(const RunConfig& cfg, std::ostream& log);

/// react.csv: per-owner SDO average (avg_reaction_ms) and the MDO average
/// for each placement.
void cmd_react(const RunConfig& cfg, std::ostream& log);

/// scenario.csv: analytic and simulated flow setup time per scenario and n_sw.
void cmd_scenario(const RunConfig& cfg, std::ostream& log);

/// Simulates one update (--switch) or one l2 flow (--src/--dst) on a
/// topology and reports the simulated and analytic times.
void cmd_simulate(const RunConfig& cfg, std::ostream& log);

inline constexpr const char* kErrorsCsvHeader = "algo,i_max,seeds,sw_err_ms,cc_err_ms";
inline constexpr const char* kErrorsBySeedCsvHeader = "algo,i_max,seed,sw_err_ms,cc_err_ms";
inline constexpr const char* kReactCsvHeader =
    "placement,leader_index,leader_node,avg_reaction_ms,is_optimal,mdo_avg_ms,min_reduction,"
    "max_reduction";
inline constexpr const char* kScenarioCsvHeader = "scenario,n_sw,predicted_ms,simulated_ms";

}  // namespace ctrplace
