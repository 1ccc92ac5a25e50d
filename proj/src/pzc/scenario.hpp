#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pzc/metrics.hpp"
#include "pzc/partition.hpp"
#include "pzc/simulator.hpp"
#include "pzc/topology.hpp"

namespace pzc {

/// One experiment: topology source, zoning, timing, response strategy,
/// seeds and outputs. The n/k/sigma/strategy fields double as sweep axes;
/// a single run uses their only value.
struct Scenario {
  // Topology: a file when `topology_file` is set, the AMI generator otherwise
  // (regenerated per seed).
  std::optional<std::filesystem::path> topology_file;
  std::optional<std::filesystem::path> kinds_file;
  std::optional<std::filesystem::path> functions_file;
  std::vector<std::size_t> n{200};
  std::size_t concentrators = 1;
  std::size_t mesh_degree = 3;
  /// Function whose susceptible components are zoned and scored; empty picks
  /// the first function (by name) that has any.
  std::string function;

  std::vector<int> k{8};  // 0 = no zones, per-node response
  double epsilon = kDefaultEpsilon;
  int eta = kDefaultEta;

  std::optional<double> ct;
  std::vector<double> sigma;  // ct = sigma * dt; defaults to 3 when ct is unset
  double ht = 1.0;
  double dt = 1.0;
  double response_latency = 0.0;
  std::optional<double> quiescence;
  double horizon = kForever;
  double benign_period = 0.0;
  SpreadMode spread = SpreadMode::Sequential;
  std::vector<ResponseStrategy> strategy{ResponseStrategy::PartitionAware};
  bool recovery = true;
  RecoveryMode recovery_mode = RecoveryMode::PaperLiteral;
  std::optional<std::filesystem::path> rules_file;
  std::string attack_type = "pricing_manipulation";

  std::optional<ComponentId> origin;  // random susceptible member per seed when unset
  std::vector<std::uint64_t> seeds{1};

  PriceModel pricing;
  std::vector<int> dip_hours{20, 21, 22};
  double dip_factor = 0.15;
  std::optional<double> capacity;

  std::filesystem::path out = "out";
  bool write_traces = true;
  bool figures = true;
  std::size_t workers = 0;  // 0 = hardware concurrency

  /// Applies one "key = value" setting. Throws InvalidArgument on an unknown
  /// key or a malformed value.
  void set(std::string_view key, std::string_view value);
  /// Checks the single-run invariants (one value per axis, ct xor sigma...).
  void validate_point() const;
  double effective_ct() const;
};

/// Flat "key = value" lines, '#' comments, lists as "[a, b]" or "a, b",
/// seed ranges as "1..100".
Scenario parse_scenario(std::istream& in, std::string_view source = "<stream>");
Scenario load_scenario(const std::filesystem::path& path);

std::vector<std::uint64_t> parse_seed_list(std::string_view text);

/// Susceptible members of `function`, or of the first function (by name)
/// that has any when `function` is empty.
std::vector<ComponentId> target_members(const Topology& topology, const std::string& function = {});

PriceVector normal_prices(const Scenario& scenario);
/// Normal prices scaled by dip_factor over dip_hours.
PriceVector attack_prices(const Scenario& scenario);

struct SeedResult {
  std::uint64_t seed = 0;
  std::size_t members = 0;
  ResponseStrategy strategy = ResponseStrategy::PartitionAware;  // after the k=0 rule
  ComponentId origin = 0;
  RunMetrics metrics;
  AelReport ael;
};

struct ScenarioResult {
  std::vector<SeedResult> runs;  // in seed-list order
  StatsReport stats;
  Summary ael_increase;
  Summary peak_increase;
  double line_trip_rate = 0.0;
  HourlySeries ael_baseline{};  // mean over seeds
  HourlySeries ael_attack{};
};

using TraceSink = std::function<void(const SeedResult&, const SimTrace&)>;

/// Runs every seed of a single-point scenario without touching the disk.
/// `sink`, when given, sees each trace before it is dropped.
ScenarioResult evaluate_scenario(const Scenario& scenario, const TraceSink& sink = {});

/// evaluate_scenario plus metrics.csv, ael.csv and (optionally) per-seed
/// trace CSVs under scenario.out.
ScenarioResult run_scenario(const Scenario& scenario);

void write_metrics_csv(std::ostream& out, const Scenario& scenario, const ScenarioResult& result);
void write_ael_csv(std::ostream& out, const ScenarioResult& result);

struct SweepPoint {
  std::size_t n = 0;
  int k = 0;
  double sigma = 0.0;
  ResponseStrategy strategy = ResponseStrategy::PartitionAware;
};

struct SweepRow {
  SweepPoint point;
  std::optional<ScenarioResult> result;
  std::string error;  // set when the point failed
};

/// Cross product of the n, k, sigma and strategy axes, sorted by
/// (n, k, sigma, strategy).
std::vector<SweepPoint> sweep_grid(const Scenario& base);

/// Evaluates every grid point on up to `workers` threads. Failed points are
/// recorded, not thrown.
std::vector<SweepRow> evaluate_sweep(const Scenario& base);

/// evaluate_sweep plus sweep.csv, failures.csv and, when enabled, the
/// figure3a/3b/3d CSVs. Returns the number of failed points.
std::size_t run_sweep(const Scenario& base, std::vector<SweepRow>* rows = nullptr);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace pzc
