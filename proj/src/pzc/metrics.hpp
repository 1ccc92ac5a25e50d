#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pzc/sim_types.hpp"
#include "pzc/topology.hpp"

namespace pzc {

inline constexpr std::size_t kHours = 24;

using HourlySeries = std::array<double, kHours>;
using PriceVector = HourlySeries;

/// Percentage of `members` never compromised. Isolated healthy components
/// count as unaffected.
double operational_availability(const SimTrace& trace, std::span<const ComponentId> members);
/// 100 - operational_availability.
double damage_extent(const SimTrace& trace, std::span<const ComponentId> members);

struct TempUnavailability {
  double peak = 0.0;      // max % of members isolated while healthy at once
  double integral = 0.0;  // % x time units
};

TempUnavailability temp_unavailability(const SimTrace& trace, std::span<const ComponentId> members);

struct PriceModel {
  double a = 0.01;
  double b = 0.05;
  double c = 0.02;
};

/// prices[t] = a*L[t]^2 + b*L[t] + c. Throws InvalidArgument on a negative
/// price.
PriceVector guideline_price(const HourlySeries& load, const PriceModel& model = {});

struct Appliance {
  std::string name;
  double energy = 0.0;  // kWh per run
  int duration = 1;     // hours
  int window_begin = 0; // first allowed hour
  int window_end = 24;  // the run must finish by this hour, no wraparound
  bool shiftable = true;
  /// Opportunistic load: runs only when the cheapest slot averages at most
  /// this price per hour.
  std::optional<double> max_price;
};

/// Per-appliance start hour, or nullopt when an opportunistic appliance
/// sits out the day.
std::vector<std::optional<int>> schedule_starts(const PriceVector& prices, std::span<const Appliance> appliances);

/// base_load plus every scheduled appliance spread evenly over its run.
HourlySeries schedule_household(const PriceVector& prices, const HourlySeries& base_load,
                                std::span<const Appliance> appliances);

struct Household {
  HourlySeries base_load{};
  std::vector<Appliance> appliances;
};

/// Residential load shape (kWh per hour, one household) used for pricing.
const HourlySeries& canonical_load();
std::vector<Appliance> default_appliances();
/// Canonical load scaled by a per-meter factor in [0.8, 1.2].
Household default_household(ComponentId meter);

PriceVector default_normal_prices();
/// Normal prices with a deep night-time dip at hours 20-22.
PriceVector default_attack_prices();

struct AelReport {
  HourlySeries baseline{};
  HourlySeries attack{};
  double baseline_daily_mean = 0.0;  // kWh per hour
  double attack_daily_mean = 0.0;
  double increase_per_compromised = 0.0;  // mean daily kWh per compromised meter
  double peak_increase = 0.0;             // max(attack) - max(baseline)
  double capacity = 0.0;
  bool line_trip = false;
  std::size_t compromised_meters = 0;
};

inline constexpr double kDefaultCapacityFactor = 1.5;

/// `meters` and `households` are parallel. A meter counts as compromised if
/// the trace ever compromised it. A nullopt capacity means
/// kDefaultCapacityFactor x the baseline peak.
AelReport community_ael(const SimTrace& trace, std::span<const ComponentId> meters,
                        std::span<const Household> households, const PriceVector& normal, const PriceVector& attack,
                        std::optional<double> capacity = std::nullopt);

struct RunMetrics {
  double omega = 0.0;
  double delta = 0.0;
  TempUnavailability temp;
  double containment_time = 0.0;  // last compromise
  double recovery_time = 0.0;     // recovery completion, 0 when none ran
};

RunMetrics run_metrics(const SimTrace& trace, std::span<const ComponentId> members);

struct Summary {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for one run

  double standard_error(std::size_t n) const;
};

struct StatsReport {
  std::size_t runs = 0;
  Summary omega;
  Summary delta;
  Summary temp_peak;
  Summary temp_integral;
  Summary containment_time;
  Summary recovery_time;
};

Summary summarize(std::span<const double> values);
StatsReport collect_stats(std::span<const RunMetrics> runs);

}  // namespace pzc
