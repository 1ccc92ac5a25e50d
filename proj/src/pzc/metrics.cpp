#include "pzc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "pzc/error.hpp"
#include "pzc/rng.hpp"

namespace pzc {

namespace {

void require_members(std::span<const ComponentId> members) {
  if (members.empty()) throw Error(ErrorCode::InvalidArgument, "metric needs at least one component");
}

bool ever_compromised(const SimTrace& trace, ComponentId id) {
  auto it = trace.final_states.find(id);
  if (it == trace.final_states.end()) {
    throw Error(ErrorCode::NotFound, "component " + std::to_string(id) + " is not in the trace");
  }
  return it->second.compromised_at.has_value();
}

void check_appliance(const Appliance& a) {
  const auto where = "appliance '" + a.name + "': ";
  if (!(a.energy > 0.0)) throw Error(ErrorCode::InvalidArgument, where + "energy must be positive");
  if (a.duration < 1) throw Error(ErrorCode::InvalidArgument, where + "duration must be at least one hour");
  if (a.window_begin < 0 || a.window_end > static_cast<int>(kHours) || a.window_begin + a.duration > a.window_end) {
    throw Error(ErrorCode::Infeasible, where + "no feasible start in window [" + std::to_string(a.window_begin) +
                                           ", " + std::to_string(a.window_end) + ")");
  }
}

double slot_price(const PriceVector& prices, int start, int duration) {
  double sum = 0.0;
  for (int h = start; h < start + duration; ++h) sum += prices[static_cast<std::size_t>(h)];
  return sum;
}

double daily_total(const HourlySeries& series) { return std::accumulate(series.begin(), series.end(), 0.0); }

}  // namespace

double operational_availability(const SimTrace& trace, std::span<const ComponentId> members) {
  require_members(members);
  std::size_t unaffected = 0;
  for (auto id : members) {
    if (!ever_compromised(trace, id)) ++unaffected;
  }
  return 100.0 * static_cast<double>(unaffected) / static_cast<double>(members.size());
}

double damage_extent(const SimTrace& trace, std::span<const ComponentId> members) {
  return 100.0 - operational_availability(trace, members);
}

TempUnavailability temp_unavailability(const SimTrace& trace, std::span<const ComponentId> members) {
  require_members(members);
  std::map<ComponentId, bool> held;
  for (auto id : members) held.emplace(id, false);
  TempUnavailability out;
  std::size_t count = 0;
  double last_t = trace.attack_start;
  const double scale = 100.0 / static_cast<double>(members.size());
  auto advance = [&](double t) {
    out.integral += scale * static_cast<double>(count) * (t - last_t);
    last_t = t;
  };
  for (const auto& e : trace.events) {
    auto it = held.find(e.component);
    if (it == held.end()) continue;
    bool next = it->second;
    if (e.kind == EventKind::IsolateBoundary || e.kind == EventKind::ManualFlagged) {
      if (e.detail.find("healthy") != std::string::npos) next = true;
    } else if (e.kind == EventKind::Unisolated) {
      next = false;
    }
    if (next == it->second) continue;
    advance(e.t);
    it->second = next;
    if (next) {
      ++count;
    } else {
      --count;
    }
    out.peak = std::max(out.peak, scale * static_cast<double>(count));
  }
  if (std::isfinite(trace.end_time) && trace.end_time > last_t) advance(trace.end_time);
  return out;
}

PriceVector guideline_price(const HourlySeries& load, const PriceModel& model) {
  PriceVector prices{};
  for (std::size_t h = 0; h < kHours; ++h) {
    const double l = load[h];
    prices[h] = model.a * l * l + model.b * l + model.c;
    if (prices[h] < 0.0 || std::isnan(prices[h])) {
      throw Error(ErrorCode::InvalidArgument, "price model yields a negative price at hour " + std::to_string(h));
    }
  }
  return prices;
}

std::vector<std::optional<int>> schedule_starts(const PriceVector& prices, std::span<const Appliance> appliances) {
  std::vector<std::optional<int>> starts;
  starts.reserve(appliances.size());
  for (const auto& a : appliances) {
    check_appliance(a);
    int best = a.window_begin;
    if (a.shiftable) {
      double best_price = slot_price(prices, best, a.duration);
      for (int s = a.window_begin + 1; s + a.duration <= a.window_end; ++s) {
        const double p = slot_price(prices, s, a.duration);
        if (p < best_price) {
          best = s;
          best_price = p;
        }
      }
    }
    if (a.max_price && slot_price(prices, best, a.duration) > *a.max_price * a.duration) {
      starts.emplace_back(std::nullopt);
    } else {
      starts.emplace_back(best);
    }
  }
  return starts;
}

HourlySeries schedule_household(const PriceVector& prices, const HourlySeries& base_load,
                                std::span<const Appliance> appliances) {
  HourlySeries load = base_load;
  const auto starts = schedule_starts(prices, appliances);
  for (std::size_t i = 0; i < appliances.size(); ++i) {
    if (!starts[i]) continue;
    const auto& a = appliances[i];
    for (int h = *starts[i]; h < *starts[i] + a.duration; ++h) {
      load[static_cast<std::size_t>(h)] += a.energy / a.duration;
    }
  }
  return load;
}

const HourlySeries& canonical_load() {
  static const HourlySeries load{0.35, 0.30, 0.28, 0.27, 0.28, 0.35, 0.55, 0.80, 0.75, 0.60, 0.55, 0.55,
                                 0.60, 0.58, 0.55, 0.60, 0.75, 1.00, 1.25, 1.35, 1.30, 1.10, 0.80, 0.50};
  return load;
}

std::vector<Appliance> default_appliances() {
  return {
      {"washer", 1.2, 2, 8, 22, true, std::nullopt},
      {"dishwasher", 1.0, 1, 0, 8, true, std::nullopt},  // overnight delay start
      {"dryer", 1.5, 1, 8, 24, true, 0.03},
  };
}

Household default_household(ComponentId meter) {
  const double u = static_cast<double>(splitmix64(0x5eedULL ^ meter) >> 11) * 0x1.0p-53;
  const double factor = 0.8 + 0.4 * u;
  Household h;
  for (std::size_t t = 0; t < kHours; ++t) h.base_load[t] = factor * canonical_load()[t];
  h.appliances = default_appliances();
  return h;
}

PriceVector default_normal_prices() { return guideline_price(canonical_load()); }

PriceVector default_attack_prices() {
  auto prices = default_normal_prices();
  for (std::size_t h : {20u, 21u, 22u}) prices[h] *= 0.15;
  return prices;
}

AelReport community_ael(const SimTrace& trace, std::span<const ComponentId> meters,
                        std::span<const Household> households, const PriceVector& normal, const PriceVector& attack,
                        std::optional<double> capacity) {
  if (households.size() != meters.size()) {
    throw Error(ErrorCode::InvalidArgument, "household spec missing for " +
                                                std::to_string(meters.size() - std::min(meters.size(), households.size())) +
                                                " meter(s)");
  }
  AelReport report;
  double increase = 0.0;
  for (std::size_t i = 0; i < meters.size(); ++i) {
    const auto& h = households[i];
    const auto base = schedule_household(normal, h.base_load, h.appliances);
    const bool hit = ever_compromised(trace, meters[i]);
    const auto under_attack = hit ? schedule_household(attack, h.base_load, h.appliances) : base;
    for (std::size_t t = 0; t < kHours; ++t) {
      report.baseline[t] += base[t];
      report.attack[t] += under_attack[t];
    }
    if (hit) {
      ++report.compromised_meters;
      increase += daily_total(under_attack) - daily_total(base);
    }
  }
  report.baseline_daily_mean = daily_total(report.baseline) / kHours;
  report.attack_daily_mean = daily_total(report.attack) / kHours;
  if (report.compromised_meters > 0) increase /= static_cast<double>(report.compromised_meters);
  report.increase_per_compromised = increase;
  const double base_peak = *std::max_element(report.baseline.begin(), report.baseline.end());
  const double attack_peak = *std::max_element(report.attack.begin(), report.attack.end());
  report.peak_increase = attack_peak - base_peak;
  report.capacity = capacity.value_or(kDefaultCapacityFactor * base_peak);
  report.line_trip = attack_peak > report.capacity;
  return report;
}

RunMetrics run_metrics(const SimTrace& trace, std::span<const ComponentId> members) {
  RunMetrics m;
  m.omega = operational_availability(trace, members);
  m.delta = 100.0 - m.omega;
  m.temp = temp_unavailability(trace, members);
  m.containment_time = trace.last_compromise_time();
  m.recovery_time = trace.recovery_completed_at.value_or(0.0);
  return m;
}

double Summary::standard_error(std::size_t n) const { return n == 0 ? 0.0 : std / std::sqrt(static_cast<double>(n)); }

Summary summarize(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "no values to summarize");
  Summary s;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

StatsReport collect_stats(std::span<const RunMetrics> runs) {
  if (runs.empty()) throw Error(ErrorCode::InvalidArgument, "collect_stats needs at least one run");
  auto field = [&](auto get) {
    std::vector<double> values;
    values.reserve(runs.size());
    for (const auto& r : runs) values.push_back(get(r));
    return summarize(values);
  };
  StatsReport report;
  report.runs = runs.size();
  report.omega = field([](const RunMetrics& r) { return r.omega; });
  report.delta = field([](const RunMetrics& r) { return r.delta; });
  report.temp_peak = field([](const RunMetrics& r) { return r.temp.peak; });
  report.temp_integral = field([](const RunMetrics& r) { return r.temp.integral; });
  report.containment_time = field([](const RunMetrics& r) { return r.containment_time; });
  report.recovery_time = field([](const RunMetrics& r) { return r.recovery_time; });
  return report;
}

}  // namespace pzc
