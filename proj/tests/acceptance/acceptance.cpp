// End-to-end acceptance checks. One PASS/FAIL line per criterion; the exit
// code is nonzero when any gating criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pzc/error.hpp"
#include "pzc/irec.hpp"
#include "pzc/ires.hpp"
#include "pzc/metrics.hpp"
#include "pzc/partition.hpp"
#include "pzc/rng.hpp"
#include "pzc/scenario.hpp"
#include "pzc/simulator.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace pzc;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned thresholds.
constexpr double kOmegaPartitionedMin = 70.0;
constexpr double kOmegaBaselineMax = 20.0;
constexpr double kFig3aRuntimeMax = 120.0;  // seconds
constexpr double kCutRatioMax = 2.0;
constexpr double kPartitionRuntimeMax = 30.0;
constexpr double kAelTarget = 1.3;
constexpr double kAelTolerance = 0.5;
constexpr double kLoadTolerance = 1e-9;
constexpr std::size_t kSeeds = 100;
constexpr std::size_t kRandomTraces = 1000;
constexpr std::size_t kPriceVectors = 100;

int gating_failures = 0;

void report(int id, bool pass, const std::string& detail, bool gating = true) {
  std::printf("criterion %d: %s  %s%s\n", id, pass ? "PASS" : "FAIL", detail.c_str(),
              gating ? "" : "  (non-gating)");
  std::fflush(stdout);
  if (!pass && gating) ++gating_failures;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Scenario base_scenario() {
  Scenario s;
  s.set("n", "200");
  s.set("dt", "1");
  s.set("ht", "1");
  s.set("spread", "sequential");
  s.set("strategy", "partition_aware");
  s.set("seeds", "1.." + std::to_string(kSeeds));
  s.set("traces", "false");
  s.set("figures", "false");
  return s;
}

// The n=200 grid shared by criteria 2, 3, 4 and 8.
struct Grid {
  std::map<std::pair<int, double>, ScenarioResult> points;

  const ScenarioResult& at(int k, double sigma) const { return points.at({k, sigma}); }
};

Grid run_grid() {
  auto s = base_scenario();
  s.set("k", "0,2,4,8,16,32");
  s.set("sigma", "1,2,3");
  Grid g;
  for (auto& row : evaluate_sweep(s)) {
    if (!row.result) throw Error(ErrorCode::Invariant, "sweep point failed: " + row.error);
    g.points.emplace(std::make_pair(row.point.k, row.point.sigma), std::move(*row.result));
  }
  return g;
}

void criterion1() {
  const auto t0 = Clock::now();
  auto s = base_scenario();
  s.set("sigma", "3");
  s.set("k", "8");
  const auto partitioned = evaluate_scenario(s);
  s.set("k", "0");
  const auto baseline = evaluate_scenario(s);
  const double elapsed = seconds_since(t0);
  const double a = partitioned.stats.omega.mean;
  const double b = baseline.stats.omega.mean;
  report(1, a >= kOmegaPartitionedMin && b <= kOmegaBaselineMax && elapsed < kFig3aRuntimeMax,
         fmt("omega(k=8)=%.2f", a) + fmt(" omega(k=0)=%.2f", b) + fmt(" runtime=%.1fs", elapsed));
}

void criterion2(const Grid& g) {
  bool ok = true;
  std::string detail;
  for (double sigma : {1.0, 2.0, 3.0}) {
    const double d0 = g.at(0, sigma).stats.delta.mean;
    double worst = 0.0;
    for (int k : {2, 4, 8, 16, 32}) {
      const double d = g.at(k, sigma).stats.delta.mean;
      ok = ok && d < d0;
      worst = std::max(worst, d);
    }
    detail += fmt("sigma=%.0f:", sigma) + fmt(" delta(k=0)=%.2f", d0) + fmt(" max delta(k>0)=%.2f  ", worst);
  }
  report(2, ok, detail);
}

void criterion3(const Grid& g) {
  bool ok = true;
  std::string detail = "delta(k=8):";
  for (double sigma : {1.0, 2.0, 3.0}) detail += fmt(" %.3f", g.at(8, sigma).stats.delta.mean);
  for (double sigma : {2.0, 3.0}) {
    const auto& lo = g.at(8, sigma - 1.0).stats;
    const auto& hi = g.at(8, sigma).stats;
    const double se = hi.delta.standard_error(hi.runs);
    ok = ok && hi.delta.mean <= lo.delta.mean + se;
  }
  report(3, ok, detail);
}

void criterion4(const Grid& g) {
  const std::vector<int> ks{0, 2, 4, 8, 16, 32};
  std::string detail = "delta(k) sigma=3:";
  std::size_t best = 0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double d = g.at(ks[i], 3.0).stats.delta.mean;
    detail += " " + std::to_string(ks[i]) + fmt("=%.3f", d);
    if (d < g.at(ks[best], 3.0).stats.delta.mean) best = i;
  }
  detail += " argmin k=" + std::to_string(ks[best]);
  report(4, best > 0 && best + 1 < ks.size(), detail, false);
}

void criterion5() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::size_t graphs = 0;
  std::size_t compared = 0;
  std::size_t satisfiable = 0;
  std::size_t unsatisfiable = 0;
  double worst_ratio = 0.0;
  for (const auto& g : fixtures::small_suite()) {
    bool checked = false;
    for (int k : {2, 3, 4}) {
      const auto greedy = build_zones(g.topology, k, kDefaultEpsilon, kDefaultEta, 1);
      const auto check = validate_scheme(g.topology, greedy);
      const auto cap = static_cast<std::size_t>(std::floor(zone_size_bound(g.topology.size(), k, kDefaultEpsilon) + 1e-9));
      if (cap * static_cast<std::size_t>(k) < g.topology.size()) {
        // No integer sizing meets the bound; nothing to compare.
        ++unsatisfiable;
        continue;
      }
      ++satisfiable;
      checked = true;
      if (!check.size_violations.empty()) {
        std::printf("  size bound broken: %s k=%d\n", g.name.c_str(), k);
        ok = false;
      }
      try {
        const auto opt = brute_force_partition(g.topology, k, kDefaultEpsilon, kDefaultEta);
        ++compared;
        const double ratio = opt.cut == 0 ? (greedy.cut == 0 ? 1.0 : INFINITY)
                                          : static_cast<double>(greedy.cut) / static_cast<double>(opt.cut);
        worst_ratio = std::max(worst_ratio, ratio);
        if (ratio > kCutRatioMax) {
          std::printf("  cut ratio %.2f: %s k=%d\n", ratio, g.name.c_str(), k);
          ok = false;
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::Infeasible) throw;
      }
    }
    graphs += checked;
  }
  const bool exact = build_zones(fixtures::path(6), 2, 0.0, 0, 1).cut == 1 &&
                     build_zones(fixtures::cycle(4), 2, 0.0, 1, 1).cut == 2 &&
                     build_zones(fixtures::complete(4), 2, 0.0, 1, 1).cut == 4;
  const double elapsed = seconds_since(t0);
  report(5, ok && exact && graphs >= 20 && elapsed < kPartitionRuntimeMax,
         std::to_string(graphs) + " graphs checked, " + std::to_string(satisfiable) + " cases (" +
             std::to_string(unsatisfiable) + " with no integer sizing skipped), " + std::to_string(compared) +
             " optima" +
             fmt(", worst cut ratio=%.2f", worst_ratio) + (exact ? ", named optima exact" : ", named optima MISSED") +
             fmt(", runtime=%.1fs", elapsed));
}

void criterion6() {
  bool ok = true;
  std::size_t checks = 0;

  // Damage assessment against the edge-list oracle on every fixture.
  for (const auto& g : fixtures::small_suite()) {
    const auto scheme = build_zones(g.topology, 3, 0.2, 1, 5);
    for (const auto& c : g.topology.components()) {
      const std::vector<IdsAlert> alerts{{c.id, "x", 0.0, 1.0}};
      const auto r = assess_damage(alerts, scheme);
      ok = ok && std::set<ComponentId>(r.components.begin(), r.components.end()) ==
                     oracles::damage_response(g.topology, scheme.assignment, {c.id});
      ++checks;
    }
  }

  // Mode discrimination.
  {
    const std::vector<OpLogRecord> log{{1.0, 1, 2, TrafficKind::Attack},
                                       {2.0, 2, 3, TrafficKind::Attack},
                                       {1.5, 3, 4, TrafficKind::Benign}};
    const std::vector<IdsAlert> a{{1, "x", 0.0, 1.0}};
    ok = ok && analyze_recovery(a, log, RecoveryMode::PaperLiteral).components == std::vector<ComponentId>{1, 2, 3, 4};
    ok = ok && analyze_recovery(a, log, RecoveryMode::Causal).components == std::vector<ComponentId>{1, 2, 3};
    ++checks;
  }

  // Random simulated traces: closures agree with the oracles, and the
  // literal repair set covers every compromised node.
  std::size_t covered = 0;
  for (std::uint64_t seed = 1; seed <= kRandomTraces; ++seed) {
    Rng rng(mix_seed(seed, 0xacce));
    const auto n = 8 + rng.below(40);
    const auto topology = generate_ami_topology(n, 1, 2 + rng.below(3), seed);
    const auto members = target_members(topology);
    const int k = 1 + static_cast<int>(rng.below(std::min<std::size_t>(6, members.size())));
    const auto scheme = build_zones(topology.induced(members), k, 0.2, 1, seed);
    auto p = SimParams::from_sigma(0.5 + 3.0 * rng.uniform01());
    p.benign_period = rng.below(2) ? 3.0 : 0.0;
    p.spread = rng.below(2) ? SpreadMode::Parallel : SpreadMode::Sequential;
    p.seed = seed;
    const ResponseStrategy strategies[] = {ResponseStrategy::None, ResponseStrategy::PerNode,
                                           ResponseStrategy::PartitionAware};
    const auto strategy = strategies[rng.below(3)];
    const auto origin = members[rng.below(members.size())];
    const auto trace = run_simulation(topology, &scheme, p, strategy, origin);

    std::vector<ComponentId> alerted;
    for (const auto& a : trace.alerts) alerted.push_back(a.component);
    const auto literal = analyze_recovery(trace.alerts, trace.op_log, RecoveryMode::PaperLiteral);
    const auto causal = analyze_recovery(trace.alerts, trace.op_log, RecoveryMode::Causal);
    ok = ok && std::set<ComponentId>(literal.components.begin(), literal.components.end()) ==
                   oracles::literal_closure(alerted, trace.op_log, trace.attack_start);
    ok = ok && std::set<ComponentId>(causal.components.begin(), causal.components.end()) ==
                   oracles::causal_closure(alerted, trace.op_log, trace.attack_start);
    const auto truth = trace.compromised();
    const bool subset =
        std::includes(literal.components.begin(), literal.components.end(), truth.begin(), truth.end());
    covered += subset;
    ok = ok && subset;
    ++checks;
  }
  report(6, ok,
         std::to_string(checks) + " oracle checks, ground truth covered in " + std::to_string(covered) + "/" +
             std::to_string(kRandomTraces) + " traces");
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion7(const Grid& g) {
  bool identity = true;
  std::size_t runs = 0;
  for (const auto& [key, result] : g.points) {
    for (const auto& r : result.runs) {
      identity = identity && r.metrics.omega + r.metrics.delta == 100.0;
      ++runs;
    }
  }
  // The identity on raw traces too, against a direct count.
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto t = generate_ami_topology(60, 1, 3, seed);
    const auto members = target_members(t);
    const auto trace = run_simulation(t, nullptr, SimParams::from_sigma(2.0), ResponseStrategy::PerNode,
                                      members[seed % members.size()]);
    std::size_t hit = 0;
    for (auto id : members) hit += trace.final_states.at(id).compromised_at.has_value();
    const double omega = operational_availability(trace, members);
    identity = identity && omega + damage_extent(trace, members) == 100.0 &&
               std::abs(damage_extent(trace, members) - 100.0 * hit / members.size()) < 1e-9;
    ++runs;
  }

  const auto root = std::filesystem::temp_directory_path() / "pzc_acceptance_determinism";
  std::filesystem::remove_all(root);
  auto s = base_scenario();
  s.set("seeds", "1..10");
  s.set("k", "8");
  s.set("traces", "true");
  std::vector<std::string> bodies;
  for (const char* run : {"a", "b"}) {
    s.out = root / run;
    run_scenario(s);
    bodies.push_back(slurp(s.out / "metrics.csv") + slurp(s.out / "ael.csv") +
                     slurp(s.out / "traces" / "seed3_events.csv") + slurp(s.out / "traces" / "seed3_oplog.csv"));
  }
  const bool same = bodies[0] == bodies[1] && !bodies[0].empty();
  std::filesystem::remove_all(root);
  report(7, identity && same,
         "omega+delta=100 on " + std::to_string(runs) + " runs; rerun CSVs " + (same ? "identical" : "DIFFER"));
}

void criterion8(const Grid& g) {
  std::vector<double> increases;
  bool totals = true;
  for (const auto& [key, result] : g.points) {
    for (const auto& r : result.runs) {
      if (r.ael.compromised_meters > 0) increases.push_back(r.ael.increase_per_compromised);
      totals = totals && r.ael.attack_daily_mean >= r.ael.baseline_daily_mean;
    }
  }
  const double mean = summarize(increases).mean;
  const double k8 = g.at(8, 3.0).peak_increase.mean;
  const double k0 = g.at(0, 3.0).peak_increase.mean;
  report(8, std::abs(mean - kAelTarget) <= kAelTolerance && totals && k8 < k0,
         fmt("increase per household=%.3f kWh", mean) + fmt(", peak increase k=8 %.2f", k8) +
             fmt(" vs k=0 %.2f", k0) + (totals ? ", attack total >= baseline" : ", attack total BELOW baseline"));
}

// Joint enumeration of every start tuple, minimising the household bill.
HourlySeries exhaustive_schedule(const PriceVector& prices, const HourlySeries& base,
                                 const std::vector<Appliance>& apps) {
  std::vector<std::vector<int>> options;
  for (const auto& a : apps) {
    std::vector<int> starts;
    if (!a.shiftable) {
      starts.push_back(a.window_begin);
    } else {
      for (int s = a.window_begin; s + a.duration <= a.window_end; ++s) starts.push_back(s);
    }
    options.push_back(starts);
  }
  std::vector<std::size_t> pick(apps.size(), 0);
  double best_bill = INFINITY;
  std::vector<std::size_t> best;
  while (true) {
    double bill = 0.0;
    for (std::size_t i = 0; i < apps.size(); ++i) {
      const int s = options[i][pick[i]];
      for (int h = s; h < s + apps[i].duration; ++h) {
        bill += prices[static_cast<std::size_t>(h)] * apps[i].energy / apps[i].duration;
      }
    }
    if (bill < best_bill) {
      best_bill = bill;
      best = pick;
    }
    std::size_t i = 0;
    while (i < apps.size() && ++pick[i] == options[i].size()) pick[i++] = 0;
    if (i == apps.size()) break;
  }
  HourlySeries load = base;
  for (std::size_t i = 0; i < apps.size(); ++i) {
    const int s = options[i][best[i]];
    for (int h = s; h < s + apps[i].duration; ++h) load[static_cast<std::size_t>(h)] += apps[i].energy / apps[i].duration;
  }
  return load;
}

void criterion9() {
  bool ok = true;
  for (std::uint64_t seed = 1; seed <= kPriceVectors; ++seed) {
    Rng rng(mix_seed(seed, 0x5c4e));
    PriceVector prices{};
    for (auto& p : prices) p = 0.01 + rng.uniform01();
    HourlySeries base{};
    for (auto& b : base) b = rng.uniform01();
    std::vector<Appliance> apps;
    const auto count = 1 + rng.below(3);
    for (std::size_t i = 0; i < count; ++i) {
      Appliance a;
      a.name = "a" + std::to_string(i);
      a.energy = 0.5 + 2.0 * rng.uniform01();
      a.duration = 1 + static_cast<int>(rng.below(4));
      a.window_begin = static_cast<int>(rng.below(static_cast<std::size_t>(24 - a.duration + 1)));
      a.window_end = a.window_begin + a.duration +
                     static_cast<int>(rng.below(static_cast<std::size_t>(24 - a.window_begin - a.duration + 1)));
      a.shiftable = rng.below(5) != 0;
      apps.push_back(a);
    }
    const auto got = schedule_household(prices, base, apps);
    const auto want = exhaustive_schedule(prices, base, apps);
    for (std::size_t h = 0; h < kHours; ++h) ok = ok && std::abs(got[h] - want[h]) <= kLoadTolerance;
  }
  report(9, ok, std::to_string(kPriceVectors) + " random price vectors, up to 3 appliances each");
}

void guarded(int id, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, false, std::string("error: ") + e.what());
  }
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  guarded(1, criterion1);
  Grid grid;
  bool have_grid = false;
  try {
    grid = run_grid();
    have_grid = true;
  } catch (const std::exception& e) {
    for (int id : {2, 3, 4, 8}) report(id, false, std::string("grid failed: ") + e.what(), id != 4);
  }
  if (have_grid) {
    guarded(2, [&] { criterion2(grid); });
    guarded(3, [&] { criterion3(grid); });
    guarded(4, [&] { criterion4(grid); });
  }
  guarded(5, criterion5);
  guarded(6, criterion6);
  if (have_grid) guarded(7, [&] { criterion7(grid); });
  if (have_grid) guarded(8, [&] { criterion8(grid); });
  guarded(9, criterion9);
  std::printf("acceptance: %s (%.1fs)\n", gating_failures == 0 ? "all gating criteria pass" : "FAILURES",
              seconds_since(t0));
  return gating_failures == 0 ? 0 : 1;
}
