#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "pzc/error.hpp"
#include "pzc/metrics.hpp"
#include "pzc/rng.hpp"
#include "pzc/simulator.hpp"
#include "support/fixtures.hpp"

using namespace pzc;

namespace {

SimParams quiet(double ct = 3.0, double ht = 1.0, double dt = 1.0) {
  SimParams p;
  p.ct = ct;
  p.ht = ht;
  p.dt = dt;
  p.benign_period = 0.0;
  return p;
}

PartitionScheme path6_scheme(const Topology& t) {
  return make_scheme(t, {{1, 0}, {2, 0}, {3, 0}, {4, 1}, {5, 1}, {6, 1}}, 2, 0.0, 0);
}

std::vector<std::string> lines(const SimTrace& trace) {
  std::ostringstream out;
  write_events_csv(out, trace);
  std::vector<std::string> rows;
  std::istringstream in(out.str());
  for (std::string line; std::getline(in, line);) rows.push_back(line);
  return rows;
}

double compromised_at(const SimTrace& t, ComponentId id) { return *t.final_states.at(id).compromised_at; }

struct Generated {
  Topology topology;
  std::vector<ComponentId> meters;
  PartitionScheme scheme;
  ComponentId origin;
};

Generated generated(std::uint64_t seed, std::size_t n = 80, int k = 6) {
  auto topology = generate_ami_topology(n, 1, 3, seed);
  std::vector<ComponentId> meters;
  for (const auto& c : topology.components()) {
    if (c.kind == ComponentKind::SmartMeter) meters.push_back(c.id);
  }
  auto scheme = build_zones(topology.induced(meters), k, 0.1, 1, seed);
  Rng rng(seed);
  const auto origin = meters[rng.below(meters.size())];
  return {std::move(topology), std::move(meters), std::move(scheme), origin};
}

}  // namespace

TEST_SUITE("simulator") {
  TEST_CASE("PATH6 partition-aware timeline") {
    const auto t = fixtures::path(6);
    const auto scheme = path6_scheme(t);
    const auto trace = run_simulation(t, &scheme, quiet(), ResponseStrategy::PartitionAware, 1);
    const std::vector<std::string> expected{
        "t,event_kind,component,detail",
        "0,compromise,1,origin",
        "0,hop_launch,1,dst=2",
        "1,detection,1,pricing_manipulation",
        "1,isolate_compromised,1,",
        "1,isolate_boundary,3,\"healthy,response=0\"",
        "4,compromise,2,src=1",
        "4,hop_blocked,2,\"dst=3,at_launch\"",
        "5,detection,2,pricing_manipulation",
        "5,isolate_compromised,2,",
        "10,recovery_activated,1,repair_set=2",
        "15,recovered,1,restore_backup",
        "15,recovered,2,restore_backup",
        "15,unisolated,3,",
    };
    CHECK(lines(trace) == expected);
    CHECK(trace.compromised() == std::vector<ComponentId>{1, 2});
    const std::vector<ComponentId> all{1, 2, 3, 4, 5, 6};
    CHECK(damage_extent(trace, all) == doctest::Approx(100.0 / 3.0));
    CHECK(trace.final_states.at(3).isolated_while_healthy);
    CHECK(trace.final_states.at(3).status == NodeStatus::Healthy);
    CHECK(trace.final_states.at(1).status == NodeStatus::Recovered);
    CHECK(*trace.recovery_activated_at == 10.0);
    CHECK(*trace.recovery_completed_at == 15.0);
    // The second batch hits the same zone; {3} is re-issued, nothing new.
    REQUIRE(trace.responses.size() == 2);
    CHECK(trace.responses[1].components == std::vector<ComponentId>{3});
  }

  TEST_CASE("quiescence override moves recovery") {
    const auto t = fixtures::path(6);
    const auto scheme = path6_scheme(t);
    auto p = quiet();
    p.quiescence = 2.0;
    const auto trace = run_simulation(t, &scheme, p, ResponseStrategy::PartitionAware, 1);
    // Recovery starts at 3, before the in-flight hop lands on 2 at 4; 2's
    // alert at 5 opens a second pass at 7.
    CHECK(*trace.recovery_activated_at == 3.0);
    std::vector<double> passes;
    for (const auto& e : trace.events) {
      if (e.kind == EventKind::RecoveryActivated) passes.push_back(e.t);
    }
    CHECK(passes == std::vector<double>{3.0, 7.0});
    CHECK(trace.final_states.at(2).status == NodeStatus::Recovered);
    auto off = quiet();
    off.recovery = false;
    const auto none = run_simulation(t, &scheme, off, ResponseStrategy::PartitionAware, 1);
    CHECK_FALSE(none.recovery_activated_at.has_value());
    CHECK(none.final_states.at(3).status == NodeStatus::IsolatedHealthy);
    CHECK(none.final_states.at(2).status == NodeStatus::IsolatedCompromised);
  }

  TEST_CASE("no response lets the attack take a connected graph") {
    const auto t = fixtures::path(6);
    const auto trace = run_simulation(t, nullptr, quiet(), ResponseStrategy::None, 1);
    CHECK(trace.compromised().size() == 6);
    const std::vector<ComponentId> all{1, 2, 3, 4, 5, 6};
    CHECK(operational_availability(trace, all) == 0.0);
    CHECK(trace.alerts.size() == 6);
  }

  TEST_CASE("an isolated origin stays alone") {
    const Topology t(fixtures::meters(1, 3), {{2, 3}});
    for (auto s : {ResponseStrategy::None, ResponseStrategy::PerNode}) {
      const auto trace = run_simulation(t, nullptr, quiet(), s, 1);
      CHECK(trace.compromised() == std::vector<ComponentId>{1});
    }
  }

  TEST_CASE("STAR5 spread modes") {
    const auto t = fixtures::star(4);
    auto p = quiet(2.0, 1.0, 100.0);
    p.spread = SpreadMode::Parallel;
    const auto par = run_simulation(t, nullptr, p, ResponseStrategy::None, 0);
    for (ComponentId leaf = 1; leaf <= 4; ++leaf) CHECK(compromised_at(par, leaf) == 3.0);

    p.spread = SpreadMode::Sequential;
    const auto seq = run_simulation(t, nullptr, p, ResponseStrategy::None, 0);
    for (ComponentId leaf = 1; leaf <= 4; ++leaf) CHECK(compromised_at(seq, leaf) == 2.0 + leaf);
  }

  TEST_CASE("detection fires dt after compromise") {
    const auto t = fixtures::path(3);
    const auto trace = run_simulation(t, nullptr, quiet(2.0, 1.0, 4.0), ResponseStrategy::None, 1);
    CHECK(compromised_at(trace, 2) == 3.0);
    CHECK(*trace.final_states.at(2).detected_at == 7.0);
    for (const auto& a : trace.alerts) CHECK(a.t_detect == compromised_at(trace, a.component) + 4.0);
  }

  TEST_CASE("isolation does not suppress detection") {
    // Zone {1,2} has boundary {2}; 1's alert at t=4 reaches actuation at t=5,
    // after 2 was compromised at t=3 and before its own alert at t=7.
    const auto t = fixtures::path(3);
    const auto scheme = make_scheme(t, {{1, 0}, {2, 0}, {3, 1}}, 2, 0.5, 1);
    auto p = quiet(2.0, 1.0, 4.0);
    p.response_latency = 1.0;
    p.recovery = false;
    const auto trace = run_simulation(t, &scheme, p, ResponseStrategy::PartitionAware, 1);
    CHECK(*trace.final_states.at(2).isolated_at == 5.0);
    CHECK(*trace.final_states.at(2).detected_at == 7.0);
    // 2's hop launched at 3 is already in flight and lands on 3 at 6.
    CHECK(compromised_at(trace, 3) == 6.0);
    CHECK(trace.alerts.size() == 3);
  }

  TEST_CASE("in-flight hops survive source isolation") {
    // Per-node: 1 launches to 2 at t=0 and is isolated at t=1; the hop still
    // lands at t=4.
    const auto t = fixtures::path(3);
    const auto trace = run_simulation(t, nullptr, quiet(), ResponseStrategy::PerNode, 1);
    CHECK(compromised_at(trace, 2) == 4.0);
    CHECK(compromised_at(trace, 3) == 8.0);
  }

  TEST_CASE("argument errors") {
    const auto t = fixtures::path(3);
    auto code = [](auto f) {
      try {
        f();
      } catch (const Error& e) {
        return e.code();
      }
      return ErrorCode::Invariant;
    };
    CHECK(code([&] { run_simulation(t, nullptr, quiet(), ResponseStrategy::PartitionAware, 1); }) ==
          ErrorCode::InvalidArgument);
    CHECK(code([&] { run_simulation(t, nullptr, quiet(), ResponseStrategy::None, 99); }) == ErrorCode::NotFound);
    CHECK(code([&] { run_simulation(t, nullptr, quiet(0.0), ResponseStrategy::None, 1); }) ==
          ErrorCode::InvalidArgument);
  }

  TEST_CASE("sigma helpers") {
    const auto p = SimParams::from_sigma(2.5);
    CHECK(p.ct == 2.5);
    CHECK(p.dt == 1.0);
    CHECK(p.sigma() == 2.5);
    CHECK(p.effective_quiescence() == 1.0 + 2.5 + 1.0);
    CHECK(format_number(kForever) == "inf");
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(15.0) == "15");
  }

  TEST_CASE("trace invariants on generated topologies") {
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
      CAPTURE(seed);
      const auto g = generated(seed);
      auto p = quiet();
      p.benign_period = 5.0;
      p.seed = seed;
      const auto trace = run_simulation(g.topology, &g.scheme, p, ResponseStrategy::PartitionAware, g.origin);

      // Determinism.
      const auto again = run_simulation(g.topology, &g.scheme, p, ResponseStrategy::PartitionAware, g.origin);
      CHECK(lines(trace) == lines(again));

      // Events are time ordered.
      for (std::size_t i = 1; i < trace.events.size(); ++i) CHECK(trace.events[i - 1].t <= trace.events[i].t);

      // One alert per compromised node.
      CHECK(trace.alerts.size() == trace.compromised().size());

      // Op-log records follow topology edges.
      for (const auto& r : trace.op_log) CHECK(g.topology.adjacent(r.src, r.dst));

      // Causality: every non-origin compromise comes from a hop launched by a
      // node that was compromised at launch time.
      std::map<ComponentId, double> launches;  // dst -> earliest attack record time from a compromised src
      for (const auto& r : trace.op_log) {
        if (r.kind != TrafficKind::Attack) continue;
        CHECK(compromised_at(trace, r.src) <= r.t);
        auto [it, fresh] = launches.emplace(r.dst, r.t);
        if (!fresh) it->second = std::min(it->second, r.t);
      }
      for (auto id : trace.compromised()) {
        if (id == g.origin) continue;
        REQUIRE(launches.count(id) == 1);
        CHECK(launches.at(id) + p.ht + p.ct <= compromised_at(trace, id));
      }

      // No resurrection: leaving isolation only through recovery events.
      std::set<ComponentId> isolated;
      for (const auto& e : trace.events) {
        switch (e.kind) {
          case EventKind::IsolateCompromised:
          case EventKind::IsolateBoundary:
          case EventKind::ManualFlagged:
            isolated.insert(e.component);
            break;
          case EventKind::Recovered:
            if (e.detail.find("clean") == std::string::npos) isolated.erase(e.component);
            break;
          case EventKind::Unisolated:
            CHECK(isolated.count(e.component) == 1);
            isolated.erase(e.component);
            break;
          case EventKind::Compromise:
          case EventKind::HopLaunch:
            CHECK(isolated.count(e.component) == 0);
            break;
          default:
            break;
        }
      }
      // Recovery without manual steps leaves nothing isolated.
      CHECK(isolated.empty());
      for (const auto& [id, state] : trace.final_states) CHECK_FALSE(is_isolated(state.status));
    }
  }

  TEST_CASE("partition-aware containment is a subset of no response") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      CAPTURE(seed);
      const auto g = generated(seed);
      const auto none = run_simulation(g.topology, nullptr, quiet(), ResponseStrategy::None, g.origin);
      const auto pa = run_simulation(g.topology, &g.scheme, quiet(), ResponseStrategy::PartitionAware, g.origin);
      const auto a = pa.compromised();
      const auto b = none.compromised();
      CHECK(std::includes(b.begin(), b.end(), a.begin(), a.end()));
    }
  }

  TEST_CASE("sealed zones stop new outside infections") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      CAPTURE(seed);
      const auto g = generated(seed);
      const auto trace = run_simulation(g.topology, &g.scheme, quiet(), ResponseStrategy::PartitionAware, g.origin);
      // Zones sealed so far, with the time of their sealing.
      std::map<ZoneId, double> sealed;
      for (const auto& r : trace.responses) {
        for (const auto& a : r.triggering_alerts) sealed.emplace(*g.scheme.zone_of(a.component), r.t_issued);
      }
      for (const auto& r : trace.op_log) {
        if (r.kind != TrafficKind::Attack) continue;
        const auto it = sealed.find(*g.scheme.zone_of(r.src));
        // Launches at the sealing instant are ordered before the isolation.
        if (it == sealed.end() || r.t <= it->second) continue;
        CHECK(g.scheme.zone_of(r.dst) == g.scheme.zone_of(r.src));
      }
    }
  }

  TEST_CASE("benign traffic heads for the concentrator") {
    const auto t = generate_ami_topology(30, 1, 2, 3);
    auto p = quiet();
    p.benign_period = 4.0;
    const auto trace = run_simulation(t, nullptr, p, ResponseStrategy::PerNode, 0);
    std::size_t benign = 0;
    for (const auto& r : trace.op_log) {
      if (r.kind != TrafficKind::Benign) continue;
      ++benign;
      CHECK(t.kind(r.src) == ComponentKind::SmartMeter);
      CHECK(t.adjacent(r.src, r.dst));
    }
    CHECK(benign > 0);
  }

  TEST_CASE("horizon stops the run") {
    const auto t = fixtures::path(6);
    auto p = quiet();
    p.horizon = 5.0;
    const auto trace = run_simulation(t, nullptr, p, ResponseStrategy::None, 1);
    CHECK(trace.compromised() == std::vector<ComponentId>{1, 2});
    for (const auto& e : trace.events) CHECK(e.t <= 5.0);
  }

  TEST_CASE("op-log CSV") {
    const auto t = fixtures::path(3);
    const auto trace = run_simulation(t, nullptr, quiet(), ResponseStrategy::None, 1);
    std::ostringstream out;
    write_op_log_csv(out, trace);
    CHECK(out.str() == "t,src,dst,kind\n0,1,2,attack\n4,2,3,attack\n");
  }
}
