#include "pzc/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>
#include <tuple>

#include "pzc/error.hpp"
#include "pzc/irec.hpp"
#include "pzc/rng.hpp"

namespace pzc {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(std::string_view value) {
  value = trim(value);
  if (value.size() >= 2 && value.front() == '[' && value.back() == ']') value = value.substr(1, value.size() - 2);
  std::vector<std::string> items;
  std::size_t pos = 0;
  while (pos <= value.size()) {
    const auto comma = value.find(',', pos);
    const auto item = trim(value.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    if (!item.empty()) items.emplace_back(item);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return items;
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  text = trim(text);
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    if constexpr (std::is_floating_point_v<T>) {
      if (text == "inf") return std::numeric_limits<T>::infinity();
    }
    throw Error(ErrorCode::InvalidArgument, "bad value '" + std::string(text) + "' for " + std::string(key));
  }
  return value;
}

template <typename T>
std::vector<T> parse_numbers(std::string_view key, std::string_view text) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) out.push_back(parse_number<T>(key, item));
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, std::string(key) + " needs at least one value");
  return out;
}

bool parse_bool(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "yes" || text == "1" || text == "on") return true;
  if (text == "false" || text == "no" || text == "0" || text == "off") return false;
  throw Error(ErrorCode::InvalidArgument, "bad boolean '" + std::string(text) + "' for " + std::string(key));
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

void Scenario::set(std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "topology") {
    topology_file = std::filesystem::path(std::string(value));
  } else if (key == "kinds") {
    kinds_file = std::filesystem::path(std::string(value));
  } else if (key == "functions") {
    functions_file = std::filesystem::path(std::string(value));
  } else if (key == "n") {
    n = parse_numbers<std::size_t>(key, value);
  } else if (key == "concentrators") {
    concentrators = parse_number<std::size_t>(key, value);
  } else if (key == "mesh_degree") {
    mesh_degree = parse_number<std::size_t>(key, value);
  } else if (key == "function") {
    function = std::string(value);
  } else if (key == "k") {
    k = parse_numbers<int>(key, value);
  } else if (key == "epsilon") {
    epsilon = parse_number<double>(key, value);
  } else if (key == "eta") {
    eta = parse_number<int>(key, value);
  } else if (key == "ct") {
    ct = parse_number<double>(key, value);
  } else if (key == "sigma") {
    sigma = parse_numbers<double>(key, value);
  } else if (key == "ht") {
    ht = parse_number<double>(key, value);
  } else if (key == "dt") {
    dt = parse_number<double>(key, value);
  } else if (key == "response_latency") {
    response_latency = parse_number<double>(key, value);
  } else if (key == "quiescence") {
    quiescence = parse_number<double>(key, value);
  } else if (key == "horizon") {
    horizon = parse_number<double>(key, value);
  } else if (key == "benign_period") {
    benign_period = parse_number<double>(key, value);
  } else if (key == "spread") {
    spread = parse_spread(value);
  } else if (key == "strategy") {
    strategy.clear();
    for (const auto& item : split_list(value)) strategy.push_back(parse_strategy(item));
    if (strategy.empty()) throw Error(ErrorCode::InvalidArgument, "strategy needs at least one value");
  } else if (key == "recovery") {
    recovery = parse_bool(key, value);
  } else if (key == "recovery_mode") {
    recovery_mode = parse_recovery_mode(value);
  } else if (key == "rules") {
    rules_file = std::filesystem::path(std::string(value));
  } else if (key == "attack_type") {
    attack_type = std::string(value);
  } else if (key == "origin") {
    if (value == "random") {
      origin.reset();
    } else {
      origin = parse_number<ComponentId>(key, value);
    }
  } else if (key == "seeds") {
    seeds = parse_seed_list(value);
  } else if (key == "price_a") {
    pricing.a = parse_number<double>(key, value);
  } else if (key == "price_b") {
    pricing.b = parse_number<double>(key, value);
  } else if (key == "price_c") {
    pricing.c = parse_number<double>(key, value);
  } else if (key == "dip_hours") {
    dip_hours = parse_numbers<int>(key, value);
    for (int h : dip_hours) {
      if (h < 0 || h >= static_cast<int>(kHours)) throw Error(ErrorCode::InvalidArgument, "dip hour out of range");
    }
  } else if (key == "dip_factor") {
    dip_factor = parse_number<double>(key, value);
    if (dip_factor < 0.0) throw Error(ErrorCode::InvalidArgument, "dip_factor must be >= 0");
  } else if (key == "capacity") {
    capacity = parse_number<double>(key, value);
  } else if (key == "out") {
    out = std::filesystem::path(std::string(value));
  } else if (key == "traces") {
    write_traces = parse_bool(key, value);
  } else if (key == "figures") {
    figures = parse_bool(key, value);
  } else if (key == "workers") {
    workers = parse_number<std::size_t>(key, value);
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown scenario key '" + std::string(key) + "'");
  }
}

void Scenario::validate_point() const {
  if (n.size() != 1 || k.size() != 1 || strategy.size() != 1 || sigma.size() > 1) {
    throw Error(ErrorCode::InvalidArgument, "a single run takes one value of n, k, sigma and strategy; use sweep");
  }
  if (ct && !sigma.empty()) throw Error(ErrorCode::InvalidArgument, "give either ct or sigma, not both");
  if (k.front() < 0) throw Error(ErrorCode::InvalidArgument, "k must be >= 0");
  if (seeds.empty()) throw Error(ErrorCode::InvalidArgument, "no seeds");
}

double Scenario::effective_ct() const {
  if (ct) return *ct;
  return (sigma.empty() ? 3.0 : sigma.front()) * dt;
}

Scenario parse_scenario(std::istream& in, std::string_view source) {
  Scenario s;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    const auto where = std::string(source) + ":" + std::to_string(line_no) + ": ";
    if (eq == std::string_view::npos) throw Error(ErrorCode::Parse, where + "expected 'key = value'");
    try {
      s.set(trim(view.substr(0, eq)), view.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(ErrorCode::Parse, where + e.what());
    }
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config '" + path.string() + "'");
  auto s = parse_scenario(in, path.string());
  // Relative paths inside a config resolve against the config's directory.
  const auto base = path.parent_path();
  for (auto* p : {&s.topology_file, &s.kinds_file, &s.functions_file, &s.rules_file}) {
    if (*p && p->value().is_relative()) *p = base / p->value();
  }
  return s;
}

std::vector<ComponentId> target_members(const Topology& topology, const std::string& function) {
  std::string name = function;
  if (name.empty()) {
    for (const auto& [f, members] : topology.functions()) {
      const bool any = std::any_of(members.begin(), members.end(),
                                   [&](ComponentId id) { return is_susceptible(topology.kind(id)); });
      if (any) {
        name = f;
        break;
      }
    }
    if (name.empty()) throw Error(ErrorCode::InvalidArgument, "topology has no susceptible components to attack");
  }
  std::vector<ComponentId> out;
  for (auto id : topology.function_members(name)) {
    if (is_susceptible(topology.kind(id))) out.push_back(id);
  }
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, "function '" + name + "' has no susceptible components");
  return out;
}

PriceVector normal_prices(const Scenario& scenario) { return guideline_price(canonical_load(), scenario.pricing); }

PriceVector attack_prices(const Scenario& scenario) {
  auto prices = normal_prices(scenario);
  for (int h : scenario.dip_hours) prices[static_cast<std::size_t>(h)] *= scenario.dip_factor;
  return prices;
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
  std::vector<std::uint64_t> seeds;
  for (const auto& item : split_list(text)) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      seeds.push_back(parse_number<std::uint64_t>("seeds", item));
      continue;
    }
    const auto lo = parse_number<std::uint64_t>("seeds", std::string_view(item).substr(0, dots));
    const auto hi = parse_number<std::uint64_t>("seeds", std::string_view(item).substr(dots + 2));
    if (hi < lo) throw Error(ErrorCode::InvalidArgument, "empty seed range '" + item + "'");
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
  }
  if (seeds.empty()) throw Error(ErrorCode::InvalidArgument, "no seeds given");
  return seeds;
}

ScenarioResult evaluate_scenario(const Scenario& scenario, const TraceSink& sink) {
  scenario.validate_point();
  SimParams params;
  params.ct = scenario.effective_ct();
  params.ht = scenario.ht;
  params.dt = scenario.dt;
  params.response_latency = scenario.response_latency;
  params.spread = scenario.spread;
  params.benign_period = scenario.benign_period;
  params.horizon = scenario.horizon;
  params.quiescence = scenario.quiescence;
  params.attack_type = scenario.attack_type;
  params.recovery = scenario.recovery;
  params.recovery_mode = scenario.recovery_mode;
  if (scenario.rules_file) params.rules = load_rules(*scenario.rules_file);
  params.validate();

  const int k = scenario.k.front();
  const auto strategy = k == 0 && scenario.strategy.front() == ResponseStrategy::PartitionAware
                            ? ResponseStrategy::PerNode
                            : scenario.strategy.front();

  std::optional<Topology> fixed;
  if (scenario.topology_file) {
    fixed = load_topology(*scenario.topology_file, scenario.kinds_file, scenario.functions_file);
  }
  const auto normal = normal_prices(scenario);
  const auto attack = attack_prices(scenario);

  ScenarioResult result;
  for (const auto seed : scenario.seeds) {
    const Topology topology = fixed ? *fixed
                                    : generate_ami_topology(scenario.n.front(), scenario.concentrators,
                                                            scenario.mesh_degree, seed);
    const auto members = target_members(topology, scenario.function);

    std::optional<PartitionScheme> scheme;
    if (strategy == ResponseStrategy::PartitionAware) {
      scheme = build_zones(topology.induced(members), k, scenario.epsilon, scenario.eta, seed);
    }

    ComponentId origin = 0;
    if (scenario.origin) {
      origin = *scenario.origin;
    } else {
      Rng rng(mix_seed(seed, 0x0219));
      origin = members[static_cast<std::size_t>(rng.below(members.size()))];
    }

    params.seed = seed;
    const auto trace = run_simulation(topology, scheme ? &*scheme : nullptr, params, strategy, origin);

    SeedResult run;
    run.seed = seed;
    run.members = members.size();
    run.strategy = strategy;
    run.origin = origin;
    run.metrics = run_metrics(trace, members);
    std::vector<Household> households;
    households.reserve(members.size());
    for (auto id : members) households.push_back(default_household(id));
    run.ael = community_ael(trace, members, households, normal, attack, scenario.capacity);
    if (sink) sink(run, trace);
    result.runs.push_back(std::move(run));
  }

  std::vector<RunMetrics> metrics;
  std::vector<double> increase;
  std::vector<double> peak;
  std::size_t trips = 0;
  for (const auto& run : result.runs) {
    metrics.push_back(run.metrics);
    increase.push_back(run.ael.increase_per_compromised);
    peak.push_back(run.ael.peak_increase);
    if (run.ael.line_trip) ++trips;
    for (std::size_t h = 0; h < kHours; ++h) {
      result.ael_baseline[h] += run.ael.baseline[h];
      result.ael_attack[h] += run.ael.attack[h];
    }
  }
  const auto runs = static_cast<double>(result.runs.size());
  for (std::size_t h = 0; h < kHours; ++h) {
    result.ael_baseline[h] /= runs;
    result.ael_attack[h] /= runs;
  }
  result.stats = collect_stats(metrics);
  result.ael_increase = summarize(increase);
  result.peak_increase = summarize(peak);
  result.line_trip_rate = static_cast<double>(trips) / runs;
  return result;
}

void write_metrics_csv(std::ostream& out, const Scenario& scenario, const ScenarioResult& result) {
  out << "seed,n,k,sigma,strategy,omega,delta,temp_unavail_peak,ael_increase,line_trip\n";
  const auto sigma = format_number(scenario.effective_ct() / scenario.dt);
  for (const auto& r : result.runs) {
    out << r.seed << ',' << r.members << ',' << scenario.k.front() << ',' << sigma << ',' << to_string(r.strategy)
        << ',' << format_number(r.metrics.omega) << ',' << format_number(r.metrics.delta) << ','
        << format_number(r.metrics.temp.peak) << ',' << format_number(r.ael.increase_per_compromised) << ','
        << (r.ael.line_trip ? 1 : 0) << '\n';
  }
}

void write_ael_csv(std::ostream& out, const ScenarioResult& result) {
  out << "hour,baseline_kwh,attack_kwh\n";
  for (std::size_t h = 0; h < kHours; ++h) {
    out << h << ',' << format_number(result.ael_baseline[h]) << ',' << format_number(result.ael_attack[h]) << '\n';
  }
}

ScenarioResult run_scenario(const Scenario& scenario) {
  std::filesystem::create_directories(scenario.out);
  TraceSink sink;
  if (scenario.write_traces) {
    std::filesystem::create_directories(scenario.out / "traces");
    sink = [&](const SeedResult& run, const SimTrace& trace) {
      const auto stem = "seed" + std::to_string(run.seed);
      save_trace_csv(trace, scenario.out / "traces" / (stem + "_events.csv"),
                     scenario.out / "traces" / (stem + "_oplog.csv"));
    };
  }
  auto result = evaluate_scenario(scenario, sink);
  auto metrics = open_out(scenario.out / "metrics.csv");
  write_metrics_csv(metrics, scenario, result);
  auto ael = open_out(scenario.out / "ael.csv");
  write_ael_csv(ael, result);
  return result;
}

std::vector<SweepPoint> sweep_grid(const Scenario& base) {
  if (base.ct && !base.sigma.empty()) throw Error(ErrorCode::InvalidArgument, "give either ct or sigma, not both");
  if (base.n.empty() || base.k.empty() || base.strategy.empty() || base.seeds.empty()) {
    throw Error(ErrorCode::InvalidArgument, "sweep axes must be non-empty");
  }
  const std::vector<double> sigmas =
      base.sigma.empty() ? std::vector<double>{base.effective_ct() / base.dt} : base.sigma;
  std::vector<SweepPoint> grid;
  for (auto n : base.n) {
    for (auto k : base.k) {
      for (auto sigma : sigmas) {
        for (auto strategy : base.strategy) grid.push_back(SweepPoint{n, k, sigma, strategy});
      }
    }
  }
  std::sort(grid.begin(), grid.end(), [](const SweepPoint& a, const SweepPoint& b) {
    return std::tie(a.n, a.k, a.sigma, a.strategy) < std::tie(b.n, b.k, b.sigma, b.strategy);
  });
  return grid;
}

std::vector<SweepRow> evaluate_sweep(const Scenario& base) {
  const auto grid = sweep_grid(base);
  std::vector<SweepRow> rows(grid.size());
  std::size_t workers = base.workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : base.workers;
  workers = std::min(workers, grid.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (auto i = next++; i < grid.size(); i = next++) {
      const auto& p = grid[i];
      rows[i].point = p;
      Scenario s = base;
      s.n = {p.n};
      s.k = {p.k};
      s.strategy = {p.strategy};
      s.ct.reset();
      s.sigma = {p.sigma};
      try {
        rows[i].result = evaluate_scenario(s);
      } catch (const std::exception& e) {
        rows[i].error = e.what();
      }
    }
  };
  std::vector<std::jthread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  pool.clear();
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "n,k,sigma,strategy,runs,omega_mean,omega_std,delta_mean,delta_std,delta_se,temp_unavail_peak_mean,"
         "ael_increase_mean,peak_increase_mean,line_trip_rate\n";
  for (const auto& row : rows) {
    if (!row.result) continue;
    const auto& r = *row.result;
    const auto& s = r.stats;
    out << r.runs.front().members << ',' << row.point.k << ',' << format_number(row.point.sigma) << ','
        << to_string(r.runs.front().strategy) << ',' << s.runs << ',' << format_number(s.omega.mean) << ','
        << format_number(s.omega.std) << ',' << format_number(s.delta.mean) << ',' << format_number(s.delta.std)
        << ',' << format_number(s.delta.standard_error(s.runs)) << ',' << format_number(s.temp_peak.mean) << ','
        << format_number(r.ael_increase.mean) << ',' << format_number(r.peak_increase.mean) << ','
        << format_number(r.line_trip_rate) << '\n';
  }
}

std::size_t run_sweep(const Scenario& base, std::vector<SweepRow>* rows_out) {
  std::filesystem::create_directories(base.out);
  auto rows = evaluate_sweep(base);

  auto sweep = open_out(base.out / "sweep.csv");
  write_sweep_csv(sweep, rows);

  std::size_t failures = 0;
  auto failed = open_out(base.out / "failures.csv");
  failed << "n,k,sigma,strategy,error\n";
  for (const auto& row : rows) {
    if (row.result) continue;
    ++failures;
    auto msg = row.error;
    std::replace(msg.begin(), msg.end(), '"', '\'');
    failed << row.point.n << ',' << row.point.k << ',' << format_number(row.point.sigma) << ','
           << to_string(row.point.strategy) << ",\"" << msg << "\"\n";
  }

  if (base.figures) {
    auto a = open_out(base.out / "figure3a.csv");
    auto b = open_out(base.out / "figure3b.csv");
    auto d = open_out(base.out / "figure3d.csv");
    a << "n,k,sigma,strategy,omega_mean,omega_std\n";
    b << "n,k,sigma,strategy,delta_mean,delta_std,delta_se\n";
    d << "n,k,sigma,strategy,hour,baseline_kwh,attack_kwh\n";
    for (const auto& row : rows) {
      if (!row.result) continue;
      const auto& r = *row.result;
      std::ostringstream key;
      key << r.runs.front().members << ',' << row.point.k << ',' << format_number(row.point.sigma) << ','
          << to_string(r.runs.front().strategy);
      a << key.str() << ',' << format_number(r.stats.omega.mean) << ',' << format_number(r.stats.omega.std) << '\n';
      b << key.str() << ',' << format_number(r.stats.delta.mean) << ',' << format_number(r.stats.delta.std) << ','
        << format_number(r.stats.delta.standard_error(r.stats.runs)) << '\n';
      for (std::size_t h = 0; h < kHours; ++h) {
        d << key.str() << ',' << h << ',' << format_number(r.ael_baseline[h]) << ','
          << format_number(r.ael_attack[h]) << '\n';
      }
    }
  }
  if (rows_out) *rows_out = std::move(rows);
  return failures;
}

}  // namespace pzc
