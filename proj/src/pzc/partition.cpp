#include "pzc/partition.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <string>

#include "pzc/error.hpp"
#include "pzc/rng.hpp"

namespace pzc {

namespace {

constexpr std::size_t kRestarts = 4;
constexpr std::size_t kMaxPasses = 200;

std::size_t size_cap(std::size_t n, int k, double epsilon) {
  return static_cast<std::size_t>(std::floor(zone_size_bound(n, k, epsilon) + 1e-9));
}

void check_partition_args(const Topology& topology, int k, double epsilon, int eta) {
  if (k <= 0) throw Error(ErrorCode::InvalidArgument, "k must be positive, got " + std::to_string(k));
  if (static_cast<std::size_t>(k) > topology.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "k=" + std::to_string(k) + " exceeds the vertex count " + std::to_string(topology.size()));
  }
  if (!(epsilon >= 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be >= 0");
  if (eta < 0) throw Error(ErrorCode::InvalidArgument, "eta must be >= 0");
}

std::vector<ZoneId> dense_zones(const Topology& topology, const ZoneAssignment& assignment) {
  std::vector<ZoneId> zone(topology.size());
  for (std::size_t i = 0; i < topology.size(); ++i) {
    auto it = assignment.find(topology.id_at(i));
    if (it == assignment.end()) {
      throw Error(ErrorCode::InvalidArgument,
                  "component " + std::to_string(topology.id_at(i)) + " has no zone assignment");
    }
    zone[i] = it->second;
  }
  for (const auto& [id, z] : assignment) {
    if (!topology.contains(id)) {
      throw Error(ErrorCode::InvalidArgument, "assignment names unknown component " + std::to_string(id));
    }
  }
  return zone;
}

// Mutable k-way assignment over dense indices with per-vertex neighbour
// counts per zone, so cut and neighbouring-zone deltas are local.
class ZoneState {
 public:
  ZoneState(const Topology& topology, int k, int eta)
      : topology_(topology),
        k_(static_cast<std::size_t>(k)),
        limit_(static_cast<std::size_t>(eta) + 1),
        zone_(topology.size(), -1),
        size_(k_, 0),
        count_(topology.size() * k_, 0),
        mark_(topology.size(), 0) {}

  int zone(std::size_t v) const { return zone_[v]; }
  std::size_t size(int z) const { return size_[static_cast<std::size_t>(z)]; }
  int count(std::size_t v, int z) const { return count_[v * k_ + static_cast<std::size_t>(z)]; }
  std::size_t cut() const { return cut_; }
  std::size_t k() const { return k_; }

  void assign(std::size_t v, int z) {
    zone_[v] = z;
    ++size_[static_cast<std::size_t>(z)];
    for (auto u : topology_.neighbors_at(v)) {
      ++count_[u * k_ + static_cast<std::size_t>(z)];
      if (zone_[u] >= 0 && zone_[u] != z) ++cut_;
    }
  }

  void move(std::size_t v, int to) {
    const int from = zone_[v];
    cut_ += static_cast<std::size_t>(count(v, from));
    cut_ -= static_cast<std::size_t>(count(v, to));
    for (auto u : topology_.neighbors_at(v)) {
      --count_[u * k_ + static_cast<std::size_t>(from)];
      ++count_[u * k_ + static_cast<std::size_t>(to)];
    }
    --size_[static_cast<std::size_t>(from)];
    ++size_[static_cast<std::size_t>(to)];
    zone_[v] = to;
  }

  std::size_t foreign_zones(std::size_t v) const {
    std::size_t n = 0;
    for (std::size_t z = 0; z < k_; ++z) {
      if (static_cast<int>(z) != zone_[v] && count_[v * k_ + z] > 0) ++n;
    }
    return n;
  }

  bool boundary(std::size_t v) const { return foreign_zones(v) > 0; }

  std::size_t excess(std::size_t v) const {
    const auto f = foreign_zones(v);
    return f > limit_ ? f - limit_ : 0;
  }

  std::size_t total_excess() const {
    std::size_t e = 0;
    for (std::size_t v = 0; v < zone_.size(); ++v) e += excess(v);
    return e;
  }

  /// Sum of excess over the given vertices and their neighbours, each once.
  std::size_t local_excess(std::initializer_list<std::size_t> centres) {
    ++epoch_;
    std::size_t e = 0;
    auto visit = [&](std::size_t v) {
      if (mark_[v] == epoch_) return;
      mark_[v] = epoch_;
      e += excess(v);
    };
    for (auto c : centres) {
      visit(c);
      for (auto u : topology_.neighbors_at(c)) visit(u);
    }
    return e;
  }

 private:
  const Topology& topology_;
  std::size_t k_;
  std::size_t limit_;
  std::vector<int> zone_;
  std::vector<std::size_t> size_;
  std::vector<int> count_;
  std::vector<std::uint64_t> mark_;
  std::uint64_t epoch_ = 0;
  std::size_t cut_ = 0;
};

struct Candidate {
  std::vector<int> zone;
  std::size_t excess = 0;
  std::size_t cut = 0;
};

class Greedy {
 public:
  Greedy(const Topology& topology, int k, double epsilon, int eta, std::vector<std::size_t> order)
      : topology_(topology), k_(k), eta_(eta), order_(std::move(order)) {
    const std::size_t n = topology.size();
    cap_ = size_cap(n, k, epsilon);
    const std::size_t even = (n + static_cast<std::size_t>(k) - 1) / static_cast<std::size_t>(k);
    // When (1+eps)|V|/k cannot hold every vertex, fall back to near-equal sizes.
    if (cap_ * static_cast<std::size_t>(k) < n) cap_ = even;
  }

  Candidate run(std::size_t first_seed_rank) {
    ZoneState state(topology_, k_, eta_);
    grow(state, order_[first_seed_rank]);
    refine(state);
    Candidate c;
    c.zone.resize(topology_.size());
    for (std::size_t v = 0; v < topology_.size(); ++v) c.zone[v] = state.zone(v);
    c.excess = state.total_excess();
    c.cut = state.cut();
    return c;
  }

 private:
  std::vector<std::size_t> pick_seeds(std::size_t first) const {
    const std::size_t n = topology_.size();
    constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> seeds{first};
    std::vector<std::size_t> dist(n, kUnreached);
    std::vector<std::size_t> queue;
    for (int z = 1; z < k_; ++z) {
      std::fill(dist.begin(), dist.end(), kUnreached);
      queue.clear();
      for (auto s : seeds) {
        dist[s] = 0;
        queue.push_back(s);
      }
      for (std::size_t head = 0; head < queue.size(); ++head) {
        const auto v = queue[head];
        for (auto u : topology_.neighbors_at(v)) {
          if (dist[u] == kUnreached) {
            dist[u] = dist[v] + 1;
            queue.push_back(u);
          }
        }
      }
      std::size_t best = n;
      for (auto v : order_) {
        if (dist[v] == 0) continue;
        if (best == n || dist[v] > dist[best]) best = v;
      }
      seeds.push_back(best);
    }
    return seeds;
  }

  void grow(ZoneState& state, std::size_t first) {
    const auto seeds = pick_seeds(first);
    for (int z = 0; z < k_; ++z) state.assign(seeds[static_cast<std::size_t>(z)], z);
    std::size_t unassigned = topology_.size() - seeds.size();
    std::vector<char> has_frontier(static_cast<std::size_t>(k_));
    while (unassigned > 0) {
      std::fill(has_frontier.begin(), has_frontier.end(), 0);
      for (auto v : order_) {
        if (state.zone(v) >= 0) continue;
        for (int z = 0; z < k_; ++z) {
          if (state.count(v, z) > 0) has_frontier[static_cast<std::size_t>(z)] = 1;
        }
      }
      int chosen = -1;
      bool jump = false;
      for (int z = 0; z < k_; ++z) {
        if (state.size(z) >= cap_ || !has_frontier[static_cast<std::size_t>(z)]) continue;
        if (chosen < 0 || state.size(z) < state.size(chosen)) chosen = z;
      }
      if (chosen < 0) {
        // Region growth is blocked (disconnected graph or full neighbours).
        jump = true;
        for (int z = 0; z < k_; ++z) {
          if (state.size(z) >= cap_) continue;
          if (chosen < 0 || state.size(z) < state.size(chosen)) chosen = z;
        }
      }
      std::size_t pick = topology_.size();
      for (auto v : order_) {
        if (state.zone(v) >= 0) continue;
        if (jump) {
          pick = v;
          break;
        }
        const int c = state.count(v, chosen);
        if (c > 0 && (pick == topology_.size() || c > state.count(pick, chosen))) pick = v;
      }
      state.assign(pick, chosen);
      --unassigned;
    }
  }

  static bool improves(long d_excess, long d_cut) { return d_excess < 0 || (d_excess == 0 && d_cut < 0); }

  void refine(ZoneState& state) {
    std::size_t excess = state.total_excess();
    for (std::size_t pass = 0; pass < kMaxPasses; ++pass) {
      bool improved = false;

      for (auto v : order_) {
        const int from = state.zone(v);
        if (state.size(from) <= 1 || !state.boundary(v)) continue;
        int best_zone = -1;
        long best_de = 0;
        long best_dc = 0;
        for (int to = 0; to < k_; ++to) {
          if (to == from || state.count(v, to) == 0 || state.size(to) + 1 > cap_) continue;
          const long dc = static_cast<long>(state.count(v, from)) - state.count(v, to);
          if (excess == 0 && dc >= 0) continue;
          const auto before_e = state.local_excess({v});
          state.move(v, to);
          const long de = static_cast<long>(state.local_excess({v})) - static_cast<long>(before_e);
          state.move(v, from);
          if (!improves(de, dc)) continue;
          if (best_zone < 0 || de < best_de || (de == best_de && dc < best_dc)) {
            best_zone = to;
            best_de = de;
            best_dc = dc;
          }
        }
        if (best_zone >= 0) {
          state.move(v, best_zone);
          excess = static_cast<std::size_t>(static_cast<long>(excess) + best_de);
          improved = true;
        }
      }

      for (std::size_t i = 0; i < order_.size(); ++i) {
        const auto u = order_[i];
        for (std::size_t j = i + 1; j < order_.size(); ++j) {
          const auto v = order_[j];
          const int a = state.zone(u);
          const int b = state.zone(v);
          if (a == b) continue;
          if (state.count(u, b) == 0 && state.count(v, a) == 0) continue;
          const long adj = topology_.adjacent(topology_.id_at(u), topology_.id_at(v)) ? 1 : 0;
          const long reduction = (static_cast<long>(state.count(u, b)) - state.count(u, a)) +
                                 (static_cast<long>(state.count(v, a)) - state.count(v, b)) - 2 * adj;
          const long dc = -reduction;
          if (excess == 0 && dc >= 0) continue;
          const auto before_e = state.local_excess({u, v});
          state.move(u, b);
          state.move(v, a);
          const long de = static_cast<long>(state.local_excess({u, v})) - static_cast<long>(before_e);
          if (improves(de, dc)) {
            excess = static_cast<std::size_t>(static_cast<long>(excess) + de);
            improved = true;
          } else {
            state.move(v, b);
            state.move(u, a);
          }
        }
      }

      if (!improved) break;
    }
  }

  const Topology& topology_;
  int k_;
  int eta_;
  std::vector<std::size_t> order_;
  std::size_t cap_ = 0;
};

}  // namespace

double zone_size_bound(std::size_t vertices, int k, double epsilon) {
  return (1.0 + epsilon) * static_cast<double>(vertices) / static_cast<double>(k);
}

std::size_t edge_cut(const Topology& topology, const ZoneAssignment& assignment) {
  const auto zone = dense_zones(topology, assignment);
  std::size_t cut = 0;
  for (const auto& e : topology.edges()) {
    if (zone[topology.index_of(e.u)] != zone[topology.index_of(e.v)]) ++cut;
  }
  return cut;
}

ZoneSets compute_boundaries(const Topology& topology, const ZoneAssignment& assignment) {
  const auto zone = dense_zones(topology, assignment);
  ZoneSets boundaries;
  for (const auto& [id, z] : assignment) boundaries[z];
  for (std::size_t v = 0; v < topology.size(); ++v) {
    for (auto u : topology.neighbors_at(v)) {
      if (zone[u] != zone[v]) {
        boundaries[zone[v]].push_back(topology.id_at(v));
        break;
      }
    }
  }
  return boundaries;
}

ConstraintReport validate_scheme(const Topology& topology, const PartitionScheme& scheme, NeighborRule rule) {
  const auto zone = dense_zones(topology, scheme.assignment);
  ConstraintReport report;

  const double bound = zone_size_bound(topology.size(), scheme.k, scheme.epsilon);
  std::map<ZoneId, std::size_t> sizes;
  for (auto z : zone) ++sizes[z];
  for (const auto& [z, size] : sizes) {
    if (static_cast<double>(size) > bound + 1e-9) report.size_violations.push_back({z, size, bound});
  }

  const std::size_t limit = static_cast<std::size_t>(scheme.eta) + 1;
  std::map<ZoneId, std::vector<ZoneId>> zone_neighbors;
  for (std::size_t v = 0; v < topology.size(); ++v) {
    std::vector<ZoneId> foreign;
    for (auto u : topology.neighbors_at(v)) {
      if (zone[u] != zone[v]) foreign.push_back(zone[u]);
    }
    std::sort(foreign.begin(), foreign.end());
    foreign.erase(std::unique(foreign.begin(), foreign.end()), foreign.end());
    if (rule == NeighborRule::PerVertex) {
      if (foreign.size() > limit) report.neighbor_violations.push_back({topology.id_at(v), foreign.size(), limit});
    } else {
      auto& acc = zone_neighbors[zone[v]];
      acc.insert(acc.end(), foreign.begin(), foreign.end());
    }
  }
  for (auto& [z, foreign] : zone_neighbors) {
    std::sort(foreign.begin(), foreign.end());
    foreign.erase(std::unique(foreign.begin(), foreign.end()), foreign.end());
    if (foreign.size() > limit) report.zone_neighbor_violations.push_back({z, foreign.size(), limit});
  }

  report.feasible = report.size_violations.empty() && report.neighbor_violations.empty() &&
                    report.zone_neighbor_violations.empty();
  return report;
}

PartitionScheme make_scheme(const Topology& topology, ZoneAssignment assignment, int k, double epsilon, int eta) {
  PartitionScheme scheme;
  scheme.k = k;
  scheme.epsilon = epsilon;
  scheme.eta = eta;
  scheme.assignment = std::move(assignment);
  scheme.cut = edge_cut(topology, scheme.assignment);
  scheme.boundaries = compute_boundaries(topology, scheme.assignment);
  for (const auto& [id, z] : scheme.assignment) scheme.members[z].push_back(id);
  scheme.report = validate_scheme(topology, scheme);
  return scheme;
}

PartitionScheme build_zones(const Topology& topology, int k, double epsilon, int eta, std::uint64_t seed) {
  std::vector<ComponentId> ids;
  ids.reserve(topology.size());
  for (const auto& c : topology.components()) ids.push_back(c.id);
  return build_zones(topology, k, epsilon, eta, seed, ids);
}

PartitionScheme build_zones(const Topology& topology, int k, double epsilon, int eta, std::uint64_t seed,
                            std::span<const ComponentId> priority) {
  check_partition_args(topology, k, epsilon, eta);
  if (priority.size() != topology.size()) {
    throw Error(ErrorCode::InvalidArgument, "priority order must list every component once");
  }
  std::vector<std::size_t> order;
  std::vector<char> seen(topology.size(), 0);
  for (auto id : priority) {
    const auto idx = topology.index_of(id);
    if (seen[idx]) throw Error(ErrorCode::InvalidArgument, "priority order repeats component " + std::to_string(id));
    seen[idx] = 1;
    order.push_back(idx);
  }

  Greedy greedy(topology, k, epsilon, eta, std::move(order));
  Rng rng(seed);
  std::optional<Candidate> best;
  const std::size_t restarts = std::min(kRestarts, topology.size());
  for (std::size_t r = 0; r < restarts; ++r) {
    auto c = greedy.run(rng.below(topology.size()));
    if (!best || c.excess < best->excess || (c.excess == best->excess && c.cut < best->cut)) best = std::move(c);
  }

  ZoneAssignment assignment;
  for (std::size_t v = 0; v < topology.size(); ++v) assignment.emplace(topology.id_at(v), best->zone[v]);
  return make_scheme(topology, std::move(assignment), k, epsilon, eta);
}

PartitionScheme brute_force_partition(const Topology& topology, int k, double epsilon, int eta) {
  const std::size_t n = topology.size();
  if (n > kBruteForceLimit) {
    throw Error(ErrorCode::TooLarge, "exhaustive partitioning is limited to " + std::to_string(kBruteForceLimit) +
                                         " vertices, got " + std::to_string(n));
  }
  check_partition_args(topology, k, epsilon, eta);
  const std::size_t cap = size_cap(n, k, epsilon);
  const std::size_t limit = static_cast<std::size_t>(eta) + 1;

  std::vector<int> zone(n, -1);
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
  std::vector<int> best;
  std::size_t best_cut = std::numeric_limits<std::size_t>::max();

  auto foreign_ok = [&](std::size_t v) {
    std::uint32_t mask = 0;
    for (auto u : topology.neighbors_at(v)) {
      if (zone[u] >= 0 && zone[u] != zone[v]) mask |= 1u << zone[u];
    }
    return static_cast<std::size_t>(std::popcount(mask)) <= limit;
  };

  // Restricted-growth enumeration visits each set partition once, in
  // lexicographic order of its canonical labelling.
  auto search = [&](auto&& self, std::size_t v, int used, std::size_t cut) -> void {
    if (cut >= best_cut) return;
    if (v == n) {
      if (used == k) {
        best_cut = cut;
        best = zone;
      }
      return;
    }
    if (static_cast<int>(n - v) < k - used) return;
    const int top = std::min(used, k - 1);
    for (int z = 0; z <= top; ++z) {
      if (sizes[static_cast<std::size_t>(z)] + 1 > cap) continue;
      zone[v] = z;
      std::size_t added = 0;
      for (auto u : topology.neighbors_at(v)) {
        if (u < v && zone[u] != z) ++added;
      }
      bool ok = foreign_ok(v);
      for (auto u : topology.neighbors_at(v)) {
        if (!ok) break;
        if (u < v) ok = foreign_ok(u);
      }
      if (ok) {
        ++sizes[static_cast<std::size_t>(z)];
        self(self, v + 1, std::max(used, z + 1), cut + added);
        --sizes[static_cast<std::size_t>(z)];
      }
      zone[v] = -1;
    }
  };
  search(search, 0, 0, 0);

  if (best.empty()) {
    throw Error(ErrorCode::Infeasible, "no assignment into " + std::to_string(k) +
                                           " zones satisfies the size and neighbouring-zone constraints");
  }
  ZoneAssignment assignment;
  for (std::size_t v = 0; v < n; ++v) assignment.emplace(topology.id_at(v), best[v]);
  return make_scheme(topology, std::move(assignment), k, epsilon, eta);
}

// --- file format -----------------------------------------------------------------

void write_partition(std::ostream& out, const PartitionScheme& scheme) {
  out << "# k=" << scheme.k << " epsilon=" << scheme.epsilon << " eta=" << scheme.eta << " cut=" << scheme.cut
      << '\n';
  for (const auto& [id, z] : scheme.assignment) out << id << ' ' << z << '\n';
}

PartitionScheme parse_partition(std::istream& in, const Topology& topology, std::string_view source) {
  std::optional<int> k;
  std::optional<int> eta;
  std::optional<double> epsilon;
  std::optional<std::size_t> cut;
  ZoneAssignment assignment;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& msg) {
    return Error(ErrorCode::Parse, std::string(source) + ":" + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "#") {
      std::string field;
      while (ls >> field) {
        const auto eq = field.find('=');
        if (eq == std::string::npos) continue;
        const auto key = field.substr(0, eq);
        const auto value = field.substr(eq + 1);
        try {
          if (key == "k") k = std::stoi(value);
          else if (key == "epsilon") epsilon = std::stod(value);
          else if (key == "eta") eta = std::stoi(value);
          else if (key == "cut") cut = static_cast<std::size_t>(std::stoul(value));
        } catch (const std::exception&) {
          throw fail("malformed header field '" + field + "'");
        }
      }
      continue;
    }
    if (first.front() == '#') continue;
    long long id = 0;
    long long z = 0;
    std::string extra;
    try {
      id = std::stoll(first);
    } catch (const std::exception&) {
      throw fail("non-integer component id '" + first + "'");
    }
    if (!(ls >> z) || (ls >> extra) || id < 0 || z < 0) throw fail("expected 'component_id zone_id'");
    if (!assignment.emplace(static_cast<ComponentId>(id), static_cast<ZoneId>(z)).second) {
      throw fail("component " + std::to_string(id) + " assigned twice");
    }
  }
  if (!k) {
    std::set<ZoneId> zones;
    for (const auto& [id, z] : assignment) zones.insert(z);
    k = static_cast<int>(zones.size());
  }
  auto scheme = make_scheme(topology, std::move(assignment), *k, epsilon.value_or(kDefaultEpsilon),
                            eta.value_or(kDefaultEta));
  if (cut && *cut != scheme.cut) {
    throw Error(ErrorCode::Invariant, std::string(source) + ": header cut " + std::to_string(*cut) +
                                          " disagrees with the recomputed cut " + std::to_string(scheme.cut));
  }
  return scheme;
}

void save_partition(const PartitionScheme& scheme, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  write_partition(out, scheme);
}

PartitionScheme load_partition(const std::filesystem::path& path, const Topology& topology) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  return parse_partition(in, topology, path.string());
}

}  // namespace pzc
