#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "pzc/topology.hpp"

namespace pzc {

using ZoneId = int;

/// Component -> protection-zone ("pz_component_list").
using ZoneAssignment = std::map<ComponentId, ZoneId>;
using ZoneSets = std::map<ZoneId, std::vector<ComponentId>>;

inline constexpr double kDefaultEpsilon = 0.1;
inline constexpr int kDefaultEta = 1;
inline constexpr std::size_t kBruteForceLimit = 14;

struct SizeViolation {
  ZoneId zone = 0;
  std::size_t size = 0;
  double bound = 0.0;
};

struct NeighborViolation {
  ComponentId vertex = 0;
  std::size_t foreign_zones = 0;
  std::size_t bound = 0;
};

struct ZoneNeighborViolation {
  ZoneId zone = 0;
  std::size_t foreign_zones = 0;
  std::size_t bound = 0;
};

/// How the neighbouring-zone limit 1+eta is counted.
enum class NeighborRule {
  PerVertex,  // foreign zones adjacent to one vertex
  PerZone,    // foreign zones adjacent to any vertex of the zone
};

struct ConstraintReport {
  std::vector<SizeViolation> size_violations;
  std::vector<NeighborViolation> neighbor_violations;
  std::vector<ZoneNeighborViolation> zone_neighbor_violations;  // PerZone rule only
  bool feasible = true;
};

struct PartitionScheme {
  int k = 1;
  double epsilon = kDefaultEpsilon;
  int eta = kDefaultEta;
  ZoneAssignment assignment;
  ZoneSets members;
  ZoneSets boundaries;  // "pz_boundary_set"
  std::size_t cut = 0;
  ConstraintReport report;

  std::optional<ZoneId> zone_of(ComponentId id) const {
    auto it = assignment.find(id);
    if (it == assignment.end()) return std::nullopt;
    return it->second;
  }
};

/// Upper bound (1+epsilon)|V|/k on zone sizes.
double zone_size_bound(std::size_t vertices, int k, double epsilon);

/// Number of edges whose endpoints lie in different zones.
std::size_t edge_cut(const Topology& topology, const ZoneAssignment& assignment);

/// Per zone, the members having at least one neighbour in another zone. Every
/// zone present in the assignment gets an entry, possibly empty.
ZoneSets compute_boundaries(const Topology& topology, const ZoneAssignment& assignment);

/// Reports (never throws on) size and neighbouring-zone violations.
ConstraintReport validate_scheme(const Topology& topology, const PartitionScheme& scheme,
                                 NeighborRule rule = NeighborRule::PerVertex);

/// Fills members, boundaries, cut and report from an assignment.
PartitionScheme make_scheme(const Topology& topology, ZoneAssignment assignment, int k, double epsilon, int eta);

/// Greedy balanced k-way partitioning: seeded region growing followed by
/// boundary moves and swaps that never break a satisfied constraint.
PartitionScheme build_zones(const Topology& topology, int k, double epsilon = kDefaultEpsilon,
                            int eta = kDefaultEta, std::uint64_t seed = 1);

/// Same algorithm with an explicit vertex priority: every tie that would fall
/// to the lowest id falls instead to the earliest entry of `priority`, and
/// seed draws index into it. `priority` must be a permutation of the ids.
PartitionScheme build_zones(const Topology& topology, int k, double epsilon, int eta, std::uint64_t seed,
                            std::span<const ComponentId> priority);

/// Exhaustive search for the minimum-cut assignment satisfying both
/// constraints with exactly k non-empty zones. Ties go to the
/// lexicographically smallest assignment in id order. Throws TooLarge above
/// kBruteForceLimit vertices and Infeasible when nothing qualifies.
PartitionScheme brute_force_partition(const Topology& topology, int k, double epsilon = kDefaultEpsilon,
                                      int eta = kDefaultEta);

/// Scheme file: header "# k=.. epsilon=.. eta=.. cut=.." then "component zone" lines.
void write_partition(std::ostream& out, const PartitionScheme& scheme);
PartitionScheme parse_partition(std::istream& in, const Topology& topology, std::string_view source = "<stream>");
void save_partition(const PartitionScheme& scheme, const std::filesystem::path& path);
PartitionScheme load_partition(const std::filesystem::path& path, const Topology& topology);

}  // namespace pzc
