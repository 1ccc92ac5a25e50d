#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pzc/topology.hpp"

namespace fixtures {

using pzc::Component;
using pzc::ComponentId;
using pzc::ComponentKind;
using pzc::Edge;
using pzc::Topology;

inline std::vector<Component> meters(ComponentId first, ComponentId last) {
  std::vector<Component> out;
  for (ComponentId i = first; i <= last; ++i) out.push_back({i, ComponentKind::SmartMeter});
  return out;
}

// Ids 1..n.
inline Topology path(ComponentId n) {
  std::vector<Edge> edges;
  for (ComponentId i = 1; i < n; ++i) edges.push_back({i, i + 1});
  return Topology(meters(1, n), edges);
}

inline Topology cycle(ComponentId n) {
  std::vector<Edge> edges;
  for (ComponentId i = 1; i < n; ++i) edges.push_back({i, i + 1});
  edges.push_back({1, n});
  return Topology(meters(1, n), edges);
}

inline Topology complete(ComponentId n) {
  std::vector<Edge> edges;
  for (ComponentId i = 1; i <= n; ++i) {
    for (ComponentId j = i + 1; j <= n; ++j) edges.push_back({i, j});
  }
  return Topology(meters(1, n), edges);
}

// Centre 0, leaves 1..leaves.
inline Topology star(ComponentId leaves) {
  std::vector<Edge> edges;
  for (ComponentId i = 1; i <= leaves; ++i) edges.push_back({0, i});
  return Topology(meters(0, leaves), edges);
}

// Row-major ids 0..rows*cols-1.
inline Topology grid(ComponentId rows, ComponentId cols) {
  std::vector<Edge> edges;
  for (ComponentId r = 0; r < rows; ++r) {
    for (ComponentId c = 0; c < cols; ++c) {
      const ComponentId v = r * cols + c;
      if (c + 1 < cols) edges.push_back({v, v + 1});
      if (r + 1 < rows) edges.push_back({v, v + cols});
    }
  }
  return Topology(meters(0, rows * cols - 1), edges);
}

// Erdos-Renyi G(n, p) on ids 0..n-1.
inline Topology random_graph(ComponentId n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Edge> edges;
  for (ComponentId i = 0; i < n; ++i) {
    for (ComponentId j = i + 1; j < n; ++j) {
      if (static_cast<double>(rng() >> 11) * 0x1.0p-53 < p) edges.push_back({i, j});
    }
  }
  return Topology(meters(0, n - 1), edges);
}

struct Named {
  std::string name;
  Topology topology;
};

// Twenty-plus small graphs used by the partition oracle checks.
inline std::vector<Named> small_suite() {
  std::vector<Named> out;
  for (ComponentId n : {4u, 6u, 8u, 10u, 12u}) out.push_back({"path" + std::to_string(n), path(n)});
  for (ComponentId n : {4u, 6u, 9u, 12u}) out.push_back({"cycle" + std::to_string(n), cycle(n)});
  for (ComponentId n : {4u, 7u, 11u}) out.push_back({"star" + std::to_string(n), star(n)});
  out.push_back({"grid2x3", grid(2, 3)});
  out.push_back({"grid3x3", grid(3, 3)});
  out.push_back({"grid3x4", grid(3, 4)});
  out.push_back({"k4", complete(4)});
  out.push_back({"k6", complete(6)});
  for (std::uint64_t s = 1; s <= 6; ++s) {
    out.push_back({"random10_" + std::to_string(s), random_graph(10, 0.35, s)});
    out.push_back({"random12_" + std::to_string(s), random_graph(12, 0.25, 100 + s)});
  }
  return out;
}

}  // namespace fixtures
