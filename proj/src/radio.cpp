#include "manet/radio.hpp"

#include <algorithm>

namespace manet {

namespace {

constexpr std::size_t kParallelThreshold = 256;

void fill_row(std::span<const Vec2> positions, double range_sq, std::size_t i, std::vector<NodeId>& row) {
  row.clear();
  const Vec2 p = positions[i];
  for (std::size_t j = 0; j < positions.size(); ++j) {
    if (j == i) {
      continue;
    }
    const double dx = positions[j].x - p.x;
    const double dy = positions[j].y - p.y;
    if (dx * dx + dy * dy <= range_sq) {
      row.push_back(static_cast<NodeId>(j));
    }
  }
}

}  // namespace

bool in_range(Vec2 a, Vec2 b, double radio_range) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy <= radio_range * radio_range;
}

Adjacency neighbors_serial(std::span<const Vec2> positions, double radio_range) {
  Adjacency adj(positions.size());
  const double range_sq = radio_range * radio_range;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    fill_row(positions, range_sq, i, adj[i]);
  }
  return adj;
}

Adjacency neighbors_parallel(std::span<const Vec2> positions, double radio_range) {
  Adjacency adj(positions.size());
  const double range_sq = radio_range * radio_range;
  const auto n = static_cast<std::ptrdiff_t>(positions.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    fill_row(positions, range_sq, static_cast<std::size_t>(i), adj[static_cast<std::size_t>(i)]);
  }
  return adj;
}

Adjacency neighbors(std::span<const Vec2> positions, double radio_range) {
  return positions.size() >= kParallelThreshold ? neighbors_parallel(positions, radio_range)
                                                : neighbors_serial(positions, radio_range);
}

bool are_adjacent(const Adjacency& adj, NodeId a, NodeId b) {
  if (a >= adj.size()) {
    return false;
  }
  const auto& row = adj[a];
  return std::binary_search(row.begin(), row.end(), b);
}

}  // namespace manet
