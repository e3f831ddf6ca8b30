#pragma once

// Unit-disk radio: i and j hear each other iff their distance is within range.

#include <span>
#include <vector>

#include "manet/types.hpp"

namespace manet {

/// Sorted neighbor list per node.
using Adjacency = std::vector<std::vector<NodeId>>;

[[nodiscard]] bool in_range(Vec2 a, Vec2 b, double radio_range);

/// Reference O(N^2) kernel.
[[nodiscard]] Adjacency neighbors_serial(std::span<const Vec2> positions, double radio_range);

/// OpenMP row-parallel kernel; identical output to neighbors_serial.
[[nodiscard]] Adjacency neighbors_parallel(std::span<const Vec2> positions, double radio_range);

/// Dispatches to the parallel kernel for networks large enough to benefit.
[[nodiscard]] Adjacency neighbors(std::span<const Vec2> positions, double radio_range);

[[nodiscard]] bool are_adjacent(const Adjacency& adj, NodeId a, NodeId b);

}  // namespace manet
