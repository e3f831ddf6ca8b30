#pragma once

// Friendly groups: a static spatial partition of the terrain into k equal
// rectangles. Nodes with a neighbor in another group form the border group,
// which relays route requests between groups on a second logical channel.

#include <cstdint>
#include <span>
#include <vector>

#include "manet/radio.hpp"
#include "manet/types.hpp"

namespace manet {

struct GroupAssignment {
  std::uint32_t k = 1;
  std::vector<std::uint32_t> group_of;
  std::vector<bool> is_border;

  [[nodiscard]] std::uint32_t group(NodeId n) const { return group_of[n]; }
  [[nodiscard]] bool border(NodeId n) const { return is_border[n]; }
  [[nodiscard]] std::size_t border_count() const;
  [[nodiscard]] std::vector<std::size_t> group_sizes() const;
};

/// Splits the terrain into sqrt(k) x sqrt(k) rectangles. Throws UnsupportedK
/// unless k is a perfect square >= 1.
[[nodiscard]] GroupAssignment partition(std::span<const Vec2> positions, Vec2 terrain, std::uint32_t k,
                                        const Adjacency& adjacency);

enum class Channel : std::uint8_t { Intra, Border };

struct FloodChannels {
  bool intra = false;
  bool border = false;
};

/// Channels on which `sender` relays a request from `source` to `destination`:
/// the intra-group channel inside the source and destination groups, and the
/// border channel from border nodes while the destination lies outside the
/// sender's group.
[[nodiscard]] FloodChannels flood_channels(const GroupAssignment& groups, NodeId sender, NodeId source,
                                           NodeId destination);

/// Whether `receiver` accepts a request relayed by `sender` on `channel`.
/// Intra: same group as the sender. Border: a border node of another group
/// that is either in the destination's group or adjacent to it.
[[nodiscard]] bool scope_flood(const GroupAssignment& groups, const Adjacency& adjacency, NodeId sender,
                               NodeId receiver, NodeId destination, Channel channel);

/// Predicted FGMDSR:MDSR control overhead, (N^2/k) / N^2.
[[nodiscard]] double overhead_ratio_model(std::uint64_t node_count, std::uint32_t k);

}  // namespace manet
