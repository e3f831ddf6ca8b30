#include "manet/groups.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace manet {

std::size_t GroupAssignment::border_count() const {
  return static_cast<std::size_t>(std::count(is_border.begin(), is_border.end(), true));
}

std::vector<std::size_t> GroupAssignment::group_sizes() const {
  std::vector<std::size_t> sizes(k, 0);
  for (auto g : group_of) {
    ++sizes[g];
  }
  return sizes;
}

GroupAssignment partition(std::span<const Vec2> positions, Vec2 terrain, std::uint32_t k,
                          const Adjacency& adjacency) {
  const auto side = static_cast<std::uint32_t>(std::llround(std::sqrt(static_cast<double>(k))));
  if (k < 1 || side * side != k) {
    throw UnsupportedK("group count must be a perfect square, got " + std::to_string(k));
  }
  GroupAssignment out;
  out.k = k;
  out.group_of.resize(positions.size());
  out.is_border.assign(positions.size(), false);

  const double cell_x = terrain.x / side;
  const double cell_y = terrain.y / side;
  auto cell = [side](double v, double extent) {
    if (extent <= 0.0) {
      return 0U;
    }
    const auto c = static_cast<long long>(std::floor(v / extent));
    return static_cast<std::uint32_t>(std::clamp<long long>(c, 0, side - 1));
  };
  for (std::size_t i = 0; i < positions.size(); ++i) {
    out.group_of[i] = cell(positions[i].y, cell_y) * side + cell(positions[i].x, cell_x);
  }
  for (std::size_t i = 0; i < positions.size() && i < adjacency.size(); ++i) {
    for (NodeId j : adjacency[i]) {
      if (out.group_of[j] != out.group_of[i]) {
        out.is_border[i] = true;
        break;
      }
    }
  }
  return out;
}

FloodChannels flood_channels(const GroupAssignment& groups, NodeId sender, NodeId source, NodeId destination) {
  const auto gx = groups.group(sender);
  const auto gd = groups.group(destination);
  FloodChannels ch;
  ch.intra = gx == groups.group(source) || gx == gd;
  ch.border = groups.border(sender) && gx != gd;
  return ch;
}

bool scope_flood(const GroupAssignment& groups, const Adjacency& adjacency, NodeId sender, NodeId receiver,
                 NodeId destination, Channel channel) {
  const auto gr = groups.group(receiver);
  if (channel == Channel::Intra) {
    return gr == groups.group(sender);
  }
  if (!groups.border(receiver) || gr == groups.group(sender)) {
    return false;
  }
  const auto gd = groups.group(destination);
  if (gr == gd) {
    return true;
  }
  const auto& row = adjacency[receiver];
  return std::any_of(row.begin(), row.end(), [&](NodeId n) { return groups.group(n) == gd; });
}

double overhead_ratio_model(std::uint64_t node_count, std::uint32_t k) {
  if (node_count < 1 || k < 1) {
    throw UnsupportedK("overhead model needs N >= 1 and k >= 1");
  }
  const double n = static_cast<double>(node_count);
  return (n * n / k) / (n * n);
}

}  // namespace manet
