#include "manet/mobility.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace manet {

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  // rejection keeps the draw unbiased
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x = 0;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

Rng make_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  // splitmix64 finalizer over the triple; seed_seq output is implementation-defined
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return Rng(mix(mix(mix(seed) ^ stream) ^ index));
}

std::vector<Vec2> place_grid(std::uint32_t node_count, Vec2 terrain) {
  const auto m = static_cast<std::uint32_t>(std::llround(std::sqrt(static_cast<double>(node_count))));
  if (m < 2 || m * m != node_count) {
    throw NotASquare("grid placement needs a perfect square of at least 4 nodes, got " +
                     std::to_string(node_count));
  }
  const double dx = terrain.x / static_cast<double>(m - 1);
  const double dy = terrain.y / static_cast<double>(m - 1);
  std::vector<Vec2> positions;
  positions.reserve(node_count);
  for (std::uint32_t i = 0; i < m; ++i) {
    for (std::uint32_t j = 0; j < m; ++j) {
      positions.push_back({dx * i, dy * j});
    }
  }
  return positions;
}

WaypointState initial_waypoint_state(Vec2 at, const MobilityParams& params) {
  WaypointState s;
  s.position = at;
  s.leg_start = at;
  s.target = at;
  s.pause_remaining = params.v_max > 0.0 ? params.pause : std::numeric_limits<double>::infinity();
  return s;
}

namespace {

Vec2 point_on_leg(const WaypointState& s, double distance) {
  const double lx = s.target.x - s.leg_start.x;
  const double ly = s.target.y - s.leg_start.y;
  const double len = std::hypot(lx, ly);
  if (len <= 0.0) {
    return s.target;
  }
  return {s.leg_start.x + lx * distance / len, s.leg_start.y + ly * distance / len};
}

}  // namespace

WaypointState step_random_waypoint(WaypointState s, double dt, const MobilityParams& params, Rng& rng) {
  double remaining = dt;
  while (remaining > 0.0) {
    if (!s.moving) {
      if (s.pause_remaining > remaining) {
        s.pause_remaining -= remaining;
        break;
      }
      remaining -= s.pause_remaining;
      s.pause_remaining = 0.0;
      if (params.v_max <= 0.0) {
        s.pause_remaining = std::numeric_limits<double>::infinity();
        break;
      }
      s.leg_start = s.target;
      s.target = {uniform(rng, 0.0, params.terrain.x), uniform(rng, 0.0, params.terrain.y)};
      s.speed = uniform(rng, params.v_min, params.v_max);
      s.travelled = 0.0;
      if (s.speed <= 0.0) {
        // zero-speed draw: stay put for one more pause
        s.target = s.leg_start;
        s.pause_remaining = params.pause > 0.0 ? params.pause : remaining;
        continue;
      }
      s.moving = true;
    }
    const double leg = std::hypot(s.target.x - s.leg_start.x, s.target.y - s.leg_start.y);
    const double to_arrival = (leg - s.travelled) / s.speed;
    if (to_arrival <= remaining) {
      remaining -= to_arrival;
      s.travelled = leg;
      s.moving = false;
      s.pause_remaining = params.pause;
      s.position = s.target;
      if (params.pause <= 0.0 && remaining > 0.0) {
        continue;
      }
    } else {
      s.travelled += s.speed * remaining;
      remaining = 0.0;
    }
  }
  if (s.moving) {
    const double g = params.granularity;
    const double quantized = g > 0.0 ? std::floor(s.travelled / g) * g : s.travelled;
    s.position = point_on_leg(s, quantized);
  }
  return s;
}

void advance_all_serial(std::span<WaypointState> states, std::span<Rng> rngs, double dt,
                        const MobilityParams& params) {
  for (std::size_t i = 0; i < states.size(); ++i) {
    states[i] = step_random_waypoint(states[i], dt, params, rngs[i]);
  }
}

void advance_all_parallel(std::span<WaypointState> states, std::span<Rng> rngs, double dt,
                          const MobilityParams& params) {
  const auto n = static_cast<std::ptrdiff_t>(states.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    states[i] = step_random_waypoint(states[i], dt, params, rngs[i]);
  }
}

}  // namespace manet
