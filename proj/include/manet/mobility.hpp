#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "manet/types.hpp"

namespace manet {

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) built from the top 53 bits, so draws are
/// identical across standard library implementations.
[[nodiscard]] double uniform01(Rng& rng);
[[nodiscard]] double uniform(Rng& rng, double lo, double hi);
[[nodiscard]] std::uint64_t uniform_index(Rng& rng, std::uint64_t n);

/// Independent deterministic stream for (seed, stream, index).
[[nodiscard]] Rng make_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0);

/// m x m lattice with spacing side/(m-1), row-major from the (0,0) corner.
/// Throws NotASquare unless node_count = m^2 with m >= 2.
[[nodiscard]] std::vector<Vec2> place_grid(std::uint32_t node_count, Vec2 terrain);

struct MobilityParams {
  Vec2 terrain{1250.0, 1250.0};
  double pause = 30.0;        ///< s
  double v_min = 0.0;         ///< m/s
  double v_max = 10.0;        ///< m/s
  double granularity = 0.5;   ///< m
};

/// Random waypoint state of one node. `position` is what the radio sees; it
/// advances along a leg in granularity-sized steps.
struct WaypointState {
  Vec2 position;
  Vec2 leg_start;
  Vec2 target;
  double speed = 0.0;
  double travelled = 0.0;        ///< exact distance covered on the current leg
  double pause_remaining = 0.0;
  bool moving = false;

  friend bool operator==(const WaypointState&, const WaypointState&) = default;
};

/// Node resting at `at`, about to pause before its first leg.
[[nodiscard]] WaypointState initial_waypoint_state(Vec2 at, const MobilityParams& params);

/// Advances one node by dt seconds (dt > 0): move toward the waypoint, pause on
/// arrival, then draw a uniform waypoint in the terrain and a uniform speed in
/// [v_min, v_max]. With v_max == 0 the node never moves.
[[nodiscard]] WaypointState step_random_waypoint(WaypointState state, double dt, const MobilityParams& params,
                                                 Rng& rng);

// Whole-network step. Each node owns its RNG stream, so the parallel kernel
// produces exactly the serial result.
void advance_all_serial(std::span<WaypointState> states, std::span<Rng> rngs, double dt,
                        const MobilityParams& params);
void advance_all_parallel(std::span<WaypointState> states, std::span<Rng> rngs, double dt,
                          const MobilityParams& params);

}  // namespace manet
