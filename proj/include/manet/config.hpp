#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "manet/mobility.hpp"
#include "manet/reputation.hpp"
#include "manet/types.hpp"

namespace manet {

enum class Variant : std::uint8_t { PDSR, MDSR, FGMDSR };
enum class Placement : std::uint8_t { Grid };
enum class MobilityModel : std::uint8_t { None, RandomWaypoint };

[[nodiscard]] const char* to_string(Variant v);
[[nodiscard]] Variant parse_variant(std::string_view text);  ///< throws InvalidConfig

struct BehaviorProfile {
  enum class Kind : std::uint8_t { Honest, Selfish };
  Kind kind = Kind::Honest;
  double data_drop_prob = 0.0;
  bool participates_in_control = true;

  [[nodiscard]] static BehaviorProfile honest() { return {}; }
  [[nodiscard]] static BehaviorProfile selfish(double drop_prob = 1.0) {
    return {Kind::Selfish, drop_prob, true};
  }
  friend bool operator==(const BehaviorProfile&, const BehaviorProfile&) = default;
};

struct TrafficConfig {
  std::uint32_t flow_count = 10;
  double packet_interval = 0.25;  ///< s, 4 packets/s per flow
  std::uint32_t packet_size = 512;  ///< bytes; informational, the MAC is abstracted

  friend bool operator==(const TrafficConfig&, const TrafficConfig&) = default;
};

struct SimConfig {
  double sim_time = 900.0;  ///< s
  Vec2 terrain{1250.0, 1250.0};
  std::uint32_t node_count = 121;
  Placement placement = Placement::Grid;
  MobilityModel mobility = MobilityModel::RandomWaypoint;
  double wp_pause = 30.0;
  double v_min = 0.0;
  double v_max = 10.0;
  double granularity = 0.5;
  bool promiscuous = true;
  double radio_range = 125.227;
  double protected_window = 60.0;
  double normal_window = 120.0;
  Variant variant = Variant::MDSR;
  double selfish_fraction = 0.0;
  double selfish_drop_prob = 1.0;
  double grade_threshold = 0.5;
  PunishmentConfig punishment;
  std::uint32_t group_count = 4;
  TrafficConfig traffic;
  double forward_timeout = 0.1;  ///< s an observer waits for an overheard forward
  std::uint64_t seed = 1;

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

[[nodiscard]] MobilityParams mobility_params(const SimConfig& config);

/// Throws InvalidConfig on the first violated invariant.
void validate(const SimConfig& config);

/// Parses uppercase `KEY VALUE` lines; `#` starts a comment. Absent keys keep
/// their defaults. Throws UnknownKey / MalformedValue with the line number.
[[nodiscard]] SimConfig parse_config(std::string_view text);

/// Applies one KEY VALUE pair (used by the parser and by command-line sweeps).
void apply_config_value(SimConfig& config, std::string_view key, std::string_view value, int line = 0);

/// Renders every configurable field; parse_config(render_config(c)) == c.
[[nodiscard]] std::string render_config(const SimConfig& config);

/// Parses "15M", "30S", "0.25" (seconds).
[[nodiscard]] double parse_duration(std::string_view text, int line = 0);

}  // namespace manet
