#include "manet/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

namespace manet {

const char* to_string(Variant v) {
  switch (v) {
    case Variant::PDSR: return "PDSR";
    case Variant::MDSR: return "MDSR";
    case Variant::FGMDSR: return "FGMDSR";
  }
  return "?";
}

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void malformed(std::string_view key, std::string_view value, int line) {
  throw MalformedValue("malformed value '" + std::string(value) + "' for " + std::string(key), line);
}

double parse_real(std::string_view key, std::string_view value, int line) {
  double out = 0.0;
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end || !std::isfinite(out)) {
    malformed(key, value, line);
  }
  return out;
}

std::uint64_t parse_uint(std::string_view key, std::string_view value, int line) {
  std::uint64_t out = 0;
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    malformed(key, value, line);
  }
  return out;
}

std::uint32_t parse_u32(std::string_view key, std::string_view value, int line) {
  const auto v = parse_uint(key, value, line);
  if (v > UINT32_MAX) {
    malformed(key, value, line);
  }
  return static_cast<std::uint32_t>(v);
}

bool parse_yes_no(std::string_view key, std::string_view value, int line) {
  const auto u = upper(value);
  if (u == "YES") return true;
  if (u == "NO") return false;
  malformed(key, value, line);
}

Vec2 parse_dimensions(std::string_view key, std::string_view value, int line) {
  auto v = trim(value);
  if (v.size() < 2 || v.front() != '(' || v.back() != ')') {
    malformed(key, value, line);
  }
  v = v.substr(1, v.size() - 2);
  const auto comma = v.find(',');
  if (comma == std::string_view::npos) {
    malformed(key, value, line);
  }
  return {parse_real(key, trim(v.substr(0, comma)), line), parse_real(key, trim(v.substr(comma + 1)), line)};
}

std::string fmt_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

Variant parse_variant(std::string_view text) {
  const auto u = upper(trim(text));
  if (u == "PDSR") return Variant::PDSR;
  if (u == "MDSR") return Variant::MDSR;
  if (u == "FGMDSR") return Variant::FGMDSR;
  throw InvalidConfig("unknown variant '" + std::string(text) + "'");
}

double parse_duration(std::string_view text, int line) {
  auto v = trim(text);
  double scale = 1.0;
  if (!v.empty() && (v.back() == 'S' || v.back() == 's')) {
    v.remove_suffix(1);
  } else if (!v.empty() && (v.back() == 'M' || v.back() == 'm')) {
    v.remove_suffix(1);
    scale = 60.0;
  }
  const double d = parse_real("duration", v, line) * scale;
  if (d < 0.0) {
    malformed("duration", text, line);
  }
  return d;
}

void apply_config_value(SimConfig& c, std::string_view key_in, std::string_view value_in, int line) {
  const std::string key(trim(key_in));
  const auto value = trim(value_in);
  if (key == "SIMULATION-TIME") {
    c.sim_time = parse_duration(value, line);
  } else if (key == "TERRAIN-DIMENSIONS") {
    c.terrain = parse_dimensions(key, value, line);
  } else if (key == "NUMBER-OF-NODES") {
    c.node_count = parse_u32(key, value, line);
  } else if (key == "NODE-PLACEMENT") {
    if (upper(value) != "GRID") malformed(key, value, line);
    c.placement = Placement::Grid;
  } else if (key == "MOBILITY") {
    const auto u = upper(value);
    if (u == "RANDOM-WAYPOINT") c.mobility = MobilityModel::RandomWaypoint;
    else if (u == "NONE") c.mobility = MobilityModel::None;
    else malformed(key, value, line);
  } else if (key == "MOBILITY-WP-PAUSE") {
    c.wp_pause = parse_duration(value, line);
  } else if (key == "MOBILITY-WP-MIN-SPEED") {
    c.v_min = parse_real(key, value, line);
  } else if (key == "MOBILITY-WP-MAX-SPEED") {
    c.v_max = parse_real(key, value, line);
  } else if (key == "MOBILITY-POSITION-GRANULARITY") {
    c.granularity = parse_real(key, value, line);
  } else if (key == "PROMISCUOUS-MODE") {
    c.promiscuous = parse_yes_no(key, value, line);
  } else if (key == "ROUTING-PROTOCOL") {
    if (upper(value) != "DSR") malformed(key, value, line);
  } else if (key == "RADIO-RANGE") {
    c.radio_range = parse_real(key, value, line);
  } else if (key == "VARIANT") {
    try {
      c.variant = parse_variant(value);
    } catch (const InvalidConfig&) {
      malformed(key, value, line);
    }
  } else if (key == "SELFISH-FRACTION") {
    c.selfish_fraction = parse_real(key, value, line);
  } else if (key == "SELFISH-DROP-PROB") {
    c.selfish_drop_prob = parse_real(key, value, line);
  } else if (key == "GRADE-THRESHOLD") {
    c.grade_threshold = parse_real(key, value, line);
  } else if (key == "PROTECTED-WINDOW") {
    c.protected_window = parse_duration(value, line);
  } else if (key == "NORMAL-WINDOW") {
    c.normal_window = parse_duration(value, line);
  } else if (key == "GROUP-COUNT") {
    c.group_count = parse_u32(key, value, line);
  } else if (key == "LBP-FUNCTION") {
    const auto u = upper(value);
    if (u == "LINEAR") c.punishment.lbp_function = LbpFunction::Linear;
    else if (u == "EXPONENTIAL") c.punishment.lbp_function = LbpFunction::Exponential;
    else malformed(key, value, line);
  } else if (key == "FLOW-COUNT") {
    c.traffic.flow_count = parse_u32(key, value, line);
  } else if (key == "PACKET-INTERVAL") {
    c.traffic.packet_interval = parse_duration(value, line);
  } else if (key == "FORWARD-TIMEOUT") {
    c.forward_timeout = parse_duration(value, line);
  } else if (key == "SEED") {
    c.seed = parse_uint(key, value, line);
  } else {
    throw UnknownKey("unknown key '" + key + "'", line);
  }
}

SimConfig parse_config(std::string_view text) {
  SimConfig config;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto split = line.find_first_of(" \t");
    if (split == std::string_view::npos) {
      throw MalformedValue("missing value for " + std::string(line), line_no);
    }
    apply_config_value(config, line.substr(0, split), line.substr(split + 1), line_no);
  }
  return config;
}

std::string render_config(const SimConfig& c) {
  std::ostringstream out;
  out << "SIMULATION-TIME " << fmt_real(c.sim_time) << "S\n"
      << "TERRAIN-DIMENSIONS (" << fmt_real(c.terrain.x) << ", " << fmt_real(c.terrain.y) << ")\n"
      << "NUMBER-OF-NODES " << c.node_count << "\n"
      << "NODE-PLACEMENT GRID\n"
      << "MOBILITY " << (c.mobility == MobilityModel::RandomWaypoint ? "RANDOM-WAYPOINT" : "NONE") << "\n"
      << "MOBILITY-WP-PAUSE " << fmt_real(c.wp_pause) << "S\n"
      << "MOBILITY-WP-MIN-SPEED " << fmt_real(c.v_min) << "\n"
      << "MOBILITY-WP-MAX-SPEED " << fmt_real(c.v_max) << "\n"
      << "MOBILITY-POSITION-GRANULARITY " << fmt_real(c.granularity) << "\n"
      << "PROMISCUOUS-MODE " << (c.promiscuous ? "YES" : "NO") << "\n"
      << "ROUTING-PROTOCOL DSR\n"
      << "RADIO-RANGE " << fmt_real(c.radio_range) << "\n"
      << "VARIANT " << to_string(c.variant) << "\n"
      << "SELFISH-FRACTION " << fmt_real(c.selfish_fraction) << "\n"
      << "SELFISH-DROP-PROB " << fmt_real(c.selfish_drop_prob) << "\n"
      << "GRADE-THRESHOLD " << fmt_real(c.grade_threshold) << "\n"
      << "PROTECTED-WINDOW " << fmt_real(c.protected_window) << "S\n"
      << "NORMAL-WINDOW " << fmt_real(c.normal_window) << "S\n"
      << "GROUP-COUNT " << c.group_count << "\n"
      << "LBP-FUNCTION " << (c.punishment.lbp_function == LbpFunction::Linear ? "LINEAR" : "EXPONENTIAL") << "\n"
      << "FLOW-COUNT " << c.traffic.flow_count << "\n"
      << "PACKET-INTERVAL " << fmt_real(c.traffic.packet_interval) << "S\n"
      << "FORWARD-TIMEOUT " << fmt_real(c.forward_timeout) << "S\n"
      << "SEED " << c.seed << "\n";
  return out.str();
}

MobilityParams mobility_params(const SimConfig& c) {
  MobilityParams p;
  p.terrain = c.terrain;
  p.pause = c.wp_pause;
  p.v_min = c.v_min;
  p.v_max = c.mobility == MobilityModel::RandomWaypoint ? c.v_max : 0.0;
  p.granularity = c.granularity;
  return p;
}

void validate(const SimConfig& c) {
  auto fail = [](const std::string& what) { throw InvalidConfig(what); };
  if (!(c.sim_time >= 0.0)) fail("SIMULATION-TIME must be >= 0");
  if (!(c.terrain.x > 0.0 && c.terrain.y > 0.0)) fail("TERRAIN-DIMENSIONS must be positive");
  const auto m = static_cast<std::uint32_t>(std::llround(std::sqrt(static_cast<double>(c.node_count))));
  if (m < 2 || m * m != c.node_count) fail("NUMBER-OF-NODES must be a perfect square >= 4 for GRID placement");
  if (c.v_min < 0.0 || c.v_min > c.v_max) fail("need 0 <= MOBILITY-WP-MIN-SPEED <= MOBILITY-WP-MAX-SPEED");
  if (c.granularity < 0.0) fail("MOBILITY-POSITION-GRANULARITY must be >= 0");
  if (c.wp_pause < 0.0) fail("MOBILITY-WP-PAUSE must be >= 0");
  if (!(c.radio_range > 0.0)) fail("RADIO-RANGE must be positive");
  if (!(c.protected_window > 0.0 && c.normal_window > 0.0)) fail("PROTECTED-WINDOW and NORMAL-WINDOW must be > 0");
  if (c.selfish_fraction < 0.0 || c.selfish_fraction > 1.0) fail("SELFISH-FRACTION must lie in [0,1]");
  if (c.selfish_drop_prob < 0.0 || c.selfish_drop_prob > 1.0) fail("SELFISH-DROP-PROB must lie in [0,1]");
  if (c.grade_threshold < 0.0 || c.grade_threshold > 1.0) fail("GRADE-THRESHOLD must lie in [0,1]");
  if (c.traffic.flow_count < 1) fail("FLOW-COUNT must be >= 1");
  if (!(c.traffic.packet_interval > 0.0)) fail("PACKET-INTERVAL must be > 0");
  if (!(c.forward_timeout > 0.0)) fail("FORWARD-TIMEOUT must be > 0");
  const auto side = static_cast<std::uint32_t>(std::llround(std::sqrt(static_cast<double>(c.group_count))));
  if (c.group_count < 1 || side * side != c.group_count) fail("GROUP-COUNT must be a perfect square");
}

}  // namespace manet
