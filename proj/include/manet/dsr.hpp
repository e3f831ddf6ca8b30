#pragma once

// Simplified DSR: flooded route requests, reverse-path replies, route errors
// and source-routed data, with reputation hooks that drop traffic of
// neighbors holding bonus points and keep low-grade nodes off routes.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "manet/reputation.hpp"
#include "manet/types.hpp"

namespace manet {

/// Hop list from origin to destination.
using SourceRoute = std::vector<NodeId>;

/// At least two hops, no repeated node.
[[nodiscard]] bool is_valid_route(std::span<const NodeId> route);

enum class PacketKind : std::uint8_t { Rreq, Rrep, Rerr, Data, PfrReport, LbpReport };

[[nodiscard]] const char* to_string(PacketKind kind);
[[nodiscard]] bool is_control(PacketKind kind);

struct Packet {
  PacketKind kind = PacketKind::Data;
  NodeId origin = 0;
  NodeId destination = 0;
  std::uint32_t request_id = 0;  ///< RREQ dedup key together with origin
  /// RREQ: accumulated route so far. RREP/DATA: full source route.
  /// RERR: reverse path from the detecting node back to the flow origin.
  SourceRoute route;
  std::size_t hop_index = 0;      ///< index in `route` of the node holding the packet
  std::uint64_t payload_id = 0;   ///< DATA (unique per generated packet), RERR (the data that hit the break)
  std::pair<NodeId, NodeId> broken_link{0, 0};  ///< RERR
  std::vector<PfrReport> pfr_reports;
  std::vector<LbpReport> lbp_reports;
  double created_at = 0.0;
};

/// Destination -> set of routes starting at the owning node.
class RouteCache {
 public:
  /// Throws InvalidRoute for routes that violate the SourceRoute invariants.
  void insert(const SourceRoute& route);
  /// Evicts every route that traverses from -> to. Returns the number evicted.
  std::size_t remove_link(NodeId from, NodeId to);
  [[nodiscard]] const std::set<SourceRoute>* routes_to(NodeId destination) const;
  [[nodiscard]] bool contains(const SourceRoute& route) const;
  [[nodiscard]] std::size_t size() const;

 private:
  std::map<NodeId, std::set<SourceRoute>> routes_;
};

/// Reputation switches consulted by the routing handlers; `enabled` is false for plain DSR.
struct ReputationPolicy {
  bool enabled = true;
  double grade_threshold = 0.5;
};

/// Grade recorded for `node`, or 1.0 when unknown.
[[nodiscard]] double grade_of(const NITable& ni, NodeId node);

using RreqSeen = std::set<std::pair<NodeId, std::uint32_t>>;

[[nodiscard]] Packet originate_rreq(NodeId origin, NodeId destination, std::uint32_t& next_request_id);

enum class RoutingAction : std::uint8_t {
  DropPunished,   ///< a bonus point was consumed
  DropDuplicate,
  DropLowGrade,   ///< came from or leads through a node graded below threshold
  Reply,          ///< RREQ reached its destination; `packet` is the RREP
  Rebroadcast,    ///< `packet` is the RREQ with this node appended
  Deliver,        ///< RREP/RERR reached its final receiver
  Forward,        ///< `packet` goes on to `next_hop`
};

struct RoutingOutcome {
  RoutingAction action = RoutingAction::DropDuplicate;
  std::optional<NodeId> punished;  ///< entry whose bonus point was consumed
  Packet packet;
  NodeId next_hop = 0;
};

/// Consumes one bonus point from the first entry in `subjects` with bp > 0.
/// Returns that subject, or nullopt when nobody is under punishment.
std::optional<NodeId> consume_bonus_point(NITable& ni, std::span<const NodeId> subjects);

/// RREQ handling at `self`. The destination answers every copy that survives
/// the reputation filters (one per neighbor that relayed the flood), so the
/// origin learns alternative routes; other nodes rebroadcast once per request.
[[nodiscard]] RoutingOutcome handle_rreq(NodeId self, const Packet& pkt, NITable& ni, RreqSeen& seen,
                                         const ReputationPolicy& policy);

/// RREP handling at `self`. The origin inserts the route into `cache`.
/// Throws BrokenReversePath if `self` is not on the carried route.
[[nodiscard]] RoutingOutcome handle_rrep(NodeId self, const Packet& pkt, NITable& ni, RouteCache& cache,
                                         const ReputationPolicy& policy);

/// Evicts the broken link from `cache` and forwards the RERR toward the flow origin.
[[nodiscard]] RoutingOutcome handle_rerr(NodeId self, const Packet& pkt, NITable& ni, RouteCache& cache,
                                         const ReputationPolicy& policy);

/// Builds the RERR sent by `self` (at `hop_index` of the data route) for the link to the next hop.
[[nodiscard]] Packet make_rerr(const Packet& data, NodeId self);

/// Shortest cached route whose intermediates all have grade >= threshold;
/// ties go to the lexicographically smaller hop list.
[[nodiscard]] std::optional<SourceRoute> select_route(const RouteCache& cache, NodeId destination,
                                                      const NITable& ni, double grade_threshold);

enum class FilterResult : std::uint8_t { Forward, Punish };

struct FilterOutcome {
  FilterResult result = FilterResult::Forward;
  std::optional<NodeId> punished;
};

/// DATA punishment at an intermediate node: checks previous hop, origin and
/// final destination in that order and consumes one bonus point from the
/// first entry under punishment.
[[nodiscard]] FilterOutcome retaliation_filter(NodeId self, const Packet& pkt, NITable& ni);

/// Advances the source route by one hop. Throws NotOnRoute if `self` is not
/// the node at hop_index (or is the final destination).
[[nodiscard]] Packet forward_data(NodeId self, const Packet& pkt);

/// Nodes the route relays through (everything but the two ends).
[[nodiscard]] std::span<const NodeId> intermediates(const SourceRoute& route);

}  // namespace manet
