#pragma once
// Discrete-event MANET run: grid placement, random waypoint mobility,
// unit-disk delivery, promiscuous overhearing, the protected/normal mode
// cycle with its three-phase reputation epoch, CBR traffic and selfish
// forwarding behavior. One run is single-threaded and a pure function of
// (config, seed).

#include <cstdint>
#include <optional>
#include <vector>

#include "manet/config.hpp"
#include "manet/dsr.hpp"
#include "manet/metrics.hpp"
#include "manet/mobility.hpp"
#include "manet/radio.hpp"
#include "manet/reputation.hpp"

namespace manet {

enum class Mode : std::uint8_t { Protected, Normal };

/// Simulated time between a transmission and its reception.
inline constexpr double kHopDelay = 0.002;
/// Interval between mobility updates.
inline constexpr double kMobilityStep = 0.1;

struct ScheduleEntry {
  enum class Kind : std::uint8_t { Phase1, Phase2, Phase3, ToNormal, ToProtected };
  double time = 0.0;
  Kind kind = Kind::ToNormal;
  friend bool operator==(const ScheduleEntry&, const ScheduleEntry&) = default;
};

/// Global mode timeline before sim_time. The run starts Protected; each
/// protected window closes with Phase1, Phase2, Phase3 (spaced by one
/// broadcast round trip) followed by the switch to Normal.
[[nodiscard]] std::vector<ScheduleEntry> mode_schedule(const SimConfig& config);

/// Spacing between epoch phases for a protected window of the given length.
[[nodiscard]] double epoch_phase_gap(double protected_window);

struct Flow {
  NodeId source = 0;
  NodeId destination = 0;
  double start = 0.0;  ///< first packet; one more every packet_interval
  friend bool operator==(const Flow&, const Flow&) = default;
};

/// flow_count CBR flows between distinct (source, destination) pairs, src != dst.
[[nodiscard]] std::vector<Flow> generate_traffic(const SimConfig& config, Rng& rng);

/// Packets a flow emits before sim_time.
[[nodiscard]] std::uint64_t packets_scheduled(const Flow& flow, double packet_interval, double sim_time);

/// The first round(fraction * node_count) nodes of a seeded permutation.
[[nodiscard]] std::vector<BehaviorProfile> assign_behaviors(const SimConfig& config, Rng& rng);

enum class ForwardDecision : std::uint8_t { Forward, Drop };

/// Honest nodes forward everything; selfish nodes drop DATA with their drop
/// probability and handle control packets normally. The RNG is drawn only for
/// a fractional drop probability.
[[nodiscard]] ForwardDecision selfish_decision(const BehaviorProfile& profile, const Packet& pkt, Rng& rng);

/// Nodes that notice `receiver` take delivery of a unicast from `sender`:
/// everyone in range of the receiver (the link-layer receipt is audible
/// around it), plus the sender.
[[nodiscard]] std::vector<NodeId> overhearing_observers(const Adjacency& adjacency, NodeId sender, NodeId receiver);

struct TransmitPlan {
  std::vector<NodeId> receivers;  ///< nodes that get a Deliver event
  std::vector<NodeId> listeners;  ///< everyone in range; all of them overhear when promiscuous
  std::vector<NodeId> observers;  ///< arm a forward check on the receiver (DATA relays in Protected mode)
};

/// Who a transmission reaches. `unicast_to` selects the single addressee,
/// otherwise every neighbor receives. Observers are only produced for a DATA
/// unicast to a relay while `observing` (protected mode with promiscuous
/// listening on a reputation variant).
[[nodiscard]] TransmitPlan transmit(NodeId sender, const Packet& pkt, std::optional<NodeId> unicast_to,
                                    const Adjacency& adjacency, bool observing);

struct TraceEntry {
  double time = 0.0;
  NodeId sender = 0;
  PacketKind kind = PacketKind::Data;
  std::int64_t addressee = -1;  ///< -1 for broadcasts
  std::uint64_t key = 0;        ///< payload id for DATA/RERR, request id otherwise
  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

struct RunOptions {
  bool record_ledger = false;
  bool record_ni_tables = false;
  bool record_trace = false;
  std::optional<std::vector<Vec2>> positions;  ///< fixed topology; disables mobility
  std::optional<std::vector<BehaviorProfile>> behaviors;
  std::optional<std::vector<Flow>> flows;
};

struct RunResult {
  MetricsRecord metrics;
  std::vector<LedgerEvent> ledger;
  std::vector<NiSnapshotRow> ni_tables;
  std::vector<TraceEntry> trace;
  std::uint64_t trace_digest = 0;  ///< FNV-1a over every transmission
  std::vector<NITable> final_tables;
  std::vector<BehaviorProfile> behaviors;
  std::vector<Flow> flows;
  std::uint64_t npf_without_nprf = 0;  ///< overhearing soundness violations
  std::uint64_t normal_mode_counter_changes = 0;
};

[[nodiscard]] RunResult run_detailed(const SimConfig& config, const RunOptions& options = {});

/// Validates the config and runs it. Throws InvalidConfig.
[[nodiscard]] MetricsRecord run(const SimConfig& config);

}  // namespace manet
