#include "manet/simulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <tuple>

#include "manet/groups.hpp"

namespace manet {

namespace {

constexpr double kBufferLifetime = 30.0;
constexpr std::size_t kBufferCapacity = 64;
constexpr double kRreqInitialBackoff = 0.5;
constexpr double kRreqMaxBackoff = 10.0;

enum RngStream : std::uint64_t { kMobilityStream = 0, kFlowStream = 1, kBehaviorStream = 2, kDropStream = 3 };

}  // namespace

// --- schedule and traffic --------------------------------------------------

double epoch_phase_gap(double protected_window) { return std::min(0.01, protected_window / 4.0); }

std::vector<ScheduleEntry> mode_schedule(const SimConfig& config) {
  if (!(config.protected_window > 0.0) || !(config.normal_window > 0.0)) {
    throw InvalidConfig("mode windows must be positive");
  }
  std::vector<ScheduleEntry> out;
  const double gap = epoch_phase_gap(config.protected_window);
  double start = 0.0;
  while (start < config.sim_time) {
    const double close = start + config.protected_window;
    const ScheduleEntry window[] = {
        {close - 3 * gap, ScheduleEntry::Kind::Phase1},
        {close - 2 * gap, ScheduleEntry::Kind::Phase2},
        {close - gap, ScheduleEntry::Kind::Phase3},
        {close, ScheduleEntry::Kind::ToNormal},
        {close + config.normal_window, ScheduleEntry::Kind::ToProtected},
    };
    for (const auto& e : window) {
      if (e.time >= config.sim_time) {
        return out;
      }
      out.push_back(e);
    }
    start = close + config.normal_window;
  }
  return out;
}

std::vector<Flow> generate_traffic(const SimConfig& config, Rng& rng) {
  const std::uint64_t n = config.node_count;
  if (config.traffic.flow_count < 1) {
    throw InvalidConfig("flow_count must be at least 1");
  }
  if (n < 2) {
    throw InvalidConfig("traffic needs at least two nodes");
  }
  const bool unique_pairs = config.traffic.flow_count <= n * (n - 1);
  std::set<std::pair<NodeId, NodeId>> used;
  std::vector<Flow> flows;
  flows.reserve(config.traffic.flow_count);
  for (std::uint32_t f = 0; f < config.traffic.flow_count; ++f) {
    Flow flow;
    do {
      flow.source = static_cast<NodeId>(uniform_index(rng, n));
      flow.destination = static_cast<NodeId>(uniform_index(rng, n));
    } while (flow.source == flow.destination ||
             (unique_pairs && used.contains({flow.source, flow.destination})));
    used.insert({flow.source, flow.destination});
    flow.start = uniform01(rng) * config.traffic.packet_interval;
    flows.push_back(flow);
  }
  return flows;
}

namespace {

double packet_time(const Flow& flow, double interval, std::uint64_t k) {
  return flow.start + static_cast<double>(k) * interval;
}

}  // namespace

std::uint64_t packets_scheduled(const Flow& flow, double packet_interval, double sim_time) {
  if (flow.start >= sim_time) {
    return 0;
  }
  auto k = static_cast<std::uint64_t>(std::ceil((sim_time - flow.start) / packet_interval));
  while (k > 0 && packet_time(flow, packet_interval, k - 1) >= sim_time) {
    --k;
  }
  while (packet_time(flow, packet_interval, k) < sim_time) {
    ++k;
  }
  return k;
}

std::vector<BehaviorProfile> assign_behaviors(const SimConfig& config, Rng& rng) {
  const std::uint32_t n = config.node_count;
  std::vector<NodeId> order(n);
  for (NodeId i = 0; i < n; ++i) {
    order[i] = i;
  }
  for (std::uint32_t i = n; i > 1; --i) {
    const auto j = static_cast<std::uint32_t>(uniform_index(rng, i));
    std::swap(order[i - 1], order[j]);
  }
  const auto selfish = static_cast<std::uint32_t>(std::llround(config.selfish_fraction * n));
  std::vector<BehaviorProfile> out(n, BehaviorProfile::honest());
  for (std::uint32_t i = 0; i < selfish && i < n; ++i) {
    out[order[i]] = BehaviorProfile::selfish(config.selfish_drop_prob);
  }
  return out;
}

ForwardDecision selfish_decision(const BehaviorProfile& profile, const Packet& pkt, Rng& rng) {
  if (profile.kind == BehaviorProfile::Kind::Honest || pkt.kind != PacketKind::Data) {
    return ForwardDecision::Forward;
  }
  const double p = profile.data_drop_prob;
  if (p >= 1.0) {
    return ForwardDecision::Drop;
  }
  if (p <= 0.0) {
    return ForwardDecision::Forward;
  }
  return uniform01(rng) < p ? ForwardDecision::Drop : ForwardDecision::Forward;
}

// --- radio -----------------------------------------------------------------

std::vector<NodeId> overhearing_observers(const Adjacency& adjacency, NodeId sender, NodeId receiver) {
  std::vector<NodeId> out = adjacency[receiver];
  if (!std::binary_search(out.begin(), out.end(), sender)) {
    out.insert(std::upper_bound(out.begin(), out.end(), sender), sender);
  }
  std::erase(out, receiver);
  return out;
}

TransmitPlan transmit(NodeId sender, const Packet& pkt, std::optional<NodeId> unicast_to,
                      const Adjacency& adjacency, bool observing) {
  TransmitPlan plan;
  plan.listeners = adjacency[sender];
  if (!unicast_to) {
    plan.receivers = adjacency[sender];
    return plan;
  }
  if (!are_adjacent(adjacency, sender, *unicast_to)) {
    return plan;
  }
  plan.receivers.push_back(*unicast_to);
  if (observing && pkt.kind == PacketKind::Data && !pkt.route.empty() && *unicast_to != pkt.route.back()) {
    plan.observers = overhearing_observers(adjacency, sender, *unicast_to);
  }
  return plan;
}

// --- engine ----------------------------------------------------------------

namespace {

enum class EventKind : std::uint8_t { Deliver, MobilityStep, ModeSwitch, EpochPhase, TrafficGen, ForwardTimeout, RreqTimeout };

struct Event {
  double time = 0.0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::Deliver;
  NodeId node = 0;
  NodeId from = 0;
  std::uint64_t aux = 0;
  std::uint64_t aux2 = 0;
  Packet packet;
  std::vector<NodeId> observers;
};

struct Later {
  bool operator()(const Event& a, const Event& b) const {
    return std::tie(a.time, a.seq) > std::tie(b.time, b.seq);
  }
};

struct Discovery {
  bool active = false;
  double backoff = kRreqInitialBackoff;
  std::uint64_t generation = 0;
};

struct NodeState {
  BehaviorProfile behavior;
  NITable ni;
  TempTable temp;
  RouteCache cache;
  RreqSeen seen;
  std::uint32_t next_request_id = 0;
  std::set<std::pair<NodeId, std::uint64_t>> pending;  ///< (subject, payload) awaiting an overheard forward
  std::deque<Packet> buffer;                            ///< DATA waiting for a route
  std::map<NodeId, Discovery> discovery;
  Rng drop_rng;
  std::set<NodeId> exhausted;  ///< subjects whose bp this node drove to zero
};

using ReceiverFilter = std::function<bool(NodeId)>;

class Engine {
 public:
  Engine(const SimConfig& config, const RunOptions& options) : cfg_(config), opts_(options) {
    reputation_ = cfg_.variant != Variant::PDSR;
    policy_.enabled = reputation_;
    policy_.grade_threshold = cfg_.grade_threshold;
  }

  RunResult run() {
    setup();
    while (!queue_.empty() && queue_.front().time < cfg_.sim_time) {
      std::pop_heap(queue_.begin(), queue_.end(), Later{});
      Event e = std::move(queue_.back());
      queue_.pop_back();
      now_ = e.time;
      dispatch(e);
    }
    finish();
    return std::move(result_);
  }

 private:
  // --- setup ---------------------------------------------------------------

  void setup() {
    auto& m = result_.metrics;
    m.info.label = "run";
    m.info.variant = cfg_.variant;
    m.info.selfish_pct = cfg_.selfish_fraction * 100.0;
    m.info.node_count = cfg_.node_count;
    m.info.seed = cfg_.seed;

    if (opts_.positions) {
      positions_ = *opts_.positions;
    } else {
      positions_ = place_grid(cfg_.node_count, cfg_.terrain);
    }
    n_ = static_cast<std::uint32_t>(positions_.size());
    m.per_node_transmissions.assign(n_, 0);
    adjacency_ = neighbors_serial(positions_, cfg_.radio_range);

    const auto params = mobility_params(cfg_);
    mobile_ = !opts_.positions && params.v_max > 0.0;
    if (mobile_) {
      params_ = params;
      for (NodeId i = 0; i < n_; ++i) {
        waypoints_.push_back(initial_waypoint_state(positions_[i], params_));
        mobility_rngs_.push_back(make_stream(cfg_.seed, kMobilityStream, i));
      }
    }

    if (opts_.behaviors) {
      result_.behaviors = *opts_.behaviors;
    } else {
      Rng rng = make_stream(cfg_.seed, kBehaviorStream);
      result_.behaviors = assign_behaviors(cfg_, rng);
    }
    result_.behaviors.resize(n_, BehaviorProfile::honest());
    nodes_.resize(n_);
    for (NodeId i = 0; i < n_; ++i) {
      nodes_[i].behavior = result_.behaviors[i];
      nodes_[i].drop_rng = make_stream(cfg_.seed, kDropStream, i);
    }

    if (cfg_.variant == Variant::FGMDSR) {
      groups_ = partition(positions_, cfg_.terrain, cfg_.group_count, adjacency_);
    }

    if (opts_.flows) {
      result_.flows = *opts_.flows;
    } else if (cfg_.sim_time > 0.0) {
      Rng rng = make_stream(cfg_.seed, kFlowStream);
      result_.flows = generate_traffic(cfg_, rng);
    }

    if (cfg_.sim_time <= 0.0) {
      return;
    }
    for (const auto& entry : mode_schedule(cfg_)) {
      const bool phase = entry.kind == ScheduleEntry::Kind::Phase1 || entry.kind == ScheduleEntry::Kind::Phase2 ||
                         entry.kind == ScheduleEntry::Kind::Phase3;
      if (phase && !reputation_) {
        continue;
      }
      Event e;
      e.time = entry.time;
      e.kind = phase ? EventKind::EpochPhase : EventKind::ModeSwitch;
      e.aux = static_cast<std::uint64_t>(entry.kind);
      schedule(std::move(e));
    }
    for (std::size_t f = 0; f < result_.flows.size(); ++f) {
      if (result_.flows[f].start < cfg_.sim_time) {
        Event e;
        e.time = result_.flows[f].start;
        e.kind = EventKind::TrafficGen;
        e.aux = f;
        e.aux2 = 0;
        schedule(std::move(e));
      }
    }
    if (mobile_) {
      Event e;
      e.time = kMobilityStep;
      e.kind = EventKind::MobilityStep;
      e.aux = 1;
      schedule(std::move(e));
    }
  }

  void finish() {
    auto& m = result_.metrics;
    std::uint64_t in_flight = 0;
    for (const auto& e : queue_) {
      if (e.kind == EventKind::Deliver && e.packet.kind == PacketKind::Data) {
        ++in_flight;
      }
    }
    for (const auto& node : nodes_) {
      in_flight += node.buffer.size();
    }
    m.packets_in_flight = in_flight;
    m.pdr = compute_pdr(m.packets_sent, m.packets_received);
    result_.final_tables.reserve(n_);
    for (auto& node : nodes_) {
      result_.final_tables.push_back(node.ni);
    }
  }

  void schedule(Event e) {
    e.seq = seq_++;
    queue_.push_back(std::move(e));
    std::push_heap(queue_.begin(), queue_.end(), Later{});
  }

  [[nodiscard]] bool observing() const {
    return reputation_ && cfg_.promiscuous && mode_ == Mode::Protected && !closing_;
  }

  [[nodiscard]] double route_threshold() const { return reputation_ ? cfg_.grade_threshold : 0.0; }

  // --- dispatch ------------------------------------------------------------

  void dispatch(Event& e) {
    switch (e.kind) {
      case EventKind::Deliver: on_deliver(e.node, e.from, e.packet); break;
      case EventKind::MobilityStep: on_mobility(e.aux); break;
      case EventKind::ModeSwitch: on_mode_switch(static_cast<ScheduleEntry::Kind>(e.aux)); break;
      case EventKind::EpochPhase: on_epoch_phase(static_cast<ScheduleEntry::Kind>(e.aux)); break;
      case EventKind::TrafficGen: on_traffic(e.aux, e.aux2); break;
      case EventKind::ForwardTimeout: on_forward_timeout(e.node, e.aux, e.observers); break;
      case EventKind::RreqTimeout: on_rreq_timeout(e.node, static_cast<NodeId>(e.aux), e.aux2); break;
    }
  }

  void on_mobility(std::uint64_t step) {
    advance_all_serial(waypoints_, mobility_rngs_, kMobilityStep, params_);
    for (NodeId i = 0; i < n_; ++i) {
      positions_[i] = waypoints_[i].position;
    }
    adjacency_ = neighbors_serial(positions_, cfg_.radio_range);
    Event e;
    e.time = static_cast<double>(step + 1) * kMobilityStep;
    e.kind = EventKind::MobilityStep;
    e.aux = step + 1;
    schedule(std::move(e));
  }

  void on_mode_switch(ScheduleEntry::Kind kind) {
    if (kind == ScheduleEntry::Kind::ToNormal) {
      mode_ = Mode::Normal;
    } else {
      mode_ = Mode::Protected;
      closing_ = false;
    }
  }

  // --- transmission --------------------------------------------------------

  bool tx(NodeId sender, const Packet& pkt, std::optional<NodeId> unicast_to, const ReceiverFilter& filter = {}) {
    auto& m = result_.metrics;
    ++m.per_node_transmissions[sender];
    if (is_control(pkt.kind)) {
      m.control.add(pkt.kind);
    } else {
      ++m.data_forwards;
    }
    trace(sender, pkt, unicast_to);

    const bool observe = observing();
    TransmitPlan plan = transmit(sender, pkt, unicast_to, adjacency_, observe);
    if (reputation_) {
      overhear(sender, pkt, plan.listeners, observe);
    }
    for (NodeId r : plan.receivers) {
      if (filter && !filter(r)) {
        continue;
      }
      Event e;
      e.time = now_ + kHopDelay;
      e.kind = EventKind::Deliver;
      e.node = r;
      e.from = sender;
      e.packet = pkt;
      schedule(std::move(e));
    }
    if (!plan.observers.empty()) {
      arm_observers(*unicast_to, pkt.payload_id, plan.observers);
    }
    return !unicast_to || !plan.receivers.empty();
  }

  void trace(NodeId sender, const Packet& pkt, std::optional<NodeId> unicast_to) {
    TraceEntry t;
    t.time = now_;
    t.sender = sender;
    t.kind = pkt.kind;
    t.addressee = unicast_to ? static_cast<std::int64_t>(*unicast_to) : -1;
    t.key = (pkt.kind == PacketKind::Data || pkt.kind == PacketKind::Rerr) ? pkt.payload_id : pkt.request_id;
    auto mix = [this](std::uint64_t v) {
      for (int b = 0; b < 8; ++b) {
        result_.trace_digest ^= (v >> (8 * b)) & 0xFF;
        result_.trace_digest *= 0x100000001B3ULL;
      }
    };
    if (result_.trace_digest == 0) {
      result_.trace_digest = 0xCBF29CE484222325ULL;
    }
    mix(std::bit_cast<std::uint64_t>(t.time));
    mix(t.sender);
    mix(static_cast<std::uint64_t>(t.kind));
    mix(static_cast<std::uint64_t>(t.addressee));
    mix(t.key);
    if (opts_.record_trace) {
      result_.trace.push_back(t);
    }
  }

  NITableEntry& ni_entry(NodeId observer, NodeId subject) {
    auto& ni = nodes_[observer].ni;
    auto it = ni.find(subject);
    if (it == ni.end()) {
      it = ni.emplace(subject, admit_new_node(ni, subject)).first;
    }
    return it->second;
  }

  void note_counter_change() {
    if (mode_ != Mode::Protected) {
      ++result_.normal_mode_counter_changes;
    }
  }

  void overhear(NodeId sender, const Packet& pkt, const std::vector<NodeId>& listeners, bool observe) {
    for (NodeId l : listeners) {
      auto& entry = ni_entry(l, sender);
      if (!observe || (pkt.kind != PacketKind::Data && pkt.kind != PacketKind::Rerr)) {
        continue;
      }
      auto& pending = nodes_[l].pending;
      auto it = pending.find({sender, pkt.payload_id});
      if (it == pending.end()) {
        continue;
      }
      pending.erase(it);
      if (pkt.kind == PacketKind::Rerr) {
        // the relay reported a broken link instead of forwarding
        entry = retract_received_for_forwarding(entry);
      } else if (entry.counters.npf + 1 > entry.counters.nprf) {
        ++result_.npf_without_nprf;
        continue;
      } else {
        entry = record_forwarded(entry);
      }
      note_counter_change();
    }
  }

  void arm_observers(NodeId subject, std::uint64_t payload, const std::vector<NodeId>& observers) {
    Event e;
    for (NodeId o : observers) {
      auto& entry = ni_entry(o, subject);
      const auto before = entry.counters.nprf;
      entry = record_received_for_forwarding(entry);
      if (entry.counters.nprf != before) {
        note_counter_change();
        nodes_[o].pending.insert({subject, payload});
        e.observers.push_back(o);
      }
    }
    if (e.observers.empty()) {
      return;
    }
    e.time = now_ + cfg_.forward_timeout;
    e.kind = EventKind::ForwardTimeout;
    e.node = subject;
    e.aux = payload;
    schedule(std::move(e));
  }

  void on_forward_timeout(NodeId subject, std::uint64_t payload, const std::vector<NodeId>& observers) {
    for (NodeId o : observers) {
      auto& pending = nodes_[o].pending;
      if (pending.erase({subject, payload}) == 0) {
        continue;
      }
      // an observer that lost earshot cannot tell a drop from a forward
      if (observing() && !are_adjacent(adjacency_, o, subject)) {
        auto& entry = ni_entry(o, subject);
        entry = retract_received_for_forwarding(entry);
        note_counter_change();
      }
    }
  }

  // --- ledger --------------------------------------------------------------

  void note_consultation(NodeId self, std::span<const NodeId> subjects, std::optional<NodeId> punished,
                         PacketKind kind) {
    if (!opts_.record_ledger) {
      return;
    }
    auto& node = nodes_[self];
    for (NodeId s : subjects) {
      if (punished && s == *punished) {
        const std::uint32_t before = node.ni.at(s).bp + 1;
        result_.ledger.push_back({LedgerEvent::Kind::Punished, now_, self, s, before, kind});
        if (before == 1) {
          node.exhausted.insert(s);
        }
        return;
      }
      if (node.exhausted.contains(s)) {
        result_.ledger.push_back({LedgerEvent::Kind::Spared, now_, self, s, 0, kind});
        node.exhausted.erase(s);
      }
    }
  }

  // --- route discovery -----------------------------------------------------

  void broadcast_rreq(NodeId sender, const Packet& pkt) {
    if (!groups_) {
      tx(sender, pkt, std::nullopt);
      return;
    }
    const auto channels = flood_channels(*groups_, sender, pkt.origin, pkt.destination);
    for (Channel ch : {Channel::Intra, Channel::Border}) {
      if ((ch == Channel::Intra && !channels.intra) || (ch == Channel::Border && !channels.border)) {
        continue;
      }
      tx(sender, pkt, std::nullopt, [this, sender, ch, dest = pkt.destination](NodeId r) {
        return scope_flood(*groups_, adjacency_, sender, r, dest, ch);
      });
    }
  }

  void start_discovery(NodeId src, NodeId dest) {
    auto& d = nodes_[src].discovery[dest];
    if (d.active) {
      return;
    }
    d.active = true;
    d.backoff = kRreqInitialBackoff;
    ++d.generation;
    send_rreq(src, dest, d);
  }

  void send_rreq(NodeId src, NodeId dest, const Discovery& d) {
    broadcast_rreq(src, originate_rreq(src, dest, nodes_[src].next_request_id));
    Event e;
    e.time = now_ + d.backoff;
    e.kind = EventKind::RreqTimeout;
    e.node = src;
    e.aux = dest;
    e.aux2 = d.generation;
    schedule(std::move(e));
  }

  void expire_buffer(NodeId src) {
    auto& buffer = nodes_[src].buffer;
    const auto before = buffer.size();
    std::erase_if(buffer, [this](const Packet& p) { return now_ - p.created_at >= kBufferLifetime; });
    result_.metrics.drops.no_route += before - buffer.size();
  }

  void on_rreq_timeout(NodeId src, NodeId dest, std::uint64_t generation) {
    auto& d = nodes_[src].discovery[dest];
    if (!d.active || d.generation != generation) {
      return;
    }
    expire_buffer(src);
    const auto& buffer = nodes_[src].buffer;
    const bool waiting =
        std::any_of(buffer.begin(), buffer.end(), [dest](const Packet& p) { return p.destination == dest; });
    if (!waiting) {
      d.active = false;
      return;
    }
    d.backoff = std::min(2.0 * d.backoff, kRreqMaxBackoff);
    send_rreq(src, dest, d);
  }

  void flush_buffer(NodeId src, NodeId dest) {
    auto& node = nodes_[src];
    if (!select_route(node.cache, dest, node.ni, route_threshold())) {
      return;
    }
    node.discovery[dest].active = false;
    expire_buffer(src);
    std::vector<Packet> ready;
    std::deque<Packet> keep;
    for (auto& p : node.buffer) {
      if (p.destination == dest) {
        ready.push_back(std::move(p));
      } else {
        keep.push_back(std::move(p));
      }
    }
    node.buffer = std::move(keep);
    for (auto& p : ready) {
      send_from_source(src, std::move(p));
    }
  }

  // --- data ----------------------------------------------------------------

  void on_traffic(std::uint64_t flow_index, std::uint64_t k) {
    const Flow& flow = result_.flows[flow_index];
    Packet pkt;
    pkt.kind = PacketKind::Data;
    pkt.origin = flow.source;
    pkt.destination = flow.destination;
    pkt.payload_id = next_payload_++;
    pkt.created_at = now_;
    ++result_.metrics.packets_sent;
    send_from_source(flow.source, std::move(pkt));

    const double next = packet_time(flow, cfg_.traffic.packet_interval, k + 1);
    if (next < cfg_.sim_time) {
      Event e;
      e.time = next;
      e.kind = EventKind::TrafficGen;
      e.aux = flow_index;
      e.aux2 = k + 1;
      schedule(std::move(e));
    }
  }

  void send_from_source(NodeId src, Packet pkt) {
    auto& node = nodes_[src];
    while (auto route = select_route(node.cache, pkt.destination, node.ni, route_threshold())) {
      pkt.route = std::move(*route);
      pkt.hop_index = 0;
      const NodeId next = pkt.route[1];
      if (tx(src, forward_data(src, pkt), next)) {
        return;
      }
      node.cache.remove_link(src, next);
    }
    pkt.route.clear();
    pkt.hop_index = 0;
    if (node.buffer.size() >= kBufferCapacity) {
      node.buffer.pop_front();
      ++result_.metrics.drops.no_route;
    }
    const NodeId dest = pkt.destination;
    node.buffer.push_back(std::move(pkt));
    start_discovery(src, dest);
  }

  void send_rerr(NodeId self, const Packet& data) {
    Packet rerr = make_rerr(data, self);
    if (rerr.route.size() < 2) {
      nodes_[self].cache.remove_link(rerr.broken_link.first, rerr.broken_link.second);
      return;
    }
    tx(self, rerr, rerr.route[1]);
  }

  void relay_data(NodeId self, const Packet& pkt) {
    auto& node = nodes_[self];
    auto& m = result_.metrics;
    const std::size_t i = pkt.hop_index;
    if (reputation_) {
      const auto filter = retaliation_filter(self, pkt, node.ni);
      const NodeId subjects[] = {pkt.route[i - 1], pkt.route.front(), pkt.route.back()};
      note_consultation(self, subjects, filter.punished, PacketKind::Data);
      if (filter.result == FilterResult::Punish) {
        ++m.drops.punishment;
        return;
      }
    }
    if (selfish_decision(node.behavior, pkt, node.drop_rng) == ForwardDecision::Drop) {
      ++m.drops.selfish;
      return;
    }
    const NodeId next = pkt.route[i + 1];
    if (reputation_ && next != pkt.route.back() && grade_of(node.ni, next) < cfg_.grade_threshold) {
      send_rerr(self, pkt);
      ++m.drops.no_route;
      return;
    }
    if (!tx(self, forward_data(self, pkt), next)) {
      send_rerr(self, pkt);
      ++m.drops.no_route;
    }
  }

  // --- reception -----------------------------------------------------------

  void on_deliver(NodeId self, NodeId /*from*/, const Packet& pkt) {
    auto& node = nodes_[self];
    switch (pkt.kind) {
      case PacketKind::Data:
        if (pkt.route.back() == self) {
          ++result_.metrics.packets_received;
        } else {
          relay_data(self, pkt);
        }
        break;
      case PacketKind::Rreq: {
        const bool looped = std::find(pkt.route.begin(), pkt.route.end(), self) != pkt.route.end();
        auto out = handle_rreq(self, pkt, node.ni, node.seen, policy_);
        if (reputation_ && !looped) {
          const NodeId subjects[] = {pkt.route.back(), pkt.origin};
          note_consultation(self, subjects, out.punished, PacketKind::Rreq);
        }
        if (out.action == RoutingAction::Reply) {
          tx(self, out.packet, out.next_hop);
        } else if (out.action == RoutingAction::Rebroadcast) {
          broadcast_rreq(self, out.packet);
        }
        break;
      }
      case PacketKind::Rrep: {
        auto out = handle_rrep(self, pkt, node.ni, node.cache, policy_);
        const std::size_t i = pkt.hop_index;
        if (reputation_ && i > 0 && i + 1 < pkt.route.size()) {
          const NodeId subjects[] = {pkt.route[i + 1], pkt.route[i - 1]};
          note_consultation(self, subjects, out.punished, PacketKind::Rrep);
        }
        if (out.action == RoutingAction::Deliver) {
          flush_buffer(self, pkt.destination);
        } else if (out.action == RoutingAction::Forward) {
          tx(self, out.packet, out.next_hop);
        }
        break;
      }
      case PacketKind::Rerr: {
        auto out = handle_rerr(self, pkt, node.ni, node.cache, policy_);
        const auto it = std::find(pkt.route.begin(), pkt.route.end(), self);
        const auto i = static_cast<std::size_t>(it - pkt.route.begin());
        if (reputation_ && i > 0 && i + 1 < pkt.route.size()) {
          const NodeId subjects[] = {pkt.route[i - 1]};
          note_consultation(self, subjects, out.punished, PacketKind::Rerr);
        }
        if (out.action == RoutingAction::Forward) {
          tx(self, out.packet, out.next_hop);
        }
        break;
      }
      case PacketKind::PfrReport: {
        std::set<NodeId> known;
        for (const auto& [id, entry] : node.ni) {
          known.insert(id);
        }
        for (const auto& report : pkt.pfr_reports) {
          node.temp = ingest_pfr_report(std::move(node.temp), report, known);
        }
        break;
      }
      case PacketKind::LbpReport:
        for (const auto& report : pkt.lbp_reports) {
          node.temp = ingest_lbp_report(std::move(node.temp), report);
        }
        break;
    }
  }

  // --- epoch ---------------------------------------------------------------

  void on_epoch_phase(ScheduleEntry::Kind phase) {
    switch (phase) {
      case ScheduleEntry::Kind::Phase1: epoch_phase1(); break;
      case ScheduleEntry::Kind::Phase2: epoch_phase2(); break;
      case ScheduleEntry::Kind::Phase3: epoch_phase3(); break;
      default: break;
    }
  }

  void epoch_phase1() {
    closing_ = true;
    for (NodeId self = 0; self < n_; ++self) {
      auto& node = nodes_[self];
      std::map<NodeId, std::uint32_t> unresolved;
      for (const auto& [subject, payload] : node.pending) {
        ++unresolved[subject];
      }
      std::map<NodeId, ObservationCounters> local;
      for (const auto& [subject, entry] : node.ni) {
        auto c = entry.counters;
        const auto it = unresolved.find(subject);
        c.nprf -= it == unresolved.end() ? 0 : it->second;
        if (c.nprf > 0) {
          local[subject] = c;
        }
      }
      node.temp.clear();
      Packet pkt;
      pkt.kind = PacketKind::PfrReport;
      pkt.origin = self;
      pkt.request_id = epoch_;
      pkt.pfr_reports = finalize_epoch_phase1(local);
      for (const auto& report : pkt.pfr_reports) {
        auto& t = node.temp[report.subject];
        t.node_id = report.subject;
        t.pfr_samples.push_back(report.pfr);
      }
      if (!pkt.pfr_reports.empty()) {
        tx(self, pkt, std::nullopt);
      }
    }
  }

  void epoch_phase2() {
    for (NodeId self = 0; self < n_; ++self) {
      auto& node = nodes_[self];
      auto result = finalize_epoch_phase2(std::move(node.temp), cfg_.punishment);
      node.temp = std::move(result.temp);
      if (result.reports.empty()) {
        continue;
      }
      Packet pkt;
      pkt.kind = PacketKind::LbpReport;
      pkt.origin = self;
      pkt.request_id = epoch_;
      pkt.lbp_reports = std::move(result.reports);
      tx(self, pkt, std::nullopt);
    }
  }

  void epoch_phase3() {
    for (NodeId self = 0; self < n_; ++self) {
      auto& node = nodes_[self];
      std::map<NodeId, ObservationCounters> fed;
      if (opts_.record_ni_tables) {
        for (const auto& [id, entry] : node.ni) {
          fed[id] = entry.counters;
        }
      }
      node.ni = finalize_epoch_phase3(node.temp, std::move(node.ni));
      node.pending.clear();
      node.exhausted.clear();
      for (const auto& [id, entry] : node.ni) {
        if (opts_.record_ledger) {
          result_.ledger.push_back({LedgerEvent::Kind::Writeback, now_, self, id, entry.bp, PacketKind::Data});
        }
        if (opts_.record_ni_tables) {
          const auto c = fed[id];
          result_.ni_tables.push_back({epoch_, now_, self, id, c.nprf, c.npf, entry.grade, entry.bp});
        }
      }
    }
    ++epoch_;
  }

  SimConfig cfg_;
  RunOptions opts_;
  bool reputation_ = true;
  ReputationPolicy policy_;
  std::uint32_t n_ = 0;
  std::vector<Vec2> positions_;
  Adjacency adjacency_;
  bool mobile_ = false;
  MobilityParams params_;
  std::vector<WaypointState> waypoints_;
  std::vector<Rng> mobility_rngs_;
  std::optional<GroupAssignment> groups_;
  std::vector<NodeState> nodes_;
  std::vector<Event> queue_;
  std::uint64_t seq_ = 0;
  double now_ = 0.0;
  Mode mode_ = Mode::Protected;
  bool closing_ = false;
  std::uint32_t epoch_ = 0;
  std::uint64_t next_payload_ = 0;
  RunResult result_;
};

}  // namespace

RunResult run_detailed(const SimConfig& config, const RunOptions& options) {
  if (options.positions) {
    if (options.positions->size() < 2) {
      throw InvalidConfig("a fixed topology needs at least two nodes");
    }
    SimConfig adjusted = config;
    adjusted.node_count = static_cast<std::uint32_t>(options.positions->size());
    return Engine(adjusted, options).run();
  }
  validate(config);
  return Engine(config, options).run();
}

MetricsRecord run(const SimConfig& config) { return run_detailed(config).metrics; }

}  // namespace manet
