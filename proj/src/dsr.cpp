#include "manet/dsr.hpp"

#include <algorithm>
#include <string>

namespace manet {

bool is_valid_route(std::span<const NodeId> route) {
  if (route.size() < 2) {
    return false;
  }
  std::vector<NodeId> sorted(route.begin(), route.end());
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
}

const char* to_string(PacketKind kind) {
  switch (kind) {
    case PacketKind::Rreq: return "RREQ";
    case PacketKind::Rrep: return "RREP";
    case PacketKind::Rerr: return "RERR";
    case PacketKind::Data: return "DATA";
    case PacketKind::PfrReport: return "PFR_REPORT";
    case PacketKind::LbpReport: return "LBP_REPORT";
  }
  return "?";
}

bool is_control(PacketKind kind) { return kind != PacketKind::Data; }

// --- RouteCache ------------------------------------------------------------

void RouteCache::insert(const SourceRoute& route) {
  if (!is_valid_route(route)) {
    throw InvalidRoute("cannot cache a route with fewer than two hops or a repeated node");
  }
  routes_[route.back()].insert(route);
}

std::size_t RouteCache::remove_link(NodeId from, NodeId to) {
  std::size_t evicted = 0;
  for (auto it = routes_.begin(); it != routes_.end();) {
    auto& set = it->second;
    for (auto r = set.begin(); r != set.end();) {
      bool uses_link = false;
      for (std::size_t i = 0; i + 1 < r->size(); ++i) {
        if ((*r)[i] == from && (*r)[i + 1] == to) {
          uses_link = true;
          break;
        }
      }
      if (uses_link) {
        r = set.erase(r);
        ++evicted;
      } else {
        ++r;
      }
    }
    it = set.empty() ? routes_.erase(it) : std::next(it);
  }
  return evicted;
}

const std::set<SourceRoute>* RouteCache::routes_to(NodeId destination) const {
  auto it = routes_.find(destination);
  return it == routes_.end() ? nullptr : &it->second;
}

bool RouteCache::contains(const SourceRoute& route) const {
  if (route.empty()) {
    return false;
  }
  const auto* set = routes_to(route.back());
  return set != nullptr && set->contains(route);
}

std::size_t RouteCache::size() const {
  std::size_t n = 0;
  for (const auto& [dest, set] : routes_) {
    n += set.size();
  }
  return n;
}

// --- helpers ---------------------------------------------------------------

double grade_of(const NITable& ni, NodeId node) {
  auto it = ni.find(node);
  return it == ni.end() ? 1.0 : it->second.grade;
}

std::span<const NodeId> intermediates(const SourceRoute& route) {
  if (route.size() < 3) {
    return {};
  }
  return std::span<const NodeId>(route).subspan(1, route.size() - 2);
}

std::optional<NodeId> consume_bonus_point(NITable& ni, std::span<const NodeId> subjects) {
  for (NodeId subject : subjects) {
    auto it = ni.find(subject);
    if (it != ni.end() && it->second.bp > 0) {
      it->second = observe_sanctioned_drop(it->second);
      return subject;
    }
  }
  return std::nullopt;
}

namespace {

RoutingOutcome drop(RoutingAction action, std::optional<NodeId> punished = std::nullopt) {
  RoutingOutcome out;
  out.action = action;
  out.punished = punished;
  return out;
}

std::size_t index_of(const SourceRoute& route, NodeId node) {
  auto it = std::find(route.begin(), route.end(), node);
  return it == route.end() ? route.size() : static_cast<std::size_t>(it - route.begin());
}

}  // namespace

// --- route discovery -------------------------------------------------------

Packet originate_rreq(NodeId origin, NodeId destination, std::uint32_t& next_request_id) {
  Packet pkt;
  pkt.kind = PacketKind::Rreq;
  pkt.origin = origin;
  pkt.destination = destination;
  pkt.request_id = next_request_id++;
  pkt.route = {origin};
  return pkt;
}

RoutingOutcome handle_rreq(NodeId self, const Packet& pkt, NITable& ni, RreqSeen& seen,
                           const ReputationPolicy& policy) {
  if (pkt.route.empty() || std::find(pkt.route.begin(), pkt.route.end(), self) != pkt.route.end()) {
    return drop(RoutingAction::DropDuplicate);
  }
  const NodeId prev = pkt.route.back();

  if (policy.enabled) {
    const NodeId subjects[] = {prev, pkt.origin};
    if (auto punished = consume_bonus_point(ni, subjects)) {
      return drop(RoutingAction::DropPunished, punished);
    }
    // a low-grade node may still originate requests, it just cannot relay them
    if (prev != pkt.origin && grade_of(ni, prev) < policy.grade_threshold) {
      return drop(RoutingAction::DropLowGrade);
    }
  }

  const auto key = std::make_pair(pkt.origin, pkt.request_id);
  if (self == pkt.destination) {
    seen.insert(key);
    RoutingOutcome out;
    out.action = RoutingAction::Reply;
    out.packet.kind = PacketKind::Rrep;
    out.packet.origin = pkt.origin;
    out.packet.destination = pkt.destination;
    out.packet.request_id = pkt.request_id;
    out.packet.route = pkt.route;
    out.packet.route.push_back(self);
    out.packet.hop_index = out.packet.route.size() - 2;
    out.next_hop = out.packet.route[out.packet.hop_index];
    return out;
  }
  if (!seen.insert(key).second) {
    return drop(RoutingAction::DropDuplicate);
  }

  RoutingOutcome out;
  out.action = RoutingAction::Rebroadcast;
  out.packet = pkt;
  out.packet.route.push_back(self);
  return out;
}

RoutingOutcome handle_rrep(NodeId self, const Packet& pkt, NITable& ni, RouteCache& cache,
                           const ReputationPolicy& policy) {
  const std::size_t i = index_of(pkt.route, self);
  if (i >= pkt.route.size() || i + 1 >= pkt.route.size()) {
    throw BrokenReversePath("node " + std::to_string(self) + " is not on the reply's reverse path");
  }
  if (i == 0) {
    cache.insert(pkt.route);
    return drop(RoutingAction::Deliver);
  }

  const NodeId prev = pkt.route[i + 1];
  const NodeId next = pkt.route[i - 1];
  if (policy.enabled) {
    const NodeId subjects[] = {prev, next};
    if (auto punished = consume_bonus_point(ni, subjects)) {
      return drop(RoutingAction::DropPunished, punished);
    }
    // refuse to hand data to a low-grade relay downstream of this node
    const bool prev_is_relay = i + 1 < pkt.route.size() - 1;
    if (prev_is_relay && grade_of(ni, prev) < policy.grade_threshold) {
      return drop(RoutingAction::DropLowGrade);
    }
  }

  RoutingOutcome out;
  out.action = RoutingAction::Forward;
  out.packet = pkt;
  out.packet.hop_index = i - 1;
  out.next_hop = next;
  return out;
}

// --- route maintenance -----------------------------------------------------

Packet make_rerr(const Packet& data, NodeId self) {
  const std::size_t i = index_of(data.route, self);
  if (i + 1 >= data.route.size()) {
    throw NotOnRoute("node " + std::to_string(self) + " has no downstream link on this route");
  }
  Packet rerr;
  rerr.kind = PacketKind::Rerr;
  rerr.origin = self;
  rerr.destination = data.route.front();
  rerr.broken_link = {self, data.route[i + 1]};
  rerr.payload_id = data.payload_id;
  rerr.route.assign(data.route.rend() - static_cast<std::ptrdiff_t>(i) - 1, data.route.rend());
  rerr.hop_index = 0;
  return rerr;
}

RoutingOutcome handle_rerr(NodeId self, const Packet& pkt, NITable& ni, RouteCache& cache,
                           const ReputationPolicy& policy) {
  cache.remove_link(pkt.broken_link.first, pkt.broken_link.second);
  const std::size_t i = index_of(pkt.route, self);
  if (i >= pkt.route.size() || i + 1 == pkt.route.size()) {
    return drop(RoutingAction::Deliver);
  }
  if (policy.enabled && i > 0) {
    const NodeId subjects[] = {pkt.route[i - 1]};
    if (auto punished = consume_bonus_point(ni, subjects)) {
      return drop(RoutingAction::DropPunished, punished);
    }
  }
  RoutingOutcome out;
  out.action = RoutingAction::Forward;
  out.packet = pkt;
  out.packet.hop_index = i + 1;
  out.next_hop = pkt.route[i + 1];
  return out;
}

std::optional<SourceRoute> select_route(const RouteCache& cache, NodeId destination, const NITable& ni,
                                        double grade_threshold) {
  const auto* routes = cache.routes_to(destination);
  if (routes == nullptr) {
    return std::nullopt;
  }
  const SourceRoute* best = nullptr;
  for (const auto& route : *routes) {
    const auto relays = intermediates(route);
    const bool admissible = std::all_of(relays.begin(), relays.end(),
                                        [&](NodeId n) { return grade_of(ni, n) >= grade_threshold; });
    // set iteration is lexicographic, so strict < keeps the first of equal length
    if (admissible && (best == nullptr || route.size() < best->size())) {
      best = &route;
    }
  }
  if (best == nullptr) {
    return std::nullopt;
  }
  return *best;
}

// --- data forwarding -------------------------------------------------------

FilterOutcome retaliation_filter(NodeId self, const Packet& pkt, NITable& ni) {
  if (pkt.hop_index == 0 || pkt.hop_index >= pkt.route.size() || pkt.route[pkt.hop_index] != self) {
    throw NotOnRoute("node " + std::to_string(self) + " is not the current relay");
  }
  const NodeId subjects[] = {pkt.route[pkt.hop_index - 1], pkt.route.front(), pkt.route.back()};
  FilterOutcome out;
  out.punished = consume_bonus_point(ni, subjects);
  out.result = out.punished ? FilterResult::Punish : FilterResult::Forward;
  return out;
}

Packet forward_data(NodeId self, const Packet& pkt) {
  if (pkt.hop_index + 1 >= pkt.route.size() || pkt.route[pkt.hop_index] != self) {
    throw NotOnRoute("node " + std::to_string(self) + " is not the current hop of this packet");
  }
  Packet next = pkt;
  ++next.hop_index;
  return next;
}

}  // namespace manet
