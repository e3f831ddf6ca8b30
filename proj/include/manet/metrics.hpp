#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "manet/config.hpp"
#include "manet/dsr.hpp"
#include "manet/types.hpp"

namespace manet {

struct ControlCounts {
  std::uint64_t rreq = 0;
  std::uint64_t rrep = 0;
  std::uint64_t rerr = 0;
  std::uint64_t pfr_reports = 0;
  std::uint64_t lbp_reports = 0;

  void add(PacketKind kind, std::uint64_t n = 1);
  friend bool operator==(const ControlCounts&, const ControlCounts&) = default;
};

struct DropCounts {
  std::uint64_t selfish = 0;
  std::uint64_t punishment = 0;
  std::uint64_t no_route = 0;

  friend bool operator==(const DropCounts&, const DropCounts&) = default;
};

/// What a run was: the identifying CSV columns.
struct RunInfo {
  std::string label;
  Variant variant = Variant::MDSR;
  double selfish_pct = 0.0;
  std::uint32_t node_count = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const RunInfo&, const RunInfo&) = default;
};

struct MetricsRecord {
  RunInfo info;
  std::uint64_t packets_sent = 0;
  std::uint64_t packets_received = 0;
  ControlCounts control;
  std::uint64_t data_forwards = 0;
  DropCounts drops;
  std::uint64_t packets_in_flight = 0;
  std::vector<std::uint64_t> per_node_transmissions;
  double pdr = 1.0;

  friend bool operator==(const MetricsRecord&, const MetricsRecord&) = default;
};

/// received / sent, 1.0 when nothing was sent. Throws CountInversion if received > sent.
[[nodiscard]] double compute_pdr(std::uint64_t sent, std::uint64_t received);

/// Sum of every control transmission kind, reputation reports included.
[[nodiscard]] std::uint64_t total_overhead(const ControlCounts& control);
[[nodiscard]] std::uint64_t total_overhead(const MetricsRecord& record);

/// sent == received + drops + in flight.
[[nodiscard]] bool conserves_packets(const MetricsRecord& record);

inline constexpr std::string_view kCsvHeader =
    "label,variant,selfish_pct,node_count,seed,sent,received,pdr,rreq,rrep,rerr,pfr_reports,"
    "lbp_reports,total_overhead,drops_selfish,drops_punishment,drops_no_route";

/// Header plus one row per record. When `labels` is non-empty it overrides
/// each record's own label.
[[nodiscard]] std::string emit_csv(std::span<const MetricsRecord> records,
                                   std::span<const std::string> labels = {});

/// Parses the emit_csv schema back into records (columns outside the schema
/// are left at their defaults). Throws MissingColumns on a bad header.
[[nodiscard]] std::vector<MetricsRecord> parse_csv(std::string_view text);

/// One row of the per-epoch NI table dump.
struct NiSnapshotRow {
  std::uint32_t epoch = 0;
  double time = 0.0;
  NodeId node = 0;
  NodeId neighbor = 0;
  std::uint32_t nprf = 0;
  std::uint32_t npf = 0;
  double grade = 1.0;
  std::uint32_t bp = 0;
};

[[nodiscard]] std::string emit_ni_dump(std::span<const NiSnapshotRow> rows);

/// Per-(observer, subject) punishment accounting between epoch writebacks.
struct LedgerEvent {
  enum class Kind : std::uint8_t {
    Writeback,     ///< bp written at an epoch writeback
    Punished,      ///< a packet was dropped on the subject's account
    Spared,        ///< the subject was consulted with bp == 0 and nothing was consumed on its account
  };
  Kind kind = Kind::Writeback;
  double time = 0.0;
  NodeId observer = 0;
  NodeId subject = 0;
  std::uint32_t bp = 0;  ///< Writeback: value written; Punished: value before the drop
  PacketKind packet = PacketKind::Data;
};

struct LedgerCheck {
  std::uint64_t pairs = 0;
  std::uint64_t punishments = 0;
  std::uint64_t overdrafts = 0;        ///< drops beyond the bp last written
  std::uint64_t readmissions = 0;      ///< bp reached 0 and the next consultation spared the subject
  std::uint64_t failed_readmissions = 0;
  [[nodiscard]] bool ok() const { return overdrafts == 0 && failed_readmissions == 0; }
};

/// Replays a ledger and checks that no pair is punished beyond the bp written
/// at its preceding writeback and that a subject whose bp reached zero is
/// spared at its next consultation.
[[nodiscard]] LedgerCheck check_ledger(std::span<const LedgerEvent> events);

}  // namespace manet
