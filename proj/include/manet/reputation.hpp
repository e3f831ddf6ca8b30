#pragma once

// Neighbor reputation bookkeeping: overheard forwarding counters, per-epoch
// forwarding ratios, grades and bonus points (the number of a misbehaving
// neighbor's packets an honest node drops before re-admitting it).
//
// Everything here is a pure transformation of its arguments.

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <vector>

#include "manet/types.hpp"

namespace manet {

struct ObservationCounters {
  std::uint32_t nprf = 0;  ///< packets received for forwarding
  std::uint32_t npf = 0;   ///< packets forwarded

  friend bool operator==(const ObservationCounters&, const ObservationCounters&) = default;
};

struct NITableEntry {
  NodeId node_id = 0;
  ObservationCounters counters;
  double grade = 1.0;
  std::uint32_t bp = 0;

  friend bool operator==(const NITableEntry&, const NITableEntry&) = default;
};

/// Neighborhood information table, keyed by neighbor id.
using NITable = std::map<NodeId, NITableEntry>;

struct TempTableEntry {
  NodeId node_id = 0;
  std::vector<double> pfr_samples;  ///< own observation first, then neighbors' reports
  double grade = 1.0;
  std::vector<std::uint32_t> lbp_samples;

  friend bool operator==(const TempTableEntry&, const TempTableEntry&) = default;
};

using TempTable = std::map<NodeId, TempTableEntry>;

enum class LbpFunction { Linear, Exponential };
enum class BpRounding { HalfUp };

struct PunishmentConfig {
  LbpFunction lbp_function = LbpFunction::Linear;
  int grade_rounding = 1;  ///< decimal places
  BpRounding bp_rounding = BpRounding::HalfUp;

  friend bool operator==(const PunishmentConfig&, const PunishmentConfig&) = default;
};

struct PfrReport {
  NodeId subject = 0;
  double pfr = 1.0;

  friend bool operator==(const PfrReport&, const PfrReport&) = default;
};

struct LbpReport {
  NodeId subject = 0;
  std::uint32_t lbp = 0;

  friend bool operator==(const LbpReport&, const LbpReport&) = default;
};

// --- observation -----------------------------------------------------------

/// Counts an overheard receive-for-forwarding. No-op while bp > 0.
[[nodiscard]] NITableEntry record_received_for_forwarding(NITableEntry entry);

/// Counts an overheard forward. No-op while bp > 0.
/// Throws CounterViolation if npf would exceed nprf.
[[nodiscard]] NITableEntry record_forwarded(NITableEntry entry);

/// Consumes one bonus point after a sanctioned drop. Throws NoPunishmentPending at bp == 0.
[[nodiscard]] NITableEntry observe_sanctioned_drop(NITableEntry entry);

/// Withdraws an unresolved receive-for-forwarding the observer could not judge
/// (it lost earshot of the subject). Never drops nprf below npf.
[[nodiscard]] NITableEntry retract_received_for_forwarding(NITableEntry entry);

/// Default entry for a node not seen before: honest until observed otherwise.
/// Throws DuplicateNode if the id is already in the table.
[[nodiscard]] NITableEntry admit_new_node(const NITable& table, NodeId node_id);

// --- aggregation -----------------------------------------------------------

/// npf / nprf, or 1.0 without evidence.
[[nodiscard]] double compute_pfr(ObservationCounters counters);

/// Rounds half-up to `decimals` places. A tiny bias absorbs binary
/// representation error so 0.75 -> 0.8 and 0.25 -> 0.3 regardless of how
/// the mean was accumulated.
[[nodiscard]] double round_half_up(double value, int decimals);

/// Mean of the samples, rounded half-up. Throws EmptySamples.
[[nodiscard]] double aggregate_grade(std::span<const double> pfr_samples, int decimals = 1);

/// Local bonus points from a grade: misbehavior gain (1 - grade) scaled to 0..10,
/// either used directly (Linear) or as a power of two minus one (Exponential).
[[nodiscard]] std::uint32_t compute_lbp(double grade, const PunishmentConfig& config = {});

/// Neighborhood mean of local bonus points, rounded half-up. Throws EmptySamples.
[[nodiscard]] std::uint32_t aggregate_bp(std::span<const std::uint32_t> lbp_samples);

// --- epoch pipeline --------------------------------------------------------

/// One PFR report per observed neighbor.
[[nodiscard]] std::vector<PfrReport> finalize_epoch_phase1(
    const std::map<NodeId, ObservationCounters>& local_counters);

/// Appends the report's PFR to the subject's samples if the subject is a
/// neighbor of the receiving node; otherwise returns the table unchanged.
[[nodiscard]] TempTable ingest_pfr_report(TempTable temp, const PfrReport& report,
                                          const std::set<NodeId>& my_neighbors);

struct Phase2Result {
  std::vector<LbpReport> reports;
  TempTable temp;
};

/// Grades every subject and seeds its LBP samples with the local value.
[[nodiscard]] Phase2Result finalize_epoch_phase2(TempTable temp, const PunishmentConfig& config = {});

/// Appends a neighbor's LBP for a subject already in the temp table.
[[nodiscard]] TempTable ingest_lbp_report(TempTable temp, const LbpReport& report);

/// Writes grades and averaged bonus points back into the NI table, replacing
/// any residual bp, and resets the observation counters for the next epoch.
/// The temp table is cleared.
[[nodiscard]] NITable finalize_epoch_phase3(TempTable& temp, NITable ni);

/// Structural invariants: 0 <= grade <= 1, npf <= nprf.
[[nodiscard]] bool entry_is_consistent(const NITableEntry& entry);

}  // namespace manet
