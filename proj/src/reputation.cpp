#include "manet/reputation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace manet {

namespace {

constexpr double kRoundingBias = 1e-9;

}  // namespace

NITableEntry record_received_for_forwarding(NITableEntry entry) {
  if (entry.bp == 0) {
    ++entry.counters.nprf;
  }
  return entry;
}

NITableEntry record_forwarded(NITableEntry entry) {
  if (entry.bp > 0) {
    return entry;
  }
  if (entry.counters.npf + 1 > entry.counters.nprf) {
    throw CounterViolation("npf would exceed nprf for node " + std::to_string(entry.node_id));
  }
  ++entry.counters.npf;
  return entry;
}

NITableEntry observe_sanctioned_drop(NITableEntry entry) {
  if (entry.bp == 0) {
    throw NoPunishmentPending("no bonus points pending for node " + std::to_string(entry.node_id));
  }
  --entry.bp;
  return entry;
}

NITableEntry retract_received_for_forwarding(NITableEntry entry) {
  if (entry.counters.nprf > entry.counters.npf) {
    --entry.counters.nprf;
  }
  return entry;
}

NITableEntry admit_new_node(const NITable& table, NodeId node_id) {
  if (table.contains(node_id)) {
    throw DuplicateNode("node " + std::to_string(node_id) + " already in NI table");
  }
  NITableEntry entry;
  entry.node_id = node_id;
  return entry;
}

double compute_pfr(ObservationCounters counters) {
  if (counters.nprf == 0) {
    return 1.0;
  }
  return static_cast<double>(counters.npf) / static_cast<double>(counters.nprf);
}

double round_half_up(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::floor(value * scale + 0.5 + kRoundingBias) / scale;
}

double aggregate_grade(std::span<const double> pfr_samples, int decimals) {
  if (pfr_samples.empty()) {
    throw EmptySamples("grade aggregation needs at least one PFR sample");
  }
  const double sum = std::accumulate(pfr_samples.begin(), pfr_samples.end(), 0.0);
  const double mean = sum / static_cast<double>(pfr_samples.size());
  return std::clamp(round_half_up(mean, decimals), 0.0, 1.0);
}

std::uint32_t compute_lbp(double grade, const PunishmentConfig& config) {
  const double gain = 1.0 - std::clamp(grade, 0.0, 1.0);
  // grade carries at most a few decimals; rounding the scaled gain first keeps
  // 1 - 0.7 = 0.30000000000000004 from leaking into the result
  const double scaled = std::round(gain * 10.0 * 1e6) / 1e6;
  switch (config.lbp_function) {
    case LbpFunction::Linear:
      return static_cast<std::uint32_t>(std::floor(scaled + 0.5));
    case LbpFunction::Exponential: {
      const double points = std::floor(std::exp2(scaled) + 0.5) - 1.0;
      return points <= 0.0 ? 0U : static_cast<std::uint32_t>(points);
    }
  }
  return 0;
}

std::uint32_t aggregate_bp(std::span<const std::uint32_t> lbp_samples) {
  if (lbp_samples.empty()) {
    throw EmptySamples("bp aggregation needs at least one LBP sample");
  }
  const std::uint64_t sum = std::accumulate(lbp_samples.begin(), lbp_samples.end(), std::uint64_t{0});
  const std::uint64_t n = lbp_samples.size();
  // half-up on the exact rational sum / n
  return static_cast<std::uint32_t>((2 * sum + n) / (2 * n));
}

std::vector<PfrReport> finalize_epoch_phase1(const std::map<NodeId, ObservationCounters>& local_counters) {
  std::vector<PfrReport> reports;
  reports.reserve(local_counters.size());
  for (const auto& [subject, counters] : local_counters) {
    reports.push_back({subject, compute_pfr(counters)});
  }
  return reports;
}

TempTable ingest_pfr_report(TempTable temp, const PfrReport& report, const std::set<NodeId>& my_neighbors) {
  if (!my_neighbors.contains(report.subject)) {
    return temp;
  }
  auto& entry = temp[report.subject];
  entry.node_id = report.subject;
  entry.pfr_samples.push_back(report.pfr);
  return temp;
}

Phase2Result finalize_epoch_phase2(TempTable temp, const PunishmentConfig& config) {
  Phase2Result result;
  result.reports.reserve(temp.size());
  for (auto& [subject, entry] : temp) {
    if (entry.pfr_samples.empty()) {
      throw EmptySamples("no PFR samples for node " + std::to_string(subject));
    }
    entry.grade = aggregate_grade(entry.pfr_samples, config.grade_rounding);
    const std::uint32_t lbp = compute_lbp(entry.grade, config);
    entry.lbp_samples.assign(1, lbp);
    result.reports.push_back({subject, lbp});
  }
  result.temp = std::move(temp);
  return result;
}

TempTable ingest_lbp_report(TempTable temp, const LbpReport& report) {
  auto it = temp.find(report.subject);
  if (it != temp.end()) {
    it->second.lbp_samples.push_back(report.lbp);
  }
  return temp;
}

NITable finalize_epoch_phase3(TempTable& temp, NITable ni) {
  for (const auto& [subject, entry] : temp) {
    auto it = ni.find(subject);
    if (it == ni.end() || entry.lbp_samples.empty()) {
      continue;
    }
    it->second.grade = entry.grade;
    it->second.bp = aggregate_bp(entry.lbp_samples);
  }
  for (auto& [id, entry] : ni) {
    entry.counters = {};
  }
  temp.clear();
  return ni;
}

bool entry_is_consistent(const NITableEntry& entry) {
  return entry.grade >= 0.0 && entry.grade <= 1.0 && entry.counters.npf <= entry.counters.nprf;
}

}  // namespace manet
