#include "manet/metrics.hpp"

#include <charconv>
#include <cstdio>
#include <map>
#include <sstream>

namespace manet {

void ControlCounts::add(PacketKind kind, std::uint64_t n) {
  switch (kind) {
    case PacketKind::Rreq: rreq += n; break;
    case PacketKind::Rrep: rrep += n; break;
    case PacketKind::Rerr: rerr += n; break;
    case PacketKind::PfrReport: pfr_reports += n; break;
    case PacketKind::LbpReport: lbp_reports += n; break;
    case PacketKind::Data: break;
  }
}

double compute_pdr(std::uint64_t sent, std::uint64_t received) {
  if (received > sent) {
    throw CountInversion("received " + std::to_string(received) + " exceeds sent " + std::to_string(sent));
  }
  if (sent == 0) {
    return 1.0;
  }
  return static_cast<double>(received) / static_cast<double>(sent);
}

std::uint64_t total_overhead(const ControlCounts& c) {
  return c.rreq + c.rrep + c.rerr + c.pfr_reports + c.lbp_reports;
}

std::uint64_t total_overhead(const MetricsRecord& record) { return total_overhead(record.control); }

bool conserves_packets(const MetricsRecord& r) {
  return r.packets_sent ==
         r.packets_received + r.drops.selfish + r.drops.punishment + r.drops.no_route + r.packets_in_flight;
}

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string sanitize_label(std::string label) {
  for (auto& c : label) {
    if (c == ',' || c == '\n' || c == '\r') {
      c = ';';
    }
  }
  return label;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = line.find(sep, pos);
    out.push_back(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) {
      break;
    }
    pos = next + 1;
  }
  return out;
}

template <typename T>
T parse_num(std::string_view s) {
  T out{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw MissingColumns("unparseable CSV field '" + std::string(s) + "'");
  }
  return out;
}

}  // namespace

std::string emit_csv(std::span<const MetricsRecord> records, std::span<const std::string> labels) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const std::string label = sanitize_label(i < labels.size() ? labels[i] : r.info.label);
    out << label << ',' << to_string(r.info.variant) << ',' << fixed6(r.info.selfish_pct) << ','
        << r.info.node_count << ',' << r.info.seed << ',' << r.packets_sent << ',' << r.packets_received << ','
        << fixed6(r.pdr) << ',' << r.control.rreq << ',' << r.control.rrep << ',' << r.control.rerr << ','
        << r.control.pfr_reports << ',' << r.control.lbp_reports << ',' << total_overhead(r) << ','
        << r.drops.selfish << ',' << r.drops.punishment << ',' << r.drops.no_route << '\n';
  }
  return out.str();
}

std::vector<MetricsRecord> parse_csv(std::string_view text) {
  auto lines = split(text, '\n');
  while (!lines.empty() && lines.back().empty()) {
    lines.pop_back();
  }
  if (lines.empty() || lines.front() != kCsvHeader) {
    throw MissingColumns("CSV header does not match the metrics schema");
  }
  std::vector<MetricsRecord> records;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split(lines[i], ',');
    if (f.size() != 17) {
      throw MissingColumns("CSV row " + std::to_string(i) + " has " + std::to_string(f.size()) + " fields");
    }
    MetricsRecord r;
    r.info.label = std::string(f[0]);
    try {
      r.info.variant = parse_variant(f[1]);
    } catch (const InvalidConfig&) {
      throw MissingColumns("unknown variant in CSV row " + std::to_string(i));
    }
    r.info.selfish_pct = parse_num<double>(f[2]);
    r.info.node_count = parse_num<std::uint32_t>(f[3]);
    r.info.seed = parse_num<std::uint64_t>(f[4]);
    r.packets_sent = parse_num<std::uint64_t>(f[5]);
    r.packets_received = parse_num<std::uint64_t>(f[6]);
    r.pdr = parse_num<double>(f[7]);
    r.control.rreq = parse_num<std::uint64_t>(f[8]);
    r.control.rrep = parse_num<std::uint64_t>(f[9]);
    r.control.rerr = parse_num<std::uint64_t>(f[10]);
    r.control.pfr_reports = parse_num<std::uint64_t>(f[11]);
    r.control.lbp_reports = parse_num<std::uint64_t>(f[12]);
    if (parse_num<std::uint64_t>(f[13]) != total_overhead(r)) {
      throw MissingColumns("total_overhead disagrees with its components in row " + std::to_string(i));
    }
    r.drops.selfish = parse_num<std::uint64_t>(f[14]);
    r.drops.punishment = parse_num<std::uint64_t>(f[15]);
    r.drops.no_route = parse_num<std::uint64_t>(f[16]);
    records.push_back(std::move(r));
  }
  return records;
}

std::string emit_ni_dump(std::span<const NiSnapshotRow> rows) {
  std::ostringstream out;
  out << "epoch,time,node,neighbor,nprf,npf,grade,bp\n";
  for (const auto& r : rows) {
    out << r.epoch << ',' << fixed6(r.time) << ',' << r.node << ',' << r.neighbor << ',' << r.nprf << ','
        << r.npf << ',' << fixed6(r.grade) << ',' << r.bp << '\n';
  }
  return out.str();
}

LedgerCheck check_ledger(std::span<const LedgerEvent> events) {
  struct PairState {
    std::uint32_t budget = 0;
    std::uint32_t used = 0;
    bool awaiting_readmission = false;
  };
  std::map<std::pair<NodeId, NodeId>, PairState> pairs;
  LedgerCheck check;
  for (const auto& e : events) {
    auto& s = pairs[{e.observer, e.subject}];
    switch (e.kind) {
      case LedgerEvent::Kind::Writeback:
        s = PairState{e.bp, 0, false};
        break;
      case LedgerEvent::Kind::Punished:
        ++check.punishments;
        if (s.awaiting_readmission) {
          ++check.failed_readmissions;
        }
        if (++s.used > s.budget) {
          ++check.overdrafts;
        }
        s.awaiting_readmission = e.bp == 1;
        break;
      case LedgerEvent::Kind::Spared:
        if (s.awaiting_readmission) {
          ++check.readmissions;
          s.awaiting_readmission = false;
        }
        break;
    }
  }
  check.pairs = pairs.size();
  return check;
}

}  // namespace manet
