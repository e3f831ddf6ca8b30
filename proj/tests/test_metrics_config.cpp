#include <doctest.h>

#include <random>
#include <string>

#include "manet/config.hpp"
#include "manet/metrics.hpp"

using namespace manet;

namespace {

std::size_t count_lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

MetricsRecord random_record(std::mt19937_64& rng, int i) {
  MetricsRecord r;
  r.info.label = "row" + std::to_string(i);
  r.info.variant = static_cast<Variant>(rng() % 3);
  r.info.selfish_pct = static_cast<double>(rng() % 41);
  r.info.node_count = static_cast<std::uint32_t>(rng() % 400);
  r.info.seed = rng() % 1000;
  r.packets_sent = rng() % 100000;
  r.packets_received = r.packets_sent == 0 ? 0 : rng() % (r.packets_sent + 1);
  // pdr as it reads back from six decimals
  r.pdr = std::stod(std::to_string(compute_pdr(r.packets_sent, r.packets_received)));
  r.control.rreq = rng() % 100000;
  r.control.rrep = rng() % 10000;
  r.control.rerr = rng() % 1000;
  r.control.pfr_reports = rng() % 1000;
  r.control.lbp_reports = rng() % 1000;
  r.drops.selfish = rng() % 500;
  r.drops.punishment = rng() % 500;
  r.drops.no_route = rng() % 500;
  return r;
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("delivery ratio") {
    CHECK(compute_pdr(100, 73) == doctest::Approx(0.73));
    CHECK(compute_pdr(0, 0) == 1.0);
    CHECK_THROWS_AS((void)compute_pdr(100, 101), CountInversion);
  }

  TEST_CASE("overhead sums every control kind") {
    ControlCounts c;
    c.add(PacketKind::Rreq, 50);
    c.add(PacketKind::Rrep, 10);
    c.add(PacketKind::Rerr, 2);
    c.add(PacketKind::Data, 1000);
    CHECK(total_overhead(c) == 62);
    c.add(PacketKind::PfrReport);
    c.add(PacketKind::LbpReport, 2);
    CHECK(total_overhead(c) == 65);
  }

  TEST_CASE("overhead is monotone in each component") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 500; ++i) {
      ControlCounts c{rng() % 100, rng() % 100, rng() % 100, rng() % 100, rng() % 100};
      const auto base = total_overhead(c);
      const auto kind = static_cast<PacketKind>(rng() % 6);
      c.add(kind, 1 + rng() % 5);
      CHECK(total_overhead(c) >= base);
    }
  }

  TEST_CASE("conservation") {
    MetricsRecord r;
    r.packets_sent = 10;
    r.packets_received = 6;
    r.drops = {1, 1, 1};
    r.packets_in_flight = 1;
    CHECK(conserves_packets(r));
    r.packets_in_flight = 0;
    CHECK(!conserves_packets(r));
  }

  TEST_CASE("one record is two lines with fixed formatting") {
    MetricsRecord r;
    r.info = {"base", Variant::MDSR, 20.0, 121, 3};
    r.packets_sent = 100;
    r.packets_received = 73;
    r.pdr = 0.73;
    r.control = {50, 10, 2, 0, 0};
    const std::vector<MetricsRecord> rows{r};
    const auto csv = emit_csv(rows);
    CHECK(count_lines(csv) == 2);
    CHECK(csv.back() == '\n');
    CHECK(csv.substr(0, kCsvHeader.size()) == kCsvHeader);
    CHECK(csv.find(",0.730000,") != std::string::npos);
    CHECK(csv.find("base,MDSR,20.000000,121,3,100,73,0.730000,50,10,2,0,0,62,0,0,0\n") != std::string::npos);
    CHECK(emit_csv(rows) == csv);
  }

  TEST_CASE("labels override and commas cannot break the schema") {
    MetricsRecord r;
    r.info.label = "own";
    const std::vector<MetricsRecord> rows{r, r};
    const std::vector<std::string> labels{"a,b", "c"};
    const auto parsed = parse_csv(emit_csv(rows, labels));
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0].info.label == "a;b");
    CHECK(parsed[1].info.label == "c");
  }

  TEST_CASE("csv round trip is the identity on schema fields") {
    std::mt19937_64 rng(21);
    std::vector<MetricsRecord> rows;
    for (int i = 0; i < 200; ++i) {
      rows.push_back(random_record(rng, i));
    }
    const auto csv = emit_csv(rows);
    const auto parsed = parse_csv(csv);
    CHECK(parsed == rows);
    CHECK(emit_csv(parsed) == csv);
  }

  TEST_CASE("bad csv input") {
    CHECK_THROWS_AS((void)parse_csv(""), MissingColumns);
    CHECK_THROWS_AS((void)parse_csv("label,variant\nx,MDSR\n"), MissingColumns);
    const std::string header(kCsvHeader);
    CHECK_THROWS_AS((void)parse_csv(header + "\nx,MDSR,0\n"), MissingColumns);
    CHECK_THROWS_AS((void)parse_csv(header + "\nx,MDSR,0.000000,121,1,1,1,1.000000,1,1,1,0,0,99,0,0,0\n"),
                    MissingColumns);
    CHECK(parse_csv(header + "\n").empty());
  }

  TEST_CASE("NI table dump") {
    const std::vector<NiSnapshotRow> rows{{1, 59.97, 3, 4, 10, 7, 0.7, 3}};
    CHECK(emit_ni_dump(rows) == "epoch,time,node,neighbor,nprf,npf,grade,bp\n1,59.970000,3,4,10,7,0.700000,3\n");
  }

  TEST_CASE("ledger replay accepts a budget that is spent then spared") {
    using K = LedgerEvent::Kind;
    const std::vector<LedgerEvent> ok{
        {K::Writeback, 60, 1, 2, 2},  {K::Punished, 61, 1, 2, 2}, {K::Punished, 62, 1, 2, 1},
        {K::Spared, 63, 1, 2, 0},     {K::Writeback, 240, 1, 2, 1}, {K::Punished, 241, 1, 2, 1},
        {K::Spared, 242, 1, 2, 0},
    };
    const auto c = check_ledger(ok);
    CHECK(c.ok());
    CHECK(c.pairs == 1);
    CHECK(c.punishments == 3);
    CHECK(c.readmissions == 2);
  }

  TEST_CASE("ledger replay flags overdrafts and failed readmission") {
    using K = LedgerEvent::Kind;
    const std::vector<LedgerEvent> over{
        {K::Writeback, 60, 1, 2, 1}, {K::Punished, 61, 1, 2, 1}, {K::Punished, 62, 1, 2, 1}};
    const auto c = check_ledger(over);
    CHECK(!c.ok());
    CHECK(c.overdrafts == 1);
    CHECK(c.failed_readmissions == 1);
    const std::vector<LedgerEvent> separate{
        {K::Writeback, 60, 1, 2, 1}, {K::Writeback, 60, 3, 2, 1}, {K::Punished, 61, 1, 2, 1},
        {K::Punished, 61, 3, 2, 1}};
    const auto s = check_ledger(separate);
    CHECK(s.ok());
    CHECK(s.pairs == 2);
  }
}

TEST_SUITE("config") {
  TEST_CASE("durations") {
    CHECK(parse_config("SIMULATION-TIME 15M").sim_time == 900.0);
    CHECK(parse_duration("30S") == 30.0);
    CHECK(parse_duration("0.25") == 0.25);
    CHECK_THROWS_AS((void)parse_duration("-1S"), MalformedValue);
    CHECK_THROWS_AS((void)parse_duration("M"), MalformedValue);
  }

  TEST_CASE("empty file gives every default") {
    const auto c = parse_config("");
    CHECK(c == SimConfig{});
    CHECK(c.node_count == 121);
    CHECK(c.terrain == Vec2{1250.0, 1250.0});
    CHECK(c.radio_range == 125.227);
    CHECK(c.variant == Variant::MDSR);
    CHECK(c.sim_time == 900.0);
    CHECK(c.wp_pause == 30.0);
    CHECK(c.v_max == 10.0);
    CHECK(c.granularity == 0.5);
    CHECK(c.group_count == 4);
    CHECK_NOTHROW(validate(c));
  }

  TEST_CASE("full scenario file") {
    const auto c = parse_config(
        "# scenario\n"
        "SIMULATION-TIME 15M\n"
        "TERRAIN-DIMENSIONS (1250, 1250)\n"
        "NUMBER-OF-NODES 121\n"
        "NODE-PLACEMENT GRID\n"
        "MOBILITY RANDOM-WAYPOINT\n"
        "MOBILITY-WP-PAUSE 30S\n"
        "MOBILITY-WP-MIN-SPEED 0\n"
        "MOBILITY-WP-MAX-SPEED 10\n"
        "MOBILITY-POSITION-GRANULARITY 0.5\n"
        "PROMISCUOUS-MODE YES\n"
        "ROUTING-PROTOCOL DSR\n"
        "RADIO-RANGE 125.227   # unit disk\n"
        "VARIANT fgmdsr\n"
        "GROUP-COUNT 9\n"
        "LBP-FUNCTION EXPONENTIAL\n"
        "SEED 7\n");
    CHECK(c.variant == Variant::FGMDSR);
    CHECK(c.group_count == 9);
    CHECK(c.punishment.lbp_function == LbpFunction::Exponential);
    CHECK(c.seed == 7);
    CHECK(c.sim_time == 900.0);
  }

  TEST_CASE("errors carry the line number") {
    try {
      (void)parse_config("NUMBER-OF-NODES twelve");
      FAIL("expected MalformedValue");
    } catch (const MalformedValue& e) {
      CHECK(e.line() == 1);
    }
    try {
      (void)parse_config("SEED 1\n\nFOO 3\n");
      FAIL("expected UnknownKey");
    } catch (const UnknownKey& e) {
      CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS((void)parse_config("TERRAIN-DIMENSIONS 1250x1250"), MalformedValue);
    CHECK_THROWS_AS((void)parse_config("PROMISCUOUS-MODE maybe"), MalformedValue);
    CHECK_THROWS_AS((void)parse_config("VARIANT AODV"), MalformedValue);
    CHECK_THROWS_AS((void)parse_config("SEED"), MalformedValue);
  }

  TEST_CASE("validation") {
    SimConfig c;
    c.node_count = 120;
    CHECK_THROWS_AS(validate(c), InvalidConfig);
    c = {};
    c.group_count = 3;
    CHECK_THROWS_AS(validate(c), InvalidConfig);
    c = {};
    c.selfish_fraction = 1.5;
    CHECK_THROWS_AS(validate(c), InvalidConfig);
    c = {};
    c.v_min = 5.0;
    c.v_max = 1.0;
    CHECK_THROWS_AS(validate(c), InvalidConfig);
  }

  TEST_CASE("render then parse is the identity") {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 300; ++i) {
      SimConfig c;
      std::uniform_real_distribution<double> u(0.0, 1.0);
      c.sim_time = std::round(u(rng) * 1e5) / 7.0;
      c.terrain = {1.0 + u(rng) * 5000.0, 1.0 + u(rng) * 5000.0};
      const auto m = 2 + rng() % 20;
      c.node_count = static_cast<std::uint32_t>(m * m);
      c.mobility = rng() % 2 ? MobilityModel::None : MobilityModel::RandomWaypoint;
      c.wp_pause = u(rng) * 100.0;
      c.v_min = u(rng);
      c.v_max = c.v_min + u(rng) * 20.0;
      c.granularity = u(rng);
      c.promiscuous = rng() % 2 == 0;
      c.radio_range = 1.0 + u(rng) * 300.0;
      c.protected_window = 0.1 + u(rng) * 100.0;
      c.normal_window = 0.1 + u(rng) * 300.0;
      c.variant = static_cast<Variant>(rng() % 3);
      c.selfish_fraction = u(rng);
      c.selfish_drop_prob = u(rng);
      c.grade_threshold = u(rng);
      const auto side = 1 + rng() % 4;
      c.group_count = static_cast<std::uint32_t>(side * side);
      c.punishment.lbp_function = rng() % 2 ? LbpFunction::Linear : LbpFunction::Exponential;
      c.traffic.flow_count = static_cast<std::uint32_t>(1 + rng() % 50);
      c.traffic.packet_interval = 0.01 + u(rng);
      c.forward_timeout = 0.01 + u(rng);
      c.seed = rng();
      REQUIRE_NOTHROW(validate(c));
      CHECK(parse_config(render_config(c)) == c);
    }
  }

  TEST_CASE("variant names") {
    CHECK(parse_variant("pdsr") == Variant::PDSR);
    CHECK(std::string(to_string(Variant::FGMDSR)) == "FGMDSR");
    CHECK_THROWS_AS((void)parse_variant("x"), InvalidConfig);
  }
}
