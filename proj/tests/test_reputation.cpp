#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "manet/reputation.hpp"

using namespace manet;

namespace {

NITableEntry entry(std::uint32_t nprf, std::uint32_t npf, std::uint32_t bp, double grade = 1.0) {
  NITableEntry e;
  e.node_id = 7;
  e.counters = {nprf, npf};
  e.bp = bp;
  e.grade = grade;
  return e;
}

/// Reference grade: exact rational mean in tenths, rounded half-up with integer arithmetic.
double oracle_grade(const std::vector<int>& tenths) {
  long sum = 0;
  for (int t : tenths) {
    sum += t;
  }
  const long n = static_cast<long>(tenths.size());
  // round(sum / n) in tenths, half-up: floor((2*sum + n) / (2n))
  const long rounded = (2 * sum + n) / (2 * n);
  return static_cast<double>(rounded) / 10.0;
}

std::vector<double> as_samples(const std::vector<int>& tenths) {
  std::vector<double> out;
  for (int t : tenths) {
    out.push_back(t / 10.0);
  }
  return out;
}

}  // namespace

TEST_SUITE("observation counters") {
  TEST_CASE("receiving for forwarding increments nprf unless punishment is pending") {
    CHECK(record_received_for_forwarding(entry(0, 0, 0)) == entry(1, 0, 0));
    CHECK(record_received_for_forwarding(entry(9, 7, 0)) == entry(10, 7, 0));
    CHECK(record_received_for_forwarding(entry(9, 7, 2)) == entry(9, 7, 2));
  }

  TEST_CASE("forwarding increments npf, gated by bp and bounded by nprf") {
    CHECK(record_forwarded(entry(10, 6, 0)) == entry(10, 7, 0));
    CHECK(record_forwarded(entry(10, 6, 3)) == entry(10, 6, 3));
    CHECK_THROWS_AS((void)record_forwarded(entry(5, 5, 0)), CounterViolation);
  }

  TEST_CASE("sanctioned drops consume bonus points one at a time") {
    CHECK(observe_sanctioned_drop(entry(0, 0, 3)).bp == 2);
    CHECK(observe_sanctioned_drop(entry(0, 0, 1)).bp == 0);
    CHECK_THROWS_AS((void)observe_sanctioned_drop(entry(0, 0, 0)), NoPunishmentPending);
  }

  TEST_CASE("punishment terminates after exactly bp drops") {
    for (std::uint32_t b = 0; b <= 12; ++b) {
      auto e = entry(0, 0, b);
      std::uint32_t ok = 0;
      while (true) {
        try {
          e = observe_sanctioned_drop(e);
          ++ok;
        } catch (const NoPunishmentPending&) {
          break;
        }
      }
      CHECK(ok == b);
      CHECK(e.bp == 0);
    }
  }

  TEST_CASE("retraction never pushes nprf below npf") {
    CHECK(retract_received_for_forwarding(entry(5, 3, 0)).counters == ObservationCounters{4, 3});
    CHECK(retract_received_for_forwarding(entry(3, 3, 0)).counters == ObservationCounters{3, 3});
    CHECK(retract_received_for_forwarding(entry(0, 0, 0)).counters == ObservationCounters{0, 0});
  }
}

TEST_SUITE("admission") {
  TEST_CASE("a fresh node starts honest with zero counters") {
    NITable table;
    const auto e = admit_new_node(table, 99);
    CHECK(e.node_id == 99);
    CHECK(e.counters == ObservationCounters{0, 0});
    CHECK(e.grade == 1.0);
    CHECK(e.bp == 0);
  }

  TEST_CASE("admitting a known id is rejected") {
    NITable table;
    table[4] = admit_new_node(table, 4);
    CHECK_THROWS_AS((void)admit_new_node(table, 4), DuplicateNode);
  }

  TEST_CASE("two fresh ids give independent default entries") {
    NITable table;
    table[1] = admit_new_node(table, 1);
    table[2] = admit_new_node(table, 2);
    table[1] = record_received_for_forwarding(table[1]);
    CHECK(table[1].counters.nprf == 1);
    CHECK(table[2].counters.nprf == 0);
    CHECK(table[2].node_id == 2);
  }
}

TEST_SUITE("aggregation") {
  TEST_CASE("forwarding ratio") {
    CHECK(compute_pfr({10, 7}) == doctest::Approx(0.7));
    CHECK(compute_pfr({0, 0}) == 1.0);
    CHECK(compute_pfr({8, 8}) == 1.0);
  }

  TEST_CASE("grade of the worked-example rows") {
    CHECK(aggregate_grade(std::vector<double>{0.6, 0.8, 0.7}) == doctest::Approx(0.7));
    CHECK(aggregate_grade(std::vector<double>{0.8, 0.7, 0.7, 0.8, 0.6}) == doctest::Approx(0.7));
    CHECK(aggregate_grade(std::vector<double>{0.8, 0.8, 0.7, 0.7, 0.8}) == doctest::Approx(0.8));
    CHECK(aggregate_grade(std::vector<double>{1.0}) == 1.0);
    CHECK_THROWS_AS((void)aggregate_grade(std::vector<double>{}), EmptySamples);
  }

  TEST_CASE("row with mean 0.725 rounds to 0.7 under half-up") {
    CHECK(aggregate_grade(std::vector<double>{0.8, 0.5, 0.7, 0.8, 0.9, 0.9, 0.8, 0.4}) == doctest::Approx(0.7));
  }

  TEST_CASE("grade matches an integer-arithmetic oracle on random tenths") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> tenth(0, 10);
    std::uniform_int_distribution<int> len(1, 12);
    for (int trial = 0; trial < 5000; ++trial) {
      std::vector<int> t(static_cast<std::size_t>(len(rng)));
      for (auto& v : t) {
        v = tenth(rng);
      }
      CHECK(aggregate_grade(as_samples(t)) == doctest::Approx(oracle_grade(t)).epsilon(1e-12));
    }
  }

  TEST_CASE("half-up rounding at the boundary") {
    CHECK(round_half_up(0.75, 1) == doctest::Approx(0.8));
    CHECK(round_half_up(0.25, 1) == doctest::Approx(0.3));
    CHECK(round_half_up(0.7499, 1) == doctest::Approx(0.7));
    CHECK(round_half_up(2.5, 0) == 3.0);
  }

  TEST_CASE("linear bonus points") {
    CHECK(compute_lbp(0.7) == 3);
    CHECK(compute_lbp(0.8) == 2);
    CHECK(compute_lbp(1.0) == 0);
    CHECK(compute_lbp(0.0) == 10);
  }

  TEST_CASE("exponential bonus points") {
    PunishmentConfig exp;
    exp.lbp_function = LbpFunction::Exponential;
    CHECK(compute_lbp(0.7, exp) == 7);
    CHECK(compute_lbp(1.0, exp) == 0);
    CHECK(compute_lbp(0.0, exp) == 1023);
    for (int g = 0; g <= 10; ++g) {
      const int mg10 = 10 - g;
      CHECK(compute_lbp(g / 10.0, exp) == static_cast<std::uint32_t>((1 << mg10) - 1));
    }
  }

  TEST_CASE("bonus points are non-increasing in grade") {
    PunishmentConfig exp;
    exp.lbp_function = LbpFunction::Exponential;
    for (int g = 1; g <= 10; ++g) {
      CHECK(compute_lbp(g / 10.0) <= compute_lbp((g - 1) / 10.0));
      CHECK(compute_lbp(g / 10.0, exp) <= compute_lbp((g - 1) / 10.0, exp));
    }
  }

  TEST_CASE("raising a sample never lowers the grade") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> tenth(0, 10);
    for (int trial = 0; trial < 2000; ++trial) {
      std::vector<int> t(6);
      for (auto& v : t) {
        v = tenth(rng);
      }
      const auto base = aggregate_grade(as_samples(t));
      const auto idx = static_cast<std::size_t>(trial % 6);
      if (t[idx] < 10) {
        ++t[idx];
      }
      CHECK(aggregate_grade(as_samples(t)) >= base - 1e-12);
    }
  }

  TEST_CASE("neighborhood bonus points") {
    CHECK(aggregate_bp(std::vector<std::uint32_t>{3, 3, 3}) == 3);
    CHECK(aggregate_bp(std::vector<std::uint32_t>{2, 3}) == 3);
    CHECK(aggregate_bp(std::vector<std::uint32_t>{0}) == 0);
    CHECK(aggregate_bp(std::vector<std::uint32_t>{1, 2, 2}) == 2);
    CHECK_THROWS_AS((void)aggregate_bp(std::vector<std::uint32_t>{}), EmptySamples);
  }

  TEST_CASE("neighborhood bonus points match a hand oracle") {
    std::mt19937_64 rng(19);
    std::uniform_int_distribution<std::uint32_t> lbp(0, 10);
    for (int trial = 0; trial < 3000; ++trial) {
      std::vector<std::uint32_t> s(1 + trial % 7);
      std::uint64_t sum = 0;
      for (auto& v : s) {
        v = lbp(rng);
        sum += v;
      }
      const double mean = static_cast<double>(sum) / static_cast<double>(s.size());
      CHECK(aggregate_bp(s) == static_cast<std::uint32_t>(std::floor(mean + 0.5)));
    }
  }
}

TEST_SUITE("epoch pipeline") {
  TEST_CASE("phase 1 emits one report per observed neighbor") {
    CHECK(finalize_epoch_phase1({{2, {10, 7}}}) == std::vector<PfrReport>{{2, 0.7}});
    CHECK(finalize_epoch_phase1({}).empty());
    const auto two = finalize_epoch_phase1({{2, {10, 7}}, {3, {4, 4}}});
    REQUIRE(two.size() == 2);
    CHECK(two[0].subject == 2);
    CHECK(two[0].pfr == doctest::Approx(0.7));
    CHECK(two[1] == PfrReport{3, 1.0});
  }

  TEST_CASE("reports are filtered to neighbors and appended without dedup") {
    TempTable temp;
    temp[1] = {1, {0.6}, 1.0, {}};
    const std::set<NodeId> neighbors{1, 2};
    temp = ingest_pfr_report(std::move(temp), {1, 0.8}, neighbors);
    CHECK(temp.at(1).pfr_samples == std::vector<double>{0.6, 0.8});
    const auto before = temp;
    CHECK(ingest_pfr_report(temp, {26, 0.1}, neighbors) == before);
    temp = ingest_pfr_report(std::move(temp), {1, 0.8}, neighbors);
    CHECK(temp.at(1).pfr_samples.size() == 3);
  }

  TEST_CASE("phase 2 grades and seeds local bonus points") {
    TempTable temp;
    temp[1] = {1, {0.6, 0.8, 0.7}, 1.0, {}};
    temp[3] = {3, {0.8, 0.7, 0.9}, 1.0, {}};
    temp[24] = {24, {1.0, 1.0}, 1.0, {}};
    const auto result = finalize_epoch_phase2(temp);
    CHECK(result.reports == std::vector<LbpReport>{{1, 3}, {3, 2}, {24, 0}});
    CHECK(result.temp.at(1).grade == doctest::Approx(0.7));
    CHECK(result.temp.at(3).grade == doctest::Approx(0.8));
    CHECK(result.temp.at(24).grade == 1.0);
    CHECK(result.temp.at(1).lbp_samples == std::vector<std::uint32_t>{3});
  }

  TEST_CASE("lbp reports only extend subjects already graded") {
    TempTable temp;
    temp[1] = {1, {0.7}, 0.7, {3}};
    temp = ingest_lbp_report(std::move(temp), {1, 3});
    temp = ingest_lbp_report(std::move(temp), {9, 5});
    CHECK(temp.at(1).lbp_samples == std::vector<std::uint32_t>{3, 3});
    CHECK(!temp.contains(9));
  }

  TEST_CASE("phase 3 writes grades and bonus points back and resets counters") {
    NITable ni;
    ni[1] = entry(40, 28, 0);
    ni[1].node_id = 1;
    ni[2] = entry(12, 12, 0);
    ni[2].node_id = 2;
    TempTable temp;
    temp[1] = {1, {0.6, 0.8, 0.7}, 0.7, {3, 3, 3}};
    temp[2] = {2, {1.0, 1.0}, 1.0, {0, 0}};
    ni = finalize_epoch_phase3(temp, ni);
    CHECK(temp.empty());
    CHECK(ni.at(1).grade == doctest::Approx(0.7));
    CHECK(ni.at(1).bp == 3);
    CHECK(ni.at(1).counters == ObservationCounters{0, 0});
    CHECK(ni.at(2).grade == 1.0);
    CHECK(ni.at(2).bp == 0);
  }

  TEST_CASE("phase 3 replaces residual bonus points") {
    NITable ni;
    ni[5] = entry(0, 0, 2);
    ni[5].node_id = 5;
    TempTable temp;
    temp[5] = {5, {0.7}, 0.7, {3}};
    ni = finalize_epoch_phase3(temp, ni);
    CHECK(ni.at(5).bp == 3);
  }

  TEST_CASE("full worked example for one observer") {
    // own observation of A is 0.6; neighbors report 0.8 and 0.7; all three compute lbp 3
    NITable ni;
    ni[1] = admit_new_node(ni, 1);
    ni[1].counters = {10, 6};
    auto reports = finalize_epoch_phase1({{1, ni[1].counters}});
    TempTable temp;
    for (const auto& r : reports) {
      temp[r.subject] = {r.subject, {r.pfr}, 1.0, {}};
    }
    const std::set<NodeId> neighbors{1};
    temp = ingest_pfr_report(std::move(temp), {1, 0.8}, neighbors);
    temp = ingest_pfr_report(std::move(temp), {1, 0.7}, neighbors);
    auto p2 = finalize_epoch_phase2(std::move(temp));
    CHECK(p2.reports == std::vector<LbpReport>{{1, 3}});
    temp = ingest_lbp_report(std::move(p2.temp), {1, 3});
    temp = ingest_lbp_report(std::move(temp), {1, 3});
    ni = finalize_epoch_phase3(temp, ni);
    CHECK(ni.at(1).grade == doctest::Approx(0.7));
    CHECK(ni.at(1).bp == 3);
    CHECK(ni.at(1).counters == ObservationCounters{0, 0});
  }
}

TEST_CASE("entry consistency predicate") {
  CHECK(entry_is_consistent(entry(3, 2, 0)));
  CHECK(!entry_is_consistent(entry(2, 3, 0)));
  CHECK(!entry_is_consistent(entry(0, 0, 0, 1.5)));
  CHECK(!entry_is_consistent(entry(0, 0, 0, -0.1)));
}
