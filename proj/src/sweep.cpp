#include "manet/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <set>
#include <tuple>

#include "manet/simulator.hpp"

namespace manet {

SimConfig sweep_point(const SimConfig& base, SweepAxis axis, double value, Variant variant, std::uint64_t seed) {
  SimConfig c = base;
  c.variant = variant;
  c.seed = seed;
  switch (axis) {
    case SweepAxis::SelfishPct:
      c.selfish_fraction = value / 100.0;
      break;
    case SweepAxis::NodeCount: {
      const auto count = static_cast<std::uint32_t>(std::llround(value));
      const double base_side = std::round(std::sqrt(static_cast<double>(base.node_count)));
      const double side = std::round(std::sqrt(static_cast<double>(count)));
      if (base_side >= 2.0 && side >= 2.0) {
        c.terrain = {base.terrain.x / (base_side - 1.0) * (side - 1.0),
                     base.terrain.y / (base_side - 1.0) * (side - 1.0)};
      }
      c.node_count = count;
      break;
    }
    case SweepAxis::Variant:
      break;
  }
  return c;
}

namespace {

const char* axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::SelfishPct: return "selfish_pct";
    case SweepAxis::NodeCount: return "node_count";
    case SweepAxis::Variant: return "variant";
  }
  return "axis";
}

std::string axis_label(SweepAxis axis, double value, Variant variant) {
  if (axis == SweepAxis::Variant) {
    return std::string("variant=") + to_string(variant);
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s=%g", axis_name(axis), value);
  return buf;
}

}  // namespace

std::vector<MetricsRecord> run_sweep(const SimConfig& base, const SweepSpec& spec) {
  struct Point {
    double value;
    Variant variant;
    std::uint64_t seed;
  };
  std::vector<double> values = spec.values;
  if (spec.axis == SweepAxis::Variant) {
    values = {0.0};
  }
  std::vector<Point> points;
  for (double v : values) {
    for (Variant variant : spec.variants) {
      for (std::uint64_t seed : spec.seeds) {
        points.push_back({v, variant, seed});
      }
    }
  }
  std::sort(points.begin(), points.end(), [](const Point& a, const Point& b) {
    return std::tie(a.value, a.variant, a.seed) < std::tie(b.value, b.variant, b.seed);
  });

  std::vector<SimConfig> configs;
  configs.reserve(points.size());
  for (const auto& p : points) {
    configs.push_back(sweep_point(base, spec.axis, p.value, p.variant, p.seed));
    validate(configs.back());
  }

  std::vector<MetricsRecord> records(points.size());
  std::vector<std::exception_ptr> errors(points.size());
  const auto count = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      records[i] = run(configs[i]);
      records[i].info.label = axis_label(spec.axis, points[i].value, points[i].variant);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
  return records;
}

std::map<std::string, std::string> emit_plot_data(std::string_view csv) {
  const auto records = parse_csv(csv);
  if (records.empty()) {
    throw MissingColumns("sweep CSV has no data rows");
  }
  std::set<std::uint32_t> node_counts;
  for (const auto& r : records) {
    node_counts.insert(r.info.node_count);
  }
  const bool by_nodes = node_counts.size() > 1;

  struct Acc {
    double pdr = 0.0;
    double overhead = 0.0;
    int n = 0;
  };
  std::map<Variant, std::map<double, Acc>> series;
  for (const auto& r : records) {
    const double x = by_nodes ? static_cast<double>(r.info.node_count) : r.info.selfish_pct;
    auto& acc = series[r.info.variant][x];
    acc.pdr += r.pdr;
    acc.overhead += static_cast<double>(total_overhead(r));
    ++acc.n;
  }

  std::map<std::string, std::string> files;
  const char* x_name = by_nodes ? "node_count" : "selfish_pct";
  for (const auto& [variant, points] : series) {
    std::string pdr = std::string("# ") + x_name + " pdr\n";
    std::string overhead = std::string("# ") + x_name + " total_overhead\n";
    char buf[96];
    for (const auto& [x, acc] : points) {
      std::snprintf(buf, sizeof(buf), "%g %.6f\n", x, acc.pdr / acc.n);
      pdr += buf;
      std::snprintf(buf, sizeof(buf), "%g %.6f\n", x, acc.overhead / acc.n);
      overhead += buf;
    }
    files[std::string(to_string(variant)) + "_pdr.dat"] = std::move(pdr);
    files[std::string(to_string(variant)) + "_total_overhead.dat"] = std::move(overhead);
  }
  return files;
}

}  // namespace manet
