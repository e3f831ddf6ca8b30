#pragma once
// Experiment batches: one varying axis crossed with variants and seeds,
// executed as independent runs, plus reduction to plot-ready series.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "manet/config.hpp"
#include "manet/metrics.hpp"

namespace manet {

enum class SweepAxis : std::uint8_t { SelfishPct, NodeCount, Variant };

struct SweepSpec {
  SweepAxis axis = SweepAxis::SelfishPct;
  std::vector<double> values;  ///< selfish percentages or node counts; unused for the variant axis
  std::vector<Variant> variants{Variant::PDSR, Variant::MDSR};
  std::vector<std::uint64_t> seeds{1};
};

/// Config for one sweep point. A node-count point rescales the terrain so the
/// grid spacing of `base` is preserved.
[[nodiscard]] SimConfig sweep_point(const SimConfig& base, SweepAxis axis, double value, Variant variant,
                                    std::uint64_t seed);

/// Runs every (value, variant, seed) combination, in parallel across runs.
/// Rows come back sorted by axis value, then variant, then seed.
[[nodiscard]] std::vector<MetricsRecord> run_sweep(const SimConfig& base, const SweepSpec& spec);

/// Per (variant, metric) two-column series "x mean_y" keyed by file name
/// "<variant>_<metric>.dat", with x the selfish percentage unless node count
/// varies across the rows. Metrics: pdr and total_overhead.
/// Throws MissingColumns for a CSV without data rows.
[[nodiscard]] std::map<std::string, std::string> emit_plot_data(std::string_view csv);

}  // namespace manet
