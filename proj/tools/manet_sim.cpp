// manet_sim: run one configuration or a sweep and write CSV results.
//
// Precedence: command-line flags override config-file keys, which override
// built-in defaults.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "manet/config.hpp"
#include "manet/metrics.hpp"
#include "manet/simulator.hpp"
#include "manet/sweep.hpp"

namespace fs = std::filesystem;
using namespace manet;

namespace {

constexpr int kExitRunFailure = 1;
constexpr int kExitConfigError = 2;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) {
      out.push_back(item);
    }
  }
  return out;
}

double parse_real(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) {
      return v;
    }
  } catch (const std::exception&) {
  }
  throw InvalidConfig("malformed " + what + " value '" + text + "'");
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InvalidConfig("cannot read " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
}

SweepSpec parse_sweep(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) {
    throw InvalidConfig("--sweep expects KEY=v1,v2,...");
  }
  std::string key = text.substr(0, eq);
  for (auto& c : key) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (c == '-') {
      c = '_';
    }
  }
  const auto items = split_list(text.substr(eq + 1));
  if (items.empty()) {
    throw InvalidConfig("--sweep needs at least one value");
  }
  SweepSpec spec;
  if (key == "selfish_pct" || key == "selfish") {
    spec.axis = SweepAxis::SelfishPct;
  } else if (key == "node_count" || key == "nodes" || key == "number_of_nodes") {
    spec.axis = SweepAxis::NodeCount;
  } else if (key == "variant") {
    spec.axis = SweepAxis::Variant;
    spec.variants.clear();
    for (const auto& v : items) {
      spec.variants.push_back(parse_variant(v));
    }
    return spec;
  } else {
    throw InvalidConfig("unknown sweep axis '" + key + "'");
  }
  for (const auto& v : items) {
    spec.values.push_back(parse_real(v, key));
  }
  return spec;
}

void write_outputs(const fs::path& out_dir, const std::vector<MetricsRecord>& records) {
  fs::create_directories(out_dir);
  const std::string csv = emit_csv(records);
  write_file(out_dir / "results.csv", csv);
  const fs::path plot_dir = out_dir / "plot";
  fs::create_directories(plot_dir);
  for (const auto& [name, body] : emit_plot_data(csv)) {
    write_file(plot_dir / name, body);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic MANET simulator: DSR with a neighbor retaliation model"};
  app.require_subcommand(0, 1);

  std::string config_path;
  std::string variant_list;
  std::string selfish;
  std::string nodes;
  std::string seeds = "1";
  std::string out_dir = "out";
  std::string sweep;
  bool debug_tables = false;
  app.add_option("--config", config_path, "Config file of KEY VALUE lines")->check(CLI::ExistingFile);
  app.add_option("--variant", variant_list, "PDSR, MDSR or FGMDSR; a comma list runs each");
  app.add_option("--selfish", selfish, "Percentage of selfish nodes (0-100)");
  app.add_option("--nodes", nodes, "Number of nodes (perfect square)");
  app.add_option("--seeds", seeds, "Comma-separated seed list")->capture_default_str();
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_option("--sweep", sweep, "Axis sweep KEY=v1,v2,... (selfish_pct, node_count or variant)");
  app.add_flag("--debug-tables", debug_tables, "Write per-epoch NI table dumps");

  auto* plot = app.add_subcommand("plot", "Turn a results CSV into per-series data files");
  std::string plot_csv;
  std::string plot_out = "plot";
  plot->add_option("csv", plot_csv, "Results CSV")->required()->check(CLI::ExistingFile);
  plot->add_option("--out", plot_out, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }

  if (plot->parsed()) {
    try {
      fs::create_directories(plot_out);
      for (const auto& [name, body] : emit_plot_data(read_file(plot_csv))) {
        write_file(fs::path(plot_out) / name, body);
      }
      return 0;
    } catch (const MissingColumns& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitConfigError;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitRunFailure;
    }
  }

  SimConfig base;
  SweepSpec spec;
  try {
    if (!config_path.empty()) {
      base = parse_config(read_file(config_path));
    }
    if (!selfish.empty()) {
      base.selfish_fraction = parse_real(selfish, "--selfish") / 100.0;
    }
    if (!nodes.empty()) {
      base = sweep_point(base, SweepAxis::NodeCount, parse_real(nodes, "--nodes"), base.variant, base.seed);
    }
    if (!sweep.empty()) {
      spec = parse_sweep(sweep);
    } else {
      spec.axis = SweepAxis::Variant;
      spec.variants = {base.variant};
    }
    const bool variants_swept = !sweep.empty() && spec.axis == SweepAxis::Variant;
    if (!variant_list.empty() && !variants_swept) {
      spec.variants.clear();
      for (const auto& v : split_list(variant_list)) {
        spec.variants.push_back(parse_variant(v));
      }
    }
    spec.seeds.clear();
    for (const auto& s : split_list(seeds)) {
      spec.seeds.push_back(static_cast<std::uint64_t>(parse_real(s, "--seeds")));
    }
    if (spec.seeds.empty()) {
      throw InvalidConfig("--seeds needs at least one seed");
    }
    validate(base);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const InvalidConfig& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }

  try {
    const auto records = run_sweep(base, spec);
    write_outputs(out_dir, records);
    if (debug_tables) {
      const std::vector<double> values = spec.axis == SweepAxis::Variant ? std::vector<double>{0.0} : spec.values;
      RunOptions options;
      options.record_ni_tables = true;
      for (double value : values) {
        for (Variant variant : spec.variants) {
          for (std::uint64_t seed : spec.seeds) {
            const auto config = sweep_point(base, spec.axis, value, variant, seed);
            const auto result = run_detailed(config, options);
            std::ostringstream name;
            name << "ni_tables_" << to_string(variant) << "_n" << config.node_count << "_s"
                 << config.selfish_fraction * 100.0 << "_seed" << seed << ".csv";
            write_file(fs::path(out_dir) / name.str(), emit_ni_dump(result.ni_tables));
          }
        }
      }
    }
    std::cout << "wrote " << records.size() << " rows to " << (fs::path(out_dir) / "results.csv").string() << '\n';
  } catch (const InvalidConfig& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << '\n';
    return kExitRunFailure;
  }
  return 0;
}
