// Serial vs OpenMP kernels: unit-disk adjacency and one mobility step.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "manet/mobility.hpp"
#include "manet/radio.hpp"

namespace {

using namespace manet;

std::vector<Vec2> lattice(std::uint32_t count) {
  const auto side = static_cast<double>(std::llround(std::sqrt(static_cast<double>(count))));
  return place_grid(count, {125.0 * (side - 1.0), 125.0 * (side - 1.0)});
}

void BM_NeighborsSerial(benchmark::State& state) {
  const auto positions = lattice(static_cast<std::uint32_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(neighbors_serial(positions, 125.227));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_NeighborsParallel(benchmark::State& state) {
  const auto positions = lattice(static_cast<std::uint32_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(neighbors_parallel(positions, 125.227));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

struct Fleet {
  MobilityParams params;
  std::vector<WaypointState> states;
  std::vector<Rng> rngs;
};

Fleet make_fleet(std::uint32_t count) {
  Fleet f;
  const auto positions = lattice(count);
  const double extent = positions.back().x;
  f.params.terrain = {extent, extent};
  f.params.pause = 0.0;
  for (std::uint32_t i = 0; i < count; ++i) {
    f.states.push_back(initial_waypoint_state(positions[i], f.params));
    f.rngs.push_back(make_stream(7, 0, i));
  }
  return f;
}

void BM_MobilitySerial(benchmark::State& state) {
  auto f = make_fleet(static_cast<std::uint32_t>(state.range(0)));
  for (auto _ : state) {
    advance_all_serial(f.states, f.rngs, 0.1, f.params);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_MobilityParallel(benchmark::State& state) {
  auto f = make_fleet(static_cast<std::uint32_t>(state.range(0)));
  for (auto _ : state) {
    advance_all_parallel(f.states, f.rngs, 0.1, f.params);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_NeighborsSerial)->Arg(121)->Arg(1024)->Arg(4096);
BENCHMARK(BM_NeighborsParallel)->Arg(121)->Arg(1024)->Arg(4096);
BENCHMARK(BM_MobilitySerial)->Arg(121)->Arg(4096)->Arg(65536);
BENCHMARK(BM_MobilityParallel)->Arg(121)->Arg(4096)->Arg(65536);

BENCHMARK_MAIN();
