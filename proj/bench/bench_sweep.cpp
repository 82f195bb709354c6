// Serial reference vs OpenMP sweep over a small mask-sweep family.

#include <benchmark/benchmark.h>

#include <string>

#include "a4sim/scenario.hpp"
#include "a4sim/sweep.hpp"

namespace {

const char* kBase = R"([sim]
cores = 4
epochs_per_tick = 20
total_ticks = 20
warmup_ticks = 5
controller = off

[llc]
sets = 1024

[mlc]
sets = 64
ways = 8

[device nic0]
kind = network
lines_per_epoch = 512

[workload net]
kind = net_rx
cores = 0-1
device = nic0
ring_entries = 256
lines_per_packet = 8
mask = 5-6

[workload mem]
kind = mem_stream
cores = 2-3
working_set_lines = 4096
pattern = random
accesses_per_epoch = 512
)";

std::vector<a4sim::SweepMember> family() {
  std::vector<a4sim::SweepMember> out;
  for (a4sim::WayIndex lo = 0; lo < 10; ++lo) {
    a4sim::Scenario s = a4sim::parse_scenario(kBase);
    s.workloads[1].mask = a4sim::WayMask{lo, static_cast<a4sim::WayIndex>(lo + 1)};
    out.push_back({"mask_" + std::to_string(lo), s});
  }
  return out;
}

void BM_SweepSerial(benchmark::State& state) {
  const auto members = family();
  for (auto _ : state) benchmark::DoNotOptimize(a4sim::run_sweep_serial(members));
}
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);

void BM_SweepParallel(benchmark::State& state) {
  const auto members = family();
  for (auto _ : state) benchmark::DoNotOptimize(a4sim::run_sweep_parallel(members, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_SweepParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
