#include "a4sim/telemetry.hpp"

namespace a4sim {

CounterSet collect(const CacheModel& model, const std::vector<WorkloadCounters>& workloads) {
  const auto& m = model.counters();
  CounterSet c;
  c.workloads = workloads;
  c.devices = m.devices;
  c.memory_read_lines = m.memory_read_lines;
  c.memory_write_lines = m.memory_write_lines;
  c.inclusive_migrations = m.inclusive_migrations;
  c.bloat_fills = m.bloat_fills;
  return c;
}

double latency_proxy(std::uint64_t mlc_hits, std::uint64_t llc_hits, std::uint64_t memory, const CostModel& costs) {
  const std::uint64_t n = mlc_hits + llc_hits + memory;
  if (n == 0) return 0.0;
  return (static_cast<double>(mlc_hits) * costs.mlc_hit + static_cast<double>(llc_hits) * costs.llc_hit +
          static_cast<double>(memory) * costs.memory) /
         static_cast<double>(n);
}

namespace {

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

RateSnapshot snapshot(const CounterSet& cur, const CounterSet& prev, const std::vector<DeviceKind>& kinds,
                      const CostModel& costs, DcaMissMetric metric, std::uint64_t window) {
  RateSnapshot s;
  s.window = window;
  for (std::size_t i = 0; i < cur.workloads.size(); ++i) {
    const WorkloadCounters& a = cur.workloads[i];
    const WorkloadCounters b = i < prev.workloads.size() ? prev.workloads[i] : WorkloadCounters{};
    const std::uint64_t acc = a.accesses - b.accesses;
    const std::uint64_t mh = a.mlc_hits - b.mlc_hits;
    const std::uint64_t mm = a.mlc_misses - b.mlc_misses;
    const std::uint64_t lh = a.llc_hits - b.llc_hits;
    const std::uint64_t lm = a.llc_misses - b.llc_misses;
    WorkloadRates r;
    r.accesses = acc;
    r.no_accesses = acc == 0;
    r.no_mlc_misses = mm == 0;
    r.mlc_miss_rate = ratio(mm, acc);
    r.llc_hit_rate = ratio(lh, mm);
    r.llc_miss_rate = ratio(lm, mm);
    r.io_throughput = static_cast<double>(a.completed - b.completed);
    r.latency_proxy = latency_proxy(mh, lh, lm, costs);
    if (a.completed > b.completed)
      r.latency_proxy += ratio(a.ring_wait_epochs - b.ring_wait_epochs, a.completed - b.completed);
    s.workloads.push_back(r);
  }
  std::uint64_t total = 0, storage = 0;
  for (std::size_t d = 0; d < cur.devices.size(); ++d) {
    const DeviceCounters& a = cur.devices[d];
    const DeviceCounters b = d < prev.devices.size() ? prev.devices[d] : DeviceCounters{};
    const std::uint64_t written = a.dma_lines_written - b.dma_lines_written;
    DeviceRates r;
    r.lines_written = written;
    r.no_writes = written == 0;
    r.dca_leak_rate = metric == DcaMissMetric::Leak ? ratio(a.leak_events - b.leak_events, written)
                                                    : ratio(a.dma_allocations - b.dma_allocations, written);
    if (r.dca_leak_rate > 1.0) r.dca_leak_rate = 1.0;  // leaks of lines written in an earlier window
    s.devices.push_back(r);
    total += written;
    if (d < kinds.size() && kinds[d] == DeviceKind::Storage) storage += written;
  }
  s.storage_write_share = ratio(storage, total);
  s.memory_bandwidth = static_cast<double>((cur.memory_read_lines - prev.memory_read_lines) +
                                           (cur.memory_write_lines - prev.memory_write_lines));
  return s;
}

std::vector<std::string> check_reconciliation(const CounterSet& c) {
  std::vector<std::string> bad;
  for (std::size_t i = 0; i < c.workloads.size(); ++i) {
    const auto& w = c.workloads[i];
    if (w.mlc_hits + w.mlc_misses != w.accesses)
      bad.push_back("workload " + std::to_string(i) + ": mlc_hits + mlc_misses != accesses");
    if (w.llc_hits + w.llc_misses != w.mlc_misses)
      bad.push_back("workload " + std::to_string(i) + ": llc_hits + llc_misses != mlc_misses");
  }
  for (std::size_t d = 0; d < c.devices.size(); ++d) {
    const auto& v = c.devices[d];
    if (v.dma_updates + v.dma_allocations + v.dma_memory_writes != v.dma_lines_written)
      bad.push_back("device " + std::to_string(d) + ": updates + allocations + memory writes != lines written");
  }
  return bad;
}

}  // namespace a4sim
