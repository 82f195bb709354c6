#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "a4sim/cache_model.hpp"
#include "a4sim/io_path.hpp"
#include "a4sim/workloads.hpp"

namespace a4sim {

/// Raw cumulative tallies. Per-device entries mirror the model's counters.
struct CounterSet {
  std::vector<WorkloadCounters> workloads;
  std::vector<DeviceCounters> devices;
  std::uint64_t memory_read_lines = 0;
  std::uint64_t memory_write_lines = 0;
  std::uint64_t inclusive_migrations = 0;
  std::uint64_t bloat_fills = 0;
};

CounterSet collect(const CacheModel& model, const std::vector<WorkloadCounters>& workloads);

/// Unitless access costs for the latency proxy.
struct CostModel {
  double mlc_hit = 1.0;
  double llc_hit = 4.0;
  double memory = 20.0;
  friend bool operator==(const CostModel&, const CostModel&) = default;
};

enum class DcaMissMetric : std::uint8_t { Leak, AllocFraction };

struct WorkloadRates {
  double llc_hit_rate = 0;   // llc hits / mlc misses
  double mlc_miss_rate = 0;  // mlc misses / accesses
  double llc_miss_rate = 0;  // llc misses / mlc misses
  double io_throughput = 0;  // completed packets or blocks in the window
  double latency_proxy = 0;  // access cost plus mean ring wait of completed packets
  std::uint64_t accesses = 0;
  bool no_accesses = true;     // empty denominator markers
  bool no_mlc_misses = true;
};

struct DeviceRates {
  double dca_leak_rate = 0;
  std::uint64_t lines_written = 0;
  bool no_writes = true;
};

struct RateSnapshot {
  std::uint64_t window = 0;
  std::vector<WorkloadRates> workloads;
  std::vector<DeviceRates> devices;
  double storage_write_share = 0;
  double memory_bandwidth = 0;  // lines in the window
};

/// Average cost per access; 0 when there were no accesses.
double latency_proxy(std::uint64_t mlc_hits, std::uint64_t llc_hits, std::uint64_t memory, const CostModel& costs);

/// Rates over the delta `cur - prev`. `kinds[d]` classifies device d.
RateSnapshot snapshot(const CounterSet& cur, const CounterSet& prev, const std::vector<DeviceKind>& kinds,
                      const CostModel& costs, DcaMissMetric metric = DcaMissMetric::Leak, std::uint64_t window = 0);

/// Descriptions of every violated counter identity; empty when all hold.
std::vector<std::string> check_reconciliation(const CounterSet& c);

}  // namespace a4sim
