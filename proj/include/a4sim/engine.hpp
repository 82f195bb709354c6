#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "a4sim/cache_model.hpp"
#include "a4sim/controller.hpp"
#include "a4sim/io_path.hpp"
#include "a4sim/telemetry.hpp"
#include "a4sim/workloads.hpp"

namespace a4sim {

struct ScriptedEvent {
  enum class Kind : std::uint8_t { Launch, Terminate, Mask, Dca, Priority, Param };
  std::uint64_t tick = 0;
  Kind kind = Kind::Launch;
  std::string target;  // workload id, or device id for Dca
  WayMask mask{};
  bool flag = false;
  a4sim::Priority priority = a4sim::Priority::High;
  std::string key;  // Param: workload parameter name
  std::string value;
  std::size_t line = 0;  // source line, for diagnostics
  friend bool operator==(const ScriptedEvent& a, const ScriptedEvent& b) {
    return a.tick == b.tick && a.kind == b.kind && a.target == b.target && a.mask == b.mask && a.flag == b.flag &&
           a.priority == b.priority && a.key == b.key && a.value == b.value;
  }
};

struct Scenario {
  std::string name;
  CacheGeometry geometry;
  ModelOptions model;
  std::uint32_t epochs_per_tick = 100;
  std::uint32_t total_ticks = 70;
  std::uint32_t warmup_ticks = 10;
  std::uint64_t seed = 1;
  std::vector<DeviceSpec> devices;
  std::vector<WorkloadSpec> workloads;
  Thresholds thresholds;
  ControllerPolicy policy;
  bool controller_enabled = true;
  CostModel costs;
  DcaMissMetric dca_miss_metric = DcaMissMetric::Leak;
  std::vector<ScriptedEvent> events;

  /// Throws ConfigError naming the offending key or reference.
  void validate() const;
  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Applies one workload parameter by name; throws ConfigError on unknown keys or bad values.
void set_workload_param(WorkloadSpec& w, const std::string& key, const std::string& value);

struct ReportRow {
  std::uint64_t tick = 0;
  std::string entity;
  std::string kind;  // workload kind, device kind, or "system"
  std::optional<double> llc_hit_rate, mlc_miss_rate, llc_miss_rate, dca_leak_rate, io_throughput, latency_proxy,
      mem_bw_lines;
  std::optional<WayIndex> mask_lo, mask_hi;
  std::optional<bool> dca_enabled;
  std::string priority;
  std::string antagonist;
  std::string phase;
  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct ActionRecord {
  std::uint64_t tick = 0;
  std::string action;
  std::string target;
  std::string detail;
  friend bool operator==(const ActionRecord&, const ActionRecord&) = default;
};

/// Means of every numeric column over the summary window; absent when never populated.
struct SummaryRow {
  std::string entity;
  std::string kind;
  std::optional<double> llc_hit_rate, mlc_miss_rate, llc_miss_rate, dca_leak_rate, io_throughput, latency_proxy,
      mem_bw_lines;
  friend bool operator==(const SummaryRow&, const SummaryRow&) = default;
};

struct Report {
  std::uint32_t total_ticks = 0;
  std::uint32_t warmup_ticks = 0;
  std::vector<ReportRow> rows;
  std::vector<ActionRecord> actions;
  std::vector<SummaryRow> summary;
  std::uint64_t reconciliation_checks = 0;
  std::vector<CounterSet> counters;  // cumulative counters after every tick
};

/// Values are rounded to this many decimals when recorded.
inline constexpr int kReportDecimals = 6;
double quantize(double v);

/// Summary window is [max(warmup, total - 10), total).
std::vector<SummaryRow> summarize(const std::vector<ReportRow>& rows, std::uint32_t total_ticks,
                                  std::uint32_t warmup_ticks);

const SummaryRow* find_summary(const Report& r, const std::string& entity);
/// Rows for one entity in tick order.
std::vector<const ReportRow*> entity_rows(const Report& r, const std::string& entity);

struct RunOptions {
  bool keep_counters = false;
};

/// Runs the scenario deterministically. Throws ConfigError for invalid
/// scenarios and SimulationError for broken runtime invariants.
Report run(const Scenario& scenario, RunOptions options = {});

}  // namespace a4sim
