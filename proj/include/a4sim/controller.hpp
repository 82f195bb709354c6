#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "a4sim/cache_model.hpp"
#include "a4sim/telemetry.hpp"
#include "a4sim/workloads.hpp"

namespace a4sim {

struct Thresholds {
  double hpw_llc_hit_thr = 0.20;    // T1
  double dmalk_dca_ms_thr = 0.40;   // T2
  double dmalk_io_tp_thr = 0.35;    // T3
  double dmalk_llc_ms_thr = 0.40;   // T4
  double ant_cache_miss_thr = 0.90; // T5
  double instability_thr = 0.10;
  std::uint32_t stable_interval = 10;
  std::uint32_t revert_interval = 1;
  std::uint32_t expand_period = 2;

  /// Throws ConfigError unless fractions are in (0,1] and intervals >= 1.
  void validate() const;
  friend bool operator==(const Thresholds&, const Thresholds&) = default;
};

struct ControllerPolicy {
  bool exclude_dca_for_nonio_hpw = false;
  bool net_bloat_to_trash = false;
  friend bool operator==(const ControllerPolicy&, const ControllerPolicy&) = default;
};

enum class Phase : std::uint8_t { Searching, Stable, Reverted };
enum class Antagonist : std::uint8_t { None, StorageIo, NonIo };
enum class WorkloadEvent : std::uint8_t { Launch, Terminate, Reclassify };

const char* to_string(Phase p);
const char* to_string(Antagonist a);

struct Zones {
  std::optional<WayMask> dca;
  WayMask hp{};
  std::optional<WayMask> lp;
  std::optional<WayMask> trash;
  friend bool operator==(const Zones&, const Zones&) = default;
};

/// True iff leak > T2, llc miss > T4 and storage share > T3.
bool detect_storage_antagonist(double dca_leak_rate, double llc_miss_rate, double storage_share, const Thresholds& t);
/// True iff both miss rates exceed T5.
bool detect_non_io_antagonist(double mlc_miss_rate, double llc_miss_rate, const Thresholds& t);

struct ControllerWorkload {
  std::string id;
  WorkloadKind kind = WorkloadKind::MemStream;
  Priority declared = Priority::High;
  std::optional<DeviceIndex> device;
  bool active = true;
};

struct Action {
  enum class Kind : std::uint8_t { SetMask, SetDca, Note };
  Kind kind = Kind::Note;
  std::string name;    // log verb
  std::string target;  // workload or device id, or "zones"
  std::string detail;
  std::size_t workload = 0;
  WayMask mask{};
  DeviceIndex device = 0;
  bool enable = false;
};

/// Pure state machine: snapshots in, actions out. Workload indices match
/// the order of add_workload calls.
class A4Controller {
 public:
  A4Controller(const CacheGeometry& geometry, Thresholds thresholds, ControllerPolicy policy = {});

  std::size_t add_workload(const ControllerWorkload& w);
  /// Device ids only feed log lines.
  void set_device_names(std::vector<std::string> names) { device_names_ = std::move(names); }

  /// Recomputes the initial partitions and restarts the search.
  std::vector<Action> on_workload_event(WorkloadEvent ev, std::size_t w, std::optional<Priority> new_priority = {});
  /// Initial partitions for the registry as it stands (call once before the first tick).
  std::vector<Action> start();

  std::vector<Action> tick(const RateSnapshot& snap);

  Phase phase() const { return phase_; }
  const Zones& zones() const { return zones_; }
  Zones initial_zones() const;
  std::optional<WayMask> mask_of(std::size_t w) const;
  Priority effective_priority(std::size_t w) const { return state_.at(w).effective; }
  Antagonist antagonist(std::size_t w) const { return state_.at(w).antagonist; }
  std::optional<double> baseline(std::size_t w) const { return state_.at(w).baseline; }
  const Thresholds& thresholds() const { return t_; }

 private:
  struct WState {
    ControllerWorkload info;
    Priority effective = Priority::High;
    Antagonist antagonist = Antagonist::None;
    std::optional<double> baseline;
    double detect_value = 0;  // llc miss (non-I/O) or throughput (storage) at detection
    std::optional<WayMask> applied;
  };

  bool is_io(const WState& s) const { return s.info.kind != WorkloadKind::MemStream; }
  bool is_hpw(const WState& s) const { return s.info.active && s.effective == Priority::High; }
  WayMask rightmost_standard() const;
  std::optional<WayMask> desired_mask(const WState& s) const;
  void emit_masks(std::vector<Action>& out);
  void reset_partitions(std::vector<Action>& out, const std::string& why);
  void enter_stable(std::vector<Action>& out);
  bool steady(const RateSnapshot& snap) const;
  bool storage_detection(const RateSnapshot& snap, std::vector<Action>& out);
  bool restore_checks(const RateSnapshot& snap, std::vector<Action>& out);
  void searching_tick(const RateSnapshot& snap, std::vector<Action>& out);
  void stable_tick(const RateSnapshot& snap, std::vector<Action>& out);
  void reverted_tick(const RateSnapshot& snap, std::vector<Action>& out);
  std::vector<double> shrink_metrics(const RateSnapshot& snap) const;
  std::string device_name(DeviceIndex d) const;

  CacheGeometry g_;
  Thresholds t_;
  ControllerPolicy policy_;
  std::vector<WState> state_;
  std::vector<std::string> device_names_;
  Zones zones_;
  Zones saved_zones_;
  Phase phase_ = Phase::Searching;

  bool baseline_pending_ = true;
  std::uint32_t settle_ticks_ = 0;
  std::uint32_t stable_ticks_ = 0;
  std::uint32_t reverted_ticks_ = 0;
  std::uint32_t grace_ = 0;  // stable ticks left before restore checks resume
  std::vector<double> probe_reference_;
  bool shrinking_ = false;
  std::uint32_t shrink_ticks_ = 0;
  std::optional<std::vector<double>> shrink_reference_;
  std::optional<RateSnapshot> prev_;
};

}  // namespace a4sim
