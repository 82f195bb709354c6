#include "a4sim/controller.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "a4sim/error.hpp"

namespace a4sim {

namespace {

// Rates below this are compared on an absolute rather than relative scale.
constexpr double kRateFloor = 0.05;
// A judgement is forced after this many expand periods without two steady samples.
constexpr std::uint32_t kSettleCap = 3;

double rel(double cur, double ref) { return (cur - ref) / std::max(std::fabs(ref), kRateFloor); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

std::string fmt(const WayMask& m) {
  std::ostringstream os;
  os << m;
  return os.str();
}

}  // namespace

void Thresholds::validate() const {
  const std::pair<const char*, double> fr[] = {{"hpw_llc_hit_thr", hpw_llc_hit_thr},
                                               {"dmalk_dca_ms_thr", dmalk_dca_ms_thr},
                                               {"dmalk_io_tp_thr", dmalk_io_tp_thr},
                                               {"dmalk_llc_ms_thr", dmalk_llc_ms_thr},
                                               {"ant_cache_miss_thr", ant_cache_miss_thr},
                                               {"instability_thr", instability_thr}};
  for (const auto& [name, v] : fr)
    if (!(v > 0.0 && v <= 1.0)) throw ConfigError(std::string(name) + " must lie in (0,1]", 0, name);
  if (stable_interval < 1) throw ConfigError("stable_interval must be >= 1", 0, "stable_interval");
  if (revert_interval < 1) throw ConfigError("revert_interval must be >= 1", 0, "revert_interval");
  if (expand_period < 1) throw ConfigError("expand_period must be >= 1", 0, "expand_period");
}

const char* to_string(Phase p) {
  switch (p) {
    case Phase::Searching: return "searching";
    case Phase::Stable: return "stable";
    case Phase::Reverted: return "reverted";
  }
  return "?";
}

const char* to_string(Antagonist a) {
  switch (a) {
    case Antagonist::None: return "none";
    case Antagonist::StorageIo: return "storage_io";
    case Antagonist::NonIo: return "non_io";
  }
  return "?";
}

bool detect_storage_antagonist(double dca_leak_rate, double llc_miss_rate, double storage_share, const Thresholds& t) {
  return dca_leak_rate > t.dmalk_dca_ms_thr && llc_miss_rate > t.dmalk_llc_ms_thr && storage_share > t.dmalk_io_tp_thr;
}

bool detect_non_io_antagonist(double mlc_miss_rate, double llc_miss_rate, const Thresholds& t) {
  return mlc_miss_rate > t.ant_cache_miss_thr && llc_miss_rate > t.ant_cache_miss_thr;
}

A4Controller::A4Controller(const CacheGeometry& geometry, Thresholds thresholds, ControllerPolicy policy)
    : g_(geometry), t_(thresholds), policy_(policy) {
  g_.validate();
  t_.validate();
}

std::size_t A4Controller::add_workload(const ControllerWorkload& w) {
  WState s;
  s.info = w;
  s.effective = w.declared;
  state_.push_back(s);
  return state_.size() - 1;
}

std::string A4Controller::device_name(DeviceIndex d) const {
  return d < device_names_.size() ? device_names_[d] : "dev" + std::to_string(d);
}

WayMask A4Controller::rightmost_standard() const {
  const WayIndex rs = g_.llc_ways - g_.inclusive_way_count - 1;
  return {rs, rs};
}

Zones A4Controller::initial_zones() const {
  bool io_hpw = false, any_lpw = false;
  for (const auto& s : state_) {
    if (!s.info.active) continue;
    if (s.effective == Priority::High && is_io(s)) io_hpw = true;
    if (s.effective == Priority::Low) any_lpw = true;
  }
  Zones z;
  if (io_hpw) {
    const WayIndex rs = rightmost_standard().lo;
    z.dca = g_.dca_ways();
    z.hp = {g_.dca_way_count, g_.llc_ways - 1};
    z.lp = WayMask{rs > g_.dca_way_count ? rs - 1 : rs, rs};
  } else {
    z.hp = g_.full_mask();
    z.lp = WayMask{g_.llc_ways - 2, g_.llc_ways - 1};
  }
  if (!any_lpw) z.lp.reset();
  return z;
}

std::optional<WayMask> A4Controller::desired_mask(const WState& s) const {
  if (!s.info.active) return std::nullopt;
  if (s.effective == Priority::High) {
    if (is_io(s) && zones_.dca) return WayMask{zones_.dca->lo, zones_.hp.hi};
    if (!is_io(s) && policy_.exclude_dca_for_nonio_hpw && !zones_.dca)
      return WayMask{std::max(zones_.hp.lo, g_.dca_way_count), zones_.hp.hi};
    return zones_.hp;
  }
  const bool to_trash = s.antagonist != Antagonist::None ||
                        (policy_.net_bloat_to_trash && s.info.kind == WorkloadKind::NetRx);
  if (to_trash && zones_.trash) return zones_.trash;
  if (zones_.lp) return zones_.lp;
  return zones_.hp;
}

std::optional<WayMask> A4Controller::mask_of(std::size_t w) const { return state_.at(w).applied; }

void A4Controller::emit_masks(std::vector<Action>& out) {
  for (std::size_t i = 0; i < state_.size(); ++i) {
    WState& s = state_[i];
    const auto want = desired_mask(s);
    if (!want) {
      s.applied.reset();
      continue;
    }
    if (s.applied == want) continue;
    s.applied = want;
    Action a;
    a.kind = Action::Kind::SetMask;
    a.name = "set_mask";
    a.target = s.info.id;
    a.workload = i;
    a.mask = *want;
    a.detail = fmt(*want);
    out.push_back(a);
  }
}

void A4Controller::reset_partitions(std::vector<Action>& out, const std::string& why) {
  zones_ = initial_zones();
  phase_ = Phase::Searching;
  baseline_pending_ = true;
  settle_ticks_ = 0;
  stable_ticks_ = 0;
  shrinking_ = false;
  shrink_reference_.reset();
  for (auto& s : state_) s.baseline.reset();
  std::string detail = why + " hp=" + fmt(zones_.hp);
  if (zones_.lp) detail += " lp=" + fmt(*zones_.lp);
  if (zones_.dca) detail += " dca=" + fmt(*zones_.dca);
  out.push_back({Action::Kind::Note, "initial_partitions", "zones", detail});
  emit_masks(out);
}

std::vector<Action> A4Controller::start() {
  std::vector<Action> out;
  reset_partitions(out, "start");
  return out;
}

std::vector<Action> A4Controller::on_workload_event(WorkloadEvent ev, std::size_t w, std::optional<Priority> p) {
  std::vector<Action> out;
  WState& s = state_.at(w);
  switch (ev) {
    case WorkloadEvent::Launch:
      s.info.active = true;
      break;
    case WorkloadEvent::Terminate:
      s.info.active = false;
      if (s.antagonist == Antagonist::StorageIo && s.info.device) {
        Action a{Action::Kind::SetDca, "dca_on", device_name(*s.info.device), "owner terminated"};
        a.device = *s.info.device;
        a.enable = true;
        out.push_back(a);
      }
      s.antagonist = Antagonist::None;
      s.effective = s.info.declared;
      break;
    case WorkloadEvent::Reclassify:
      if (p) s.info.declared = *p;
      if (s.antagonist == Antagonist::None) s.effective = s.info.declared;
      break;
  }
  reset_partitions(out, "workload event " + s.info.id);
  return out;
}

bool A4Controller::steady(const RateSnapshot& snap) const {
  if (!prev_) return false;
  for (std::size_t i = 0; i < state_.size(); ++i) {
    if (!is_hpw(state_[i]) || i >= snap.workloads.size() || i >= prev_->workloads.size()) continue;
    const auto& c = snap.workloads[i];
    const auto& p = prev_->workloads[i];
    if (c.no_mlc_misses || p.no_mlc_misses) continue;
    if (std::fabs(rel(c.llc_hit_rate, p.llc_hit_rate)) > t_.instability_thr) return false;
  }
  return true;
}

bool A4Controller::storage_detection(const RateSnapshot& snap, std::vector<Action>& out) {
  bool fired = false;
  for (std::size_t i = 0; i < state_.size(); ++i) {
    WState& s = state_[i];
    if (!s.info.active || s.info.kind != WorkloadKind::StorageStream || s.antagonist != Antagonist::None) continue;
    if (!s.info.device || *s.info.device >= snap.devices.size() || i >= snap.workloads.size()) continue;
    const auto& d = snap.devices[*s.info.device];
    const auto& w = snap.workloads[i];
    if (d.no_writes) continue;
    if (!detect_storage_antagonist(d.dca_leak_rate, w.llc_miss_rate, snap.storage_write_share, t_)) continue;
    s.antagonist = Antagonist::StorageIo;
    s.effective = Priority::Low;
    s.detect_value = w.io_throughput;
    out.push_back({Action::Kind::Note, "flag_storage_antagonist", s.info.id,
                   "leak=" + fmt(d.dca_leak_rate) + " llc_miss=" + fmt(w.llc_miss_rate) +
                       " share=" + fmt(snap.storage_write_share)});
    Action a{Action::Kind::SetDca, "dca_off", device_name(*s.info.device), "storage antagonist " + s.info.id};
    a.device = *s.info.device;
    a.enable = false;
    out.push_back(a);
    fired = true;
  }
  if (fired) reset_partitions(out, "storage antagonist");
  return fired;
}

void A4Controller::enter_stable(std::vector<Action>& out) {
  phase_ = Phase::Stable;
  stable_ticks_ = 0;
  grace_ = t_.expand_period;
  zones_.trash.reset();
  shrinking_ = false;
  shrink_reference_.reset();
  bool need_trash = false;
  for (const auto& s : state_)
    if (s.info.active && s.effective == Priority::Low &&
        (s.antagonist != Antagonist::None || (policy_.net_bloat_to_trash && s.info.kind == WorkloadKind::NetRx)))
      need_trash = true;
  const WayIndex rs = rightmost_standard().lo;
  if (need_trash && zones_.lp && zones_.lp->lo <= rs && zones_.lp->hi >= rs) {
    zones_.trash = WayMask{std::max(zones_.lp->lo, g_.dca_way_count), rs};
    shrinking_ = zones_.trash->lo < rs;
    shrink_ticks_ = 0;
  }
  std::string detail = "lp=" + (zones_.lp ? fmt(*zones_.lp) : std::string("none"));
  if (zones_.trash) detail += " trash=" + fmt(*zones_.trash);
  out.push_back({Action::Kind::Note, "stable", "zones", detail});
  emit_masks(out);
}

void A4Controller::searching_tick(const RateSnapshot& snap, std::vector<Action>& out) {
  ++settle_ticks_;
  const bool ready = settle_ticks_ >= t_.expand_period &&
                     (steady(snap) || settle_ticks_ >= kSettleCap * t_.expand_period);
  if (!ready) return;
  const WayIndex floor = zones_.dca ? g_.dca_way_count : 0;
  const bool can_expand = zones_.lp && zones_.lp->lo > floor;
  settle_ticks_ = 0;

  if (baseline_pending_) {
    baseline_pending_ = false;
    std::string detail;
    for (std::size_t i = 0; i < state_.size(); ++i) {
      WState& s = state_[i];
      s.baseline.reset();
      if (!is_hpw(s) || i >= snap.workloads.size() || snap.workloads[i].no_mlc_misses) continue;
      s.baseline = snap.workloads[i].llc_hit_rate;
      detail += s.info.id + "=" + fmt(*s.baseline) + " ";
    }
    out.push_back({Action::Kind::Note, "baseline", "zones", detail});
  } else {
    for (std::size_t i = 0; i < state_.size(); ++i) {
      const WState& s = state_[i];
      if (!is_hpw(s) || !s.baseline || i >= snap.workloads.size() || snap.workloads[i].no_mlc_misses) continue;
      const double drop = -rel(snap.workloads[i].llc_hit_rate, *s.baseline);
      if (drop > t_.hpw_llc_hit_thr) {
        ++zones_.lp->lo;
        out.push_back({Action::Kind::Note, "rollback_lp", s.info.id,
                       "hit " + fmt(snap.workloads[i].llc_hit_rate) + " vs baseline " + fmt(*s.baseline)});
        enter_stable(out);
        return;
      }
    }
  }
  if (!can_expand) {
    enter_stable(out);
    return;
  }
  --zones_.lp->lo;
  out.push_back({Action::Kind::Note, "expand_lp", "zones", fmt(*zones_.lp)});
  emit_masks(out);
}

bool A4Controller::restore_checks(const RateSnapshot& snap, std::vector<Action>& out) {
  bool changed = false;
  for (std::size_t i = 0; i < state_.size() && i < snap.workloads.size(); ++i) {
    WState& s = state_[i];
    if (!s.info.active) continue;
    const auto& w = snap.workloads[i];
    // flagged before its first completion: the first nonzero window becomes the reference
    if (s.antagonist == Antagonist::StorageIo && s.detect_value == 0.0) {
      s.detect_value = w.io_throughput;
      continue;
    }
    if (s.antagonist == Antagonist::NonIo && !w.no_mlc_misses &&
        std::fabs(rel(w.llc_miss_rate, s.detect_value)) > t_.hpw_llc_hit_thr) {
      s.antagonist = Antagonist::None;
      s.effective = s.info.declared;
      out.push_back({Action::Kind::Note, "restore_antagonist", s.info.id,
                     "llc_miss " + fmt(w.llc_miss_rate) + " vs " + fmt(s.detect_value)});
      if (s.effective == Priority::High) {
        reset_partitions(out, "antagonist restored");
        return true;
      }
      changed = true;
    } else if (s.antagonist == Antagonist::StorageIo && !shrinking_ &&
               std::fabs(rel(w.io_throughput, s.detect_value)) > t_.instability_thr) {
      s.antagonist = Antagonist::None;
      s.effective = s.info.declared;
      out.push_back({Action::Kind::Note, "restore_antagonist", s.info.id,
                     "throughput " + fmt(w.io_throughput) + " vs " + fmt(s.detect_value)});
      if (s.info.device) {
        Action a{Action::Kind::SetDca, "dca_on", device_name(*s.info.device), "phase change " + s.info.id};
        a.device = *s.info.device;
        a.enable = true;
        out.push_back(a);
      }
      reset_partitions(out, "storage phase change");
      return true;
    }
  }
  if (changed) {
    enter_stable(out);
    return true;
  }
  for (std::size_t i = 0; i < state_.size() && i < snap.workloads.size(); ++i) {
    const WState& s = state_[i];
    if (!is_hpw(s) || !s.baseline || snap.workloads[i].no_mlc_misses) continue;
    if (std::fabs(rel(snap.workloads[i].llc_hit_rate, *s.baseline)) > t_.hpw_llc_hit_thr) {
      reset_partitions(out, "phase change " + s.info.id);
      return true;
    }
  }
  return false;
}

std::vector<double> A4Controller::shrink_metrics(const RateSnapshot& snap) const {
  std::vector<double> m;
  for (std::size_t i = 0; i < state_.size() && i < snap.workloads.size(); ++i) {
    const WState& s = state_[i];
    if (!s.info.active) continue;
    if (s.antagonist == Antagonist::NonIo) m.push_back(snap.workloads[i].llc_miss_rate);
    if (s.antagonist == Antagonist::StorageIo) m.push_back(snap.workloads[i].io_throughput);
  }
  m.push_back(snap.memory_bandwidth);
  return m;
}

void A4Controller::stable_tick(const RateSnapshot& snap, std::vector<Action>& out) {
  const bool settling = grace_ > 0;
  if (settling) --grace_;
  if (!settling && restore_checks(snap, out)) return;

  bool flagged = false;
  for (std::size_t i = 0; !settling && i < state_.size() && i < snap.workloads.size(); ++i) {
    WState& s = state_[i];
    if (!s.info.active || is_io(s) || s.antagonist != Antagonist::None) continue;
    const auto& w = snap.workloads[i];
    if (w.no_mlc_misses || !detect_non_io_antagonist(w.mlc_miss_rate, w.llc_miss_rate, t_)) continue;
    const bool was_high = s.effective == Priority::High;
    s.antagonist = Antagonist::NonIo;
    s.effective = Priority::Low;
    s.detect_value = w.llc_miss_rate;
    out.push_back({Action::Kind::Note, "flag_non_io_antagonist", s.info.id,
                   "mlc_miss=" + fmt(w.mlc_miss_rate) + " llc_miss=" + fmt(w.llc_miss_rate)});
    if (was_high) {
      reset_partitions(out, "hpw demoted " + s.info.id);
      return;
    }
    flagged = true;
  }
  if (flagged) {
    enter_stable(out);
    return;
  }

  if (shrinking_ && zones_.trash) {
    if (++shrink_ticks_ < t_.expand_period) return;
    shrink_ticks_ = 0;
    const auto m = shrink_metrics(snap);
    if (shrink_reference_ && shrink_reference_->size() == m.size()) {
      for (std::size_t k = 0; k < m.size(); ++k) {
        if (std::fabs(rel(m[k], (*shrink_reference_)[k])) > t_.instability_thr) {
          --zones_.trash->lo;
          shrinking_ = false;
          out.push_back({Action::Kind::Note, "rollback_trash", "zones",
                         fmt(*zones_.trash) + " metric " + std::to_string(k) + " moved " + fmt(m[k]) + " vs " +
                             fmt((*shrink_reference_)[k])});
          emit_masks(out);
          return;
        }
      }
    }
    if (zones_.trash->lo < rightmost_standard().lo) {
      shrink_reference_ = m;
      ++zones_.trash->lo;
      out.push_back({Action::Kind::Note, "shrink_trash", "zones", fmt(*zones_.trash)});
      emit_masks(out);
    } else {
      shrinking_ = false;
    }
    return;
  }

  if (++stable_ticks_ < t_.stable_interval) return;
  probe_reference_.assign(state_.size(), -1.0);
  for (std::size_t i = 0; i < state_.size() && i < snap.workloads.size(); ++i)
    if (is_hpw(state_[i]) && !snap.workloads[i].no_mlc_misses) probe_reference_[i] = snap.workloads[i].llc_hit_rate;
  saved_zones_ = zones_;
  zones_ = initial_zones();
  phase_ = Phase::Reverted;
  reverted_ticks_ = 0;
  out.push_back({Action::Kind::Note, "revert", "zones", "probe initial partitions"});
  emit_masks(out);
}

void A4Controller::reverted_tick(const RateSnapshot& snap, std::vector<Action>& out) {
  if (++reverted_ticks_ < t_.revert_interval) return;
  zones_ = saved_zones_;
  for (std::size_t i = 0; i < state_.size() && i < snap.workloads.size() && i < probe_reference_.size(); ++i) {
    if (!is_hpw(state_[i]) || probe_reference_[i] < 0 || snap.workloads[i].no_mlc_misses) continue;
    const double attainable = snap.workloads[i].llc_hit_rate;
    if (std::fabs(rel(probe_reference_[i], attainable)) > t_.hpw_llc_hit_thr) {
      reset_partitions(out, "revert probe " + state_[i].info.id + " attainable " + fmt(attainable) + " vs " +
                                fmt(probe_reference_[i]));
      return;
    }
  }
  phase_ = Phase::Stable;
  stable_ticks_ = 0;
  grace_ = t_.expand_period;
  out.push_back({Action::Kind::Note, "restore_after_probe", "zones", ""});
  emit_masks(out);
}

std::vector<Action> A4Controller::tick(const RateSnapshot& snap) {
  std::vector<Action> out;
  if (phase_ == Phase::Reverted) {
    reverted_tick(snap, out);
  } else if (!storage_detection(snap, out)) {
    if (phase_ == Phase::Searching)
      searching_tick(snap, out);
    else
      stable_tick(snap, out);
  }
  prev_ = snap;
  return out;
}

}  // namespace a4sim
