#include "a4sim/engine.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <map>
#include <memory>
#include <set>

#include "a4sim/error.hpp"

namespace a4sim {

namespace {

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw ConfigError("'" + key + "' expects a non-negative integer, got '" + v + "'", 0, key);
  return out;
}

std::uint32_t parse_u32(const std::string& key, const std::string& v) {
  const auto x = parse_uint(key, v);
  if (x > 0xFFFFFFFFull) throw ConfigError("'" + key + "' is out of range", 0, key);
  return static_cast<std::uint32_t>(x);
}

bool parse_flag(const std::string& key, const std::string& v) {
  if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "off" || v == "0" || v == "no") return false;
  throw ConfigError("'" + key + "' expects on/off, got '" + v + "'", 0, key);
}

}  // namespace

void set_workload_param(WorkloadSpec& w, const std::string& key, const std::string& v) {
  if (key == "ring_entries") w.net.ring_entries = parse_u32(key, v);
  else if (key == "lines_per_packet") w.net.lines_per_packet = parse_u32(key, v);
  else if (key == "touch") w.net.touch = parse_flag(key, v);
  else if (key == "desc_bytes") w.net.desc_bytes = parse_u32(key, v);
  else if (key == "packets_per_epoch") w.net.packets_per_epoch = parse_u32(key, v);
  else if (key == "block_lines") w.storage.block_lines = parse_u32(key, v);
  else if (key == "queue_depth") w.storage.queue_depth = parse_u32(key, v);
  else if (key == "fresh_buffers") w.storage.fresh_buffers = parse_flag(key, v);
  else if (key == "process_reads_per_line") w.storage.process_reads_per_line = parse_u32(key, v);
  else if (key == "chunk_lines") w.storage.chunk_lines = parse_u32(key, v);
  else if (key == "process_lines_per_epoch") w.storage.lines_per_epoch = parse_u32(key, v);
  else if (key == "working_set_lines") w.mem.working_set_lines = parse_uint(key, v);
  else if (key == "accesses_per_epoch") w.mem.accesses_per_epoch = parse_u32(key, v);
  else if (key == "pattern") {
    if (v == "sequential") w.mem.pattern = Pattern::Sequential;
    else if (v == "random") w.mem.pattern = Pattern::Random;
    else throw ConfigError("pattern must be sequential or random", 0, key);
  } else if (key == "op") {
    if (v == "read") w.mem.op = MemOp::Read;
    else if (v == "write") w.mem.op = MemOp::Write;
    else throw ConfigError("op must be read or write", 0, key);
  } else {
    throw ConfigError("unknown workload key '" + key + "'", 0, key);
  }
}

void Scenario::validate() const {
  geometry.validate();
  thresholds.validate();
  if (epochs_per_tick == 0) throw ConfigError("epochs_per_tick must be positive", 0, "epochs_per_tick");
  if (total_ticks == 0) throw ConfigError("total_ticks must be positive", 0, "total_ticks");
  if (warmup_ticks >= total_ticks) throw ConfigError("warmup_ticks must be below total_ticks", 0, "warmup_ticks");
  std::set<std::string> dev_ids;
  for (const auto& d : devices) {
    if (d.id.empty()) throw ConfigError("device with empty id");
    if (!dev_ids.insert(d.id).second) throw ConfigError("duplicate device '" + d.id + "'", 0, d.id);
  }
  std::set<std::string> ids, used_devices;
  std::set<CoreIndex> cores;
  for (const auto& w : workloads) {
    if (w.id.empty()) throw ConfigError("workload with empty id");
    if (!ids.insert(w.id).second) throw ConfigError("duplicate workload '" + w.id + "'", 0, w.id);
    if (w.cores.empty()) throw ConfigError("workload '" + w.id + "' needs at least one core", 0, "cores");
    for (CoreIndex c : w.cores) {
      if (c >= geometry.core_count)
        throw ConfigError("workload '" + w.id + "' uses core " + std::to_string(c) + " beyond core_count", 0, "cores");
      if (!cores.insert(c).second)
        throw ConfigError("core " + std::to_string(c) + " is shared by two workloads", 0, "cores");
    }
    if (w.mask) validate_mask(geometry, *w.mask);
    if (w.kind == WorkloadKind::MemStream) {
      if (!w.device.empty()) throw ConfigError("mem_stream '" + w.id + "' cannot use a device", 0, "device");
      if (w.mem.working_set_lines == 0) throw ConfigError("working_set_lines must be positive", 0, "working_set_lines");
      continue;
    }
    auto it = std::find_if(devices.begin(), devices.end(), [&](const DeviceSpec& d) { return d.id == w.device; });
    if (it == devices.end()) throw ConfigError("workload '" + w.id + "' references unknown device '" + w.device + "'", 0, "device");
    const DeviceKind need = w.kind == WorkloadKind::NetRx ? DeviceKind::Network : DeviceKind::Storage;
    if (it->kind != need)
      throw ConfigError("workload '" + w.id + "' needs a " + to_string(need) + " device", 0, "device");
    if (!used_devices.insert(w.device).second)
      throw ConfigError("device '" + w.device + "' is used by two workloads", 0, "device");
    if (w.kind == WorkloadKind::NetRx && (w.net.ring_entries == 0 || w.net.lines_per_packet == 0))
      throw ConfigError("ring_entries and lines_per_packet must be positive", 0, "ring_entries");
    if (w.kind == WorkloadKind::StorageStream && (w.storage.block_lines == 0 || w.storage.queue_depth == 0))
      throw ConfigError("block_lines and queue_depth must be positive", 0, "block_lines");
  }
  for (const auto& e : events) {
    const std::size_t line = e.line;
    if (e.tick >= total_ticks) throw ConfigError("event tick beyond total_ticks", line, "event");
    if (e.kind == ScriptedEvent::Kind::Dca) {
      if (!dev_ids.count(e.target)) throw ConfigError("event references unknown device '" + e.target + "'", line, "event");
      continue;
    }
    auto it = std::find_if(workloads.begin(), workloads.end(), [&](const WorkloadSpec& w) { return w.id == e.target; });
    if (it == workloads.end()) throw ConfigError("event references unknown workload '" + e.target + "'", line, "event");
    if (e.kind == ScriptedEvent::Kind::Mask) validate_mask(geometry, e.mask);
    if (e.kind == ScriptedEvent::Kind::Param) {
      WorkloadSpec copy = *it;
      try {
        set_workload_param(copy, e.key, e.value);
      } catch (const ConfigError& err) {
        throw ConfigError(err.what(), line, "event");
      }
    }
  }
}

double quantize(double v) {
  const double s = 1e6;
  return std::round(v * s) / s;
}

namespace {

struct Accum {
  double sum = 0;
  std::size_t n = 0;
  void add(const std::optional<double>& v) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  std::optional<double> mean() const {
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
  }
};

}  // namespace

std::vector<SummaryRow> summarize(const std::vector<ReportRow>& rows, std::uint32_t total_ticks,
                                  std::uint32_t warmup_ticks) {
  const std::uint64_t lo = std::max<std::uint64_t>(warmup_ticks, total_ticks > 10 ? total_ticks - 10 : 0);
  std::vector<SummaryRow> out;
  std::vector<std::array<Accum, 7>> acc;
  std::map<std::string, std::size_t> index;
  for (const auto& r : rows) {
    auto [it, fresh] = index.try_emplace(r.entity, out.size());
    if (fresh) {
      SummaryRow row;
      row.entity = r.entity;
      row.kind = r.kind;
      out.push_back(std::move(row));
      acc.emplace_back();
    }
    if (r.tick < lo || r.tick >= total_ticks) continue;
    auto& a = acc[it->second];
    a[0].add(r.llc_hit_rate);
    a[1].add(r.mlc_miss_rate);
    a[2].add(r.llc_miss_rate);
    a[3].add(r.dca_leak_rate);
    a[4].add(r.io_throughput);
    a[5].add(r.latency_proxy);
    a[6].add(r.mem_bw_lines);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].llc_hit_rate = acc[i][0].mean();
    out[i].mlc_miss_rate = acc[i][1].mean();
    out[i].llc_miss_rate = acc[i][2].mean();
    out[i].dca_leak_rate = acc[i][3].mean();
    out[i].io_throughput = acc[i][4].mean();
    out[i].latency_proxy = acc[i][5].mean();
    out[i].mem_bw_lines = acc[i][6].mean();
  }
  return out;
}

const SummaryRow* find_summary(const Report& r, const std::string& entity) {
  for (const auto& s : r.summary)
    if (s.entity == entity) return &s;
  return nullptr;
}

std::vector<const ReportRow*> entity_rows(const Report& r, const std::string& entity) {
  std::vector<const ReportRow*> out;
  for (const auto& row : r.rows)
    if (row.entity == entity) out.push_back(&row);
  return out;
}

namespace {

// Every workload owns a private address region this many lines wide,
// rounded to a multiple of the LLC set count.
constexpr std::uint64_t kRegionLines = std::uint64_t{1} << 36;

class Engine {
 public:
  Engine(const Scenario& sc, RunOptions opt) : sc_(sc), opt_(opt), model_(sc.geometry, sc.model) {
    stride_ = (kRegionLines + sc.geometry.llc_sets - 1) / sc.geometry.llc_sets * sc.geometry.llc_sets;
    specs_ = sc.workloads;
    active_.resize(specs_.size());
    device_owner_.assign(sc.devices.size(), -1);
    for (std::size_t i = 0; i < specs_.size(); ++i) {
      active_[i] = specs_[i].active;
      if (specs_[i].kind == WorkloadKind::MemStream) continue;
      for (std::size_t d = 0; d < sc.devices.size(); ++d)
        if (sc.devices[d].id == specs_[i].device) device_owner_[d] = static_cast<int>(i);
    }
    for (std::size_t d = 0; d < sc.devices.size(); ++d) {
      const ClassId owner = device_owner_[d] >= 0 ? static_cast<ClassId>(device_owner_[d])
                                                  : static_cast<ClassId>(specs_.size());
      devices_.add(sc.devices[d], model_, owner);
      kinds_.push_back(sc.devices[d].kind);
    }
    counters_.resize(specs_.size());
    for (std::size_t i = 0; i < specs_.size(); ++i) workloads_.push_back(build(i));

    if (sc.controller_enabled) {
      ctl_.emplace(sc.geometry, sc.thresholds, sc.policy);
      std::vector<std::string> names;
      for (const auto& d : sc.devices) names.push_back(d.id);
      ctl_->set_device_names(names);
      for (std::size_t i = 0; i < specs_.size(); ++i) {
        ControllerWorkload cw{specs_[i].id, specs_[i].kind, specs_[i].priority, std::nullopt, active_[i]};
        if (specs_[i].kind != WorkloadKind::MemStream) cw.device = devices_.find(specs_[i].device);
        ctl_->add_workload(cw);
      }
      apply(ctl_->start(), 0);
    } else {
      for (std::size_t i = 0; i < specs_.size(); ++i)
        if (specs_[i].mask) model_.set_way_mask(static_cast<ClassId>(i), *specs_[i].mask);
    }
  }

  Report run() {
    Report rep;
    rep.total_ticks = sc_.total_ticks;
    rep.warmup_ticks = sc_.warmup_ticks;
    CounterSet prev = collect(model_, counters_);
    std::vector<std::uint32_t> budgets(sc_.devices.size());
    std::vector<LineAddr> batch;
    for (std::uint64_t tick = 0; tick < sc_.total_ticks; ++tick) {
      for (const auto& e : sc_.events)
        if (e.tick == tick) scripted(e, tick);
      for (std::uint32_t k = 0; k < sc_.epochs_per_tick; ++k) {
        const std::uint64_t epoch = tick * sc_.epochs_per_tick + k;
        for (std::size_t d = 0; d < sc_.devices.size(); ++d) {
          const int w = device_owner_[d];
          if (w < 0 || !active_[w]) continue;
          batch.clear();
          workloads_[w]->produce_dma(epoch, devices_.budget_left(static_cast<DeviceIndex>(d), epoch), batch);
          if (!batch.empty()) devices_.issue_dma({static_cast<DeviceIndex>(d), batch, epoch}, model_);
        }
        for (std::size_t i = 0; i < workloads_.size(); ++i)
          if (active_[i]) workloads_[i]->cpu_step(epoch, model_, counters_[i]);
      }
      CounterSet cur = collect(model_, counters_);
      auto broken = check_reconciliation(cur);
      ++rep.reconciliation_checks;
      if (!broken.empty()) throw SimulationError("tick " + std::to_string(tick) + ": " + broken.front());
      const RateSnapshot snap = snapshot(cur, prev, kinds_, sc_.costs, sc_.dca_miss_metric, tick);
      record(rep, snap, tick);
      if (ctl_) apply(ctl_->tick(snap), tick);
      if (opt_.keep_counters) rep.counters.push_back(cur);
      prev = std::move(cur);
    }
    rep.actions = std::move(log_);
    rep.summary = summarize(rep.rows, sc_.total_ticks, sc_.warmup_ticks);
    return rep;
  }

 private:
  std::unique_ptr<Workload> build(std::size_t i) {
    WorkloadContext ctx;
    ctx.base = LineAddr{(i + 1) * stride_};
    ctx.class_id = static_cast<ClassId>(i);
    ctx.line_bytes = sc_.geometry.line_bytes;
    ctx.seed = sc_.seed;
    if (specs_[i].kind != WorkloadKind::MemStream)
      ctx.device_lines_per_epoch = devices_.spec(devices_.find(specs_[i].device)).lines_per_epoch;
    auto w = make_workload(specs_[i], ctx);
    if (w->footprint_lines() >= stride_)
      throw ConfigError("workload '" + specs_[i].id + "' footprint exceeds its address region");
    return w;
  }

  void apply(const std::vector<Action>& actions, std::uint64_t tick) {
    for (const auto& a : actions) {
      if (a.kind == Action::Kind::SetMask) model_.set_way_mask(static_cast<ClassId>(a.workload), a.mask);
      if (a.kind == Action::Kind::SetDca) devices_.set_dca_enabled(a.device, a.enable);
      log_.push_back({tick, a.name, a.target, a.detail});
    }
  }

  std::size_t index_of(const std::string& id) const {
    for (std::size_t i = 0; i < specs_.size(); ++i)
      if (specs_[i].id == id) return i;
    throw ConfigError("unknown workload '" + id + "'");
  }

  void scripted(const ScriptedEvent& e, std::uint64_t tick) {
    using K = ScriptedEvent::Kind;
    std::string detail;
    switch (e.kind) {
      case K::Dca:
        devices_.set_dca_enabled(devices_.find(e.target), e.flag);
        detail = e.flag ? "on" : "off";
        break;
      case K::Launch:
      case K::Terminate: {
        const auto i = index_of(e.target);
        active_[i] = e.kind == K::Launch;
        detail = active_[i] ? "launch" : "terminate";
        if (ctl_) apply(ctl_->on_workload_event(active_[i] ? WorkloadEvent::Launch : WorkloadEvent::Terminate, i),
                        tick);
        break;
      }
      case K::Mask:
        model_.set_way_mask(static_cast<ClassId>(index_of(e.target)), e.mask);
        detail = std::to_string(e.mask.lo) + "-" + std::to_string(e.mask.hi);
        break;
      case K::Priority: {
        const auto i = index_of(e.target);
        specs_[i].priority = e.priority;
        detail = to_string(e.priority);
        if (ctl_) apply(ctl_->on_workload_event(WorkloadEvent::Reclassify, i, e.priority), tick);
        break;
      }
      case K::Param: {
        const auto i = index_of(e.target);
        set_workload_param(specs_[i], e.key, e.value);
        workloads_[i] = build(i);
        detail = e.key + "=" + e.value;
        break;
      }
    }
    log_.push_back({tick, "event", e.target, detail});
  }

  void record(Report& rep, const RateSnapshot& snap, std::uint64_t tick) {
    const std::string phase = ctl_ ? to_string(ctl_->phase()) : "";
    for (std::size_t i = 0; i < specs_.size(); ++i) {
      ReportRow r;
      r.tick = tick;
      r.entity = specs_[i].id;
      r.kind = to_string(specs_[i].kind);
      const auto& w = snap.workloads[i];
      if (active_[i] || w.accesses > 0) {
        r.llc_hit_rate = quantize(w.llc_hit_rate);
        r.mlc_miss_rate = quantize(w.mlc_miss_rate);
        r.llc_miss_rate = quantize(w.llc_miss_rate);
        r.latency_proxy = quantize(w.latency_proxy);
        if (specs_[i].kind != WorkloadKind::MemStream) r.io_throughput = quantize(w.io_throughput);
      }
      const WayMask m = model_.way_mask(static_cast<ClassId>(i));
      r.mask_lo = m.lo;
      r.mask_hi = m.hi;
      r.priority = to_string(ctl_ ? ctl_->effective_priority(i) : specs_[i].priority);
      r.antagonist = to_string(ctl_ ? ctl_->antagonist(i) : Antagonist::None);
      r.phase = phase;
      rep.rows.push_back(std::move(r));
    }
    for (std::size_t d = 0; d < sc_.devices.size(); ++d) {
      ReportRow r;
      r.tick = tick;
      r.entity = sc_.devices[d].id;
      r.kind = to_string(sc_.devices[d].kind);
      r.dca_leak_rate = quantize(snap.devices[d].dca_leak_rate);
      r.dca_enabled = devices_.dca_enabled(static_cast<DeviceIndex>(d));
      r.phase = phase;
      rep.rows.push_back(std::move(r));
    }
    ReportRow g;
    g.tick = tick;
    g.entity = "system";
    g.kind = "system";
    g.mem_bw_lines = quantize(snap.memory_bandwidth);
    g.phase = phase;
    rep.rows.push_back(std::move(g));
  }

  const Scenario& sc_;
  RunOptions opt_;
  CacheModel model_;
  DeviceTable devices_;
  std::vector<DeviceKind> kinds_;
  std::vector<WorkloadSpec> specs_;
  std::vector<bool> active_;
  std::vector<int> device_owner_;
  std::vector<std::unique_ptr<Workload>> workloads_;
  std::vector<WorkloadCounters> counters_;
  std::optional<A4Controller> ctl_;
  std::vector<ActionRecord> log_;
  std::uint64_t stride_ = 0;
};

}  // namespace

Report run(const Scenario& scenario, RunOptions options) {
  scenario.validate();
  Engine e(scenario, options);
  return e.run();
}

}  // namespace a4sim
