#include "a4sim/scenario.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "a4sim/error.hpp"

namespace a4sim {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string t; is >> t;) out.push_back(t);
  return out;
}

std::uint64_t to_uint(const std::string& v, const std::string& key) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw ConfigError("'" + key + "' expects a non-negative integer, got '" + v + "'", 0, key);
  return out;
}

std::uint32_t to_u32(const std::string& v, const std::string& key) {
  const auto x = to_uint(v, key);
  if (x > 0xFFFFFFFFull) throw ConfigError("'" + key + "' is out of range", 0, key);
  return static_cast<std::uint32_t>(x);
}

double to_double(const std::string& v, const std::string& key) {
  double out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size() || !std::isfinite(out))
    throw ConfigError("'" + key + "' expects a number, got '" + v + "'", 0, key);
  return out;
}

bool to_flag(const std::string& v, const std::string& key) {
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("'" + key + "' expects on/off, got '" + v + "'", 0, key);
}

WayMask to_mask(const std::string& v, const std::string& key) {
  const auto dash = v.find('-');
  if (dash == std::string::npos) {
    const auto w = to_u32(v, key);
    return {w, w};
  }
  return {to_u32(v.substr(0, dash), key), to_u32(v.substr(dash + 1), key)};
}

std::vector<CoreIndex> to_cores(const std::string& v, const std::string& key) {
  std::vector<CoreIndex> out;
  std::stringstream ss(v);
  for (std::string part; std::getline(ss, part, ',');) {
    part = trim(part);
    const auto dash = part.find('-');
    if (dash == std::string::npos) {
      out.push_back(to_u32(part, key));
      continue;
    }
    const auto lo = to_u32(part.substr(0, dash), key), hi = to_u32(part.substr(dash + 1), key);
    if (lo > hi) throw ConfigError("bad core range '" + part + "'", 0, key);
    for (auto c = lo; c <= hi; ++c) out.push_back(c);
  }
  if (out.empty()) throw ConfigError("empty core list", 0, key);
  return out;
}

Priority to_priority(const std::string& v, const std::string& key) {
  if (v == "high") return Priority::High;
  if (v == "low") return Priority::Low;
  throw ConfigError("'" + key + "' expects high or low, got '" + v + "'", 0, key);
}

const char* onoff(bool b) { return b ? "on" : "off"; }

std::string fmt_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::string mask_text(const WayMask& m) { return std::to_string(m.lo) + "-" + std::to_string(m.hi); }

// Section setters return false for unknown keys.

bool set_sim(Scenario& s, const std::string& k, const std::string& v) {
  if (k == "name") s.name = v;
  else if (k == "epochs_per_tick") s.epochs_per_tick = to_u32(v, k);
  else if (k == "total_ticks") s.total_ticks = to_u32(v, k);
  else if (k == "warmup_ticks") s.warmup_ticks = to_u32(v, k);
  else if (k == "seed") s.seed = to_uint(v, k);
  else if (k == "cores") s.geometry.core_count = to_u32(v, k);
  else if (k == "controller") s.controller_enabled = to_flag(v, k);
  else if (k == "migrate_non_io") s.model.migrate_non_io = to_flag(v, k);
  else if (k == "paranoid") s.model.paranoid = to_flag(v, k);
  else if (k == "cost_mlc_hit") s.costs.mlc_hit = to_double(v, k);
  else if (k == "cost_llc_hit") s.costs.llc_hit = to_double(v, k);
  else if (k == "cost_memory") s.costs.memory = to_double(v, k);
  else if (k == "exclude_dca_for_nonio_hpw") s.policy.exclude_dca_for_nonio_hpw = to_flag(v, k);
  else if (k == "net_bloat_to_trash") s.policy.net_bloat_to_trash = to_flag(v, k);
  else if (k == "dca_miss_metric") {
    if (v == "leak") s.dca_miss_metric = DcaMissMetric::Leak;
    else if (v == "alloc_fraction") s.dca_miss_metric = DcaMissMetric::AllocFraction;
    else throw ConfigError("dca_miss_metric must be leak or alloc_fraction", 0, k);
  } else return false;
  return true;
}

bool set_llc(Scenario& s, const std::string& k, const std::string& v) {
  auto& g = s.geometry;
  if (k == "sets") g.llc_sets = to_u32(v, k);
  else if (k == "ways") g.llc_ways = to_u32(v, k);
  else if (k == "dca_ways") g.dca_way_count = to_u32(v, k);
  else if (k == "inclusive_ways") g.inclusive_way_count = to_u32(v, k);
  else if (k == "line_bytes") g.line_bytes = to_u32(v, k);
  else return false;
  return true;
}

bool set_mlc(Scenario& s, const std::string& k, const std::string& v) {
  if (k == "sets") s.geometry.mlc_sets = to_u32(v, k);
  else if (k == "ways") s.geometry.mlc_ways = to_u32(v, k);
  else return false;
  return true;
}

bool set_thresholds(Scenario& s, const std::string& k, const std::string& v) {
  auto& t = s.thresholds;
  if (k == "hpw_llc_hit_thr" || k == "hwp_llc_hit_thr") t.hpw_llc_hit_thr = to_double(v, k);
  else if (k == "dmalk_dca_ms_thr") t.dmalk_dca_ms_thr = to_double(v, k);
  else if (k == "dmalk_io_tp_thr") t.dmalk_io_tp_thr = to_double(v, k);
  else if (k == "dmalk_llc_ms_thr") t.dmalk_llc_ms_thr = to_double(v, k);
  else if (k == "ant_cache_miss_thr") t.ant_cache_miss_thr = to_double(v, k);
  else if (k == "instability_thr") t.instability_thr = to_double(v, k);
  else if (k == "stable_interval") t.stable_interval = to_u32(v, k);
  else if (k == "revert_interval") t.revert_interval = to_u32(v, k);
  else if (k == "expand_period") t.expand_period = to_u32(v, k);
  else return false;
  return true;
}

bool set_device(DeviceSpec& d, const std::string& k, const std::string& v) {
  if (k == "kind") {
    if (v == "network") d.kind = DeviceKind::Network;
    else if (v == "storage") d.kind = DeviceKind::Storage;
    else throw ConfigError("device kind must be network or storage", 0, k);
  } else if (k == "lines_per_epoch") d.lines_per_epoch = to_u32(v, k);
  else if (k == "dca") d.dca_enabled = to_flag(v, k);
  else return false;
  return true;
}

bool set_workload(WorkloadSpec& w, const std::string& k, const std::string& v) {
  if (k == "kind") {
    if (v == "net_rx") w.kind = WorkloadKind::NetRx;
    else if (v == "storage_stream") w.kind = WorkloadKind::StorageStream;
    else if (v == "mem_stream") w.kind = WorkloadKind::MemStream;
    else throw ConfigError("workload kind must be net_rx, storage_stream or mem_stream", 0, k);
  } else if (k == "priority") w.priority = to_priority(v, k);
  else if (k == "cores") w.cores = to_cores(v, k);
  else if (k == "device") w.device = v;
  else if (k == "mask") w.mask = to_mask(v, k);
  else if (k == "active") w.active = to_flag(v, k);
  else {
    try {
      set_workload_param(w, k, v);
    } catch (const ConfigError& e) {
      if (std::string(e.what()).rfind("unknown workload key", 0) == 0) return false;
      throw;
    }
  }
  return true;
}

ScriptedEvent parse_event(const std::string& v) {
  const auto t = split_ws(v);
  if (t.size() < 3) throw ConfigError("event expects '<tick> <action> <target> [args]'", 0, "event");
  ScriptedEvent e;
  e.tick = to_uint(t[0], "event");
  e.target = t[2];
  const std::string& a = t[1];
  using K = ScriptedEvent::Kind;
  auto need = [&](std::size_t n) {
    if (t.size() != n) throw ConfigError("event '" + a + "' expects " + std::to_string(n - 3) + " argument(s)", 0, "event");
  };
  if (a == "launch") { need(3); e.kind = K::Launch; }
  else if (a == "terminate") { need(3); e.kind = K::Terminate; }
  else if (a == "mask") { need(4); e.kind = K::Mask; e.mask = to_mask(t[3], "event"); }
  else if (a == "dca") { need(4); e.kind = K::Dca; e.flag = to_flag(t[3], "event"); }
  else if (a == "priority") { need(4); e.kind = K::Priority; e.priority = to_priority(t[3], "event"); }
  else if (a == "param") { need(5); e.kind = K::Param; e.key = t[3]; e.value = t[4]; }
  else throw ConfigError("unknown event action '" + a + "'", 0, "event");
  return e;
}

std::string event_text(const ScriptedEvent& e) {
  using K = ScriptedEvent::Kind;
  std::string s = std::to_string(e.tick) + " ";
  switch (e.kind) {
    case K::Launch: return s + "launch " + e.target;
    case K::Terminate: return s + "terminate " + e.target;
    case K::Mask: return s + "mask " + e.target + " " + mask_text(e.mask);
    case K::Dca: return s + "dca " + e.target + " " + onoff(e.flag);
    case K::Priority: return s + "priority " + e.target + " " + to_string(e.priority);
    case K::Param: return s + "param " + e.target + " " + e.key + " " + e.value;
  }
  return s;
}

}  // namespace

Scenario parse_scenario(std::string_view text, ParseOptions options, std::vector<std::string>* warnings) {
  Scenario s;
  std::string section, sec_id;
  std::set<std::string> seen_sections;
  std::map<std::string, std::size_t> key_lines;  // "section.key" -> line
  std::map<std::string, std::size_t> section_lines;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string line(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) {
      if (nl == text.size()) break;
      continue;
    }
    try {
      if (line.front() == '[') {
        if (line.back() != ']') throw ConfigError("malformed section header '" + line + "'");
        const auto parts = split_ws(line.substr(1, line.size() - 2));
        if (parts.empty()) throw ConfigError("empty section header");
        section = parts[0];
        sec_id = parts.size() > 1 ? parts[1] : "";
        const bool named = section == "device" || section == "workload";
        if (named != (parts.size() == 2) || parts.size() > 2)
          throw ConfigError(named ? "section '" + section + "' needs exactly one id"
                                  : "section '" + section + "' takes no id");
        if (!named && section != "sim" && section != "llc" && section != "mlc" && section != "thresholds" &&
            section != "events")
          throw ConfigError("unknown section '" + section + "'");
        const std::string full = named ? section + " " + sec_id : section;
        if (!seen_sections.insert(full).second) throw ConfigError("duplicate section [" + full + "]");
        section_lines[full] = lineno;
        if (section == "device") {
          DeviceSpec d;
          d.id = sec_id;
          s.devices.push_back(d);
        } else if (section == "workload") {
          WorkloadSpec w;
          w.id = sec_id;
          s.workloads.push_back(w);
        }
        if (nl == text.size()) break;
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ConfigError("expected 'key = value', got '" + line + "'");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty() || value.empty()) throw ConfigError("expected 'key = value', got '" + line + "'");
      if (section.empty()) throw ConfigError("key '" + key + "' outside any section", 0, key);
      const std::string slot = (sec_id.empty() ? section : section + " " + sec_id) + "." + key;
      if (section != "events" && key_lines.count(slot)) throw ConfigError("duplicate key '" + key + "'", 0, key);
      key_lines[slot] = lineno;
      bool known;
      if (section == "sim") known = set_sim(s, key, value);
      else if (section == "llc") known = set_llc(s, key, value);
      else if (section == "mlc") known = set_mlc(s, key, value);
      else if (section == "thresholds") known = set_thresholds(s, key, value);
      else if (section == "device") known = set_device(s.devices.back(), key, value);
      else if (section == "workload") known = set_workload(s.workloads.back(), key, value);
      else {
        known = key == "event";
        if (known) {
          s.events.push_back(parse_event(value));
          s.events.back().line = lineno;
        }
      }
      if (!known) {
        const std::string msg = "unknown key '" + key + "' in [" + section + "]";
        if (!options.lenient) throw ConfigError(msg, 0, key);
        if (warnings) warnings->push_back("line " + std::to_string(lineno) + ": " + msg);
      }
    } catch (const ConfigError& e) {
      if (e.line() != 0) throw;
      throw ConfigError(e.what(), lineno, e.key());
    }
    if (nl == text.size()) break;
  }

  auto line_of = [&](const std::string& slot, const std::string& fallback) -> std::size_t {
    if (auto it = key_lines.find(slot); it != key_lines.end()) return it->second;
    if (auto it = section_lines.find(fallback); it != section_lines.end()) return it->second;
    return 0;
  };
  // Geometry: blame the last geometry key written.
  try {
    s.geometry.validate();
  } catch (const ConfigError& e) {
    std::size_t l = 0;
    for (const char* k : {"llc.sets", "llc.ways", "llc.dca_ways", "llc.inclusive_ways", "llc.line_bytes", "mlc.sets",
                          "mlc.ways", "sim.cores"})
      if (auto it = key_lines.find(k); it != key_lines.end()) l = std::max(l, it->second);
    throw ConfigError(e.what(), l, "llc");
  }
  try {
    s.thresholds.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(e.what(), line_of("thresholds." + e.key(), "thresholds"), e.key());
  }
  for (const auto& w : s.workloads) {
    const std::string sec = "workload " + w.id;
    try {
      if (w.mask) validate_mask(s.geometry, *w.mask);
    } catch (const ConfigError& e) {
      throw ConfigError(e.what(), line_of(sec + ".mask", sec), "mask");
    }
  }
  try {
    s.validate();
  } catch (const ConfigError& e) {
    if (e.line() != 0) throw;
    // Prefer the section named in the message, else the first slot with that key.
    const std::string msg = e.what();
    std::size_t l = 0, fallback = 0;
    for (const auto& [slot, ln] : key_lines) {
      const auto dot = slot.rfind('.');
      if (slot.substr(dot + 1) != e.key()) continue;
      if (!fallback) fallback = ln;
      const auto sp = slot.find(' ');
      if (sp != std::string::npos && sp < dot && msg.find("'" + slot.substr(sp + 1, dot - sp - 1) + "'") != std::string::npos) {
        l = ln;
        break;
      }
    }
    if (!l) l = fallback;
    throw ConfigError(e.what(), l, e.key());
  }
  return s;
}

std::string dump_scenario(const Scenario& s) {
  std::ostringstream os;
  os << "[sim]\n";
  if (!s.name.empty()) os << "name = " << s.name << "\n";
  os << "epochs_per_tick = " << s.epochs_per_tick << "\n"
     << "total_ticks = " << s.total_ticks << "\n"
     << "warmup_ticks = " << s.warmup_ticks << "\n"
     << "seed = " << s.seed << "\n"
     << "cores = " << s.geometry.core_count << "\n"
     << "controller = " << onoff(s.controller_enabled) << "\n"
     << "migrate_non_io = " << onoff(s.model.migrate_non_io) << "\n"
     << "paranoid = " << onoff(s.model.paranoid) << "\n"
     << "cost_mlc_hit = " << fmt_double(s.costs.mlc_hit) << "\n"
     << "cost_llc_hit = " << fmt_double(s.costs.llc_hit) << "\n"
     << "cost_memory = " << fmt_double(s.costs.memory) << "\n"
     << "exclude_dca_for_nonio_hpw = " << onoff(s.policy.exclude_dca_for_nonio_hpw) << "\n"
     << "net_bloat_to_trash = " << onoff(s.policy.net_bloat_to_trash) << "\n"
     << "dca_miss_metric = " << (s.dca_miss_metric == DcaMissMetric::Leak ? "leak" : "alloc_fraction") << "\n\n";
  const auto& g = s.geometry;
  os << "[llc]\nsets = " << g.llc_sets << "\nways = " << g.llc_ways << "\ndca_ways = " << g.dca_way_count
     << "\ninclusive_ways = " << g.inclusive_way_count << "\nline_bytes = " << g.line_bytes << "\n\n";
  os << "[mlc]\nsets = " << g.mlc_sets << "\nways = " << g.mlc_ways << "\n\n";
  const auto& t = s.thresholds;
  os << "[thresholds]\nhpw_llc_hit_thr = " << fmt_double(t.hpw_llc_hit_thr)
     << "\ndmalk_dca_ms_thr = " << fmt_double(t.dmalk_dca_ms_thr)
     << "\ndmalk_io_tp_thr = " << fmt_double(t.dmalk_io_tp_thr)
     << "\ndmalk_llc_ms_thr = " << fmt_double(t.dmalk_llc_ms_thr)
     << "\nant_cache_miss_thr = " << fmt_double(t.ant_cache_miss_thr)
     << "\ninstability_thr = " << fmt_double(t.instability_thr) << "\nstable_interval = " << t.stable_interval
     << "\nrevert_interval = " << t.revert_interval << "\nexpand_period = " << t.expand_period << "\n";
  for (const auto& d : s.devices)
    os << "\n[device " << d.id << "]\nkind = " << to_string(d.kind) << "\nlines_per_epoch = " << d.lines_per_epoch
       << "\ndca = " << onoff(d.dca_enabled) << "\n";
  for (const auto& w : s.workloads) {
    os << "\n[workload " << w.id << "]\nkind = " << to_string(w.kind) << "\npriority = " << to_string(w.priority)
       << "\ncores = ";
    for (std::size_t i = 0; i < w.cores.size(); ++i) os << (i ? "," : "") << w.cores[i];
    os << "\n";
    if (!w.device.empty()) os << "device = " << w.device << "\n";
    if (w.mask) os << "mask = " << mask_text(*w.mask) << "\n";
    os << "active = " << onoff(w.active) << "\n";
    // All parameter groups are written so unused defaults survive the round trip too.
    os << "ring_entries = " << w.net.ring_entries << "\nlines_per_packet = " << w.net.lines_per_packet
       << "\ntouch = " << onoff(w.net.touch) << "\ndesc_bytes = " << w.net.desc_bytes
       << "\npackets_per_epoch = " << w.net.packets_per_epoch << "\nblock_lines = " << w.storage.block_lines
       << "\nqueue_depth = " << w.storage.queue_depth << "\nfresh_buffers = " << onoff(w.storage.fresh_buffers)
       << "\nprocess_reads_per_line = " << w.storage.process_reads_per_line
       << "\nchunk_lines = " << w.storage.chunk_lines
       << "\nprocess_lines_per_epoch = " << w.storage.lines_per_epoch
       << "\nworking_set_lines = " << w.mem.working_set_lines
       << "\npattern = " << (w.mem.pattern == Pattern::Sequential ? "sequential" : "random")
       << "\nop = " << (w.mem.op == MemOp::Read ? "read" : "write")
       << "\naccesses_per_epoch = " << w.mem.accesses_per_epoch << "\n";
  }
  if (!s.events.empty()) {
    os << "\n[events]\n";
    for (const auto& e : s.events) os << "event = " << event_text(e) << "\n";
  }
  return os.str();
}

void apply_override(Scenario& s, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' must look like section.key=value");
  const std::string path = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  const auto d1 = path.find('.');
  if (d1 == std::string::npos) throw ConfigError("override '" + path + "' needs a section");
  const std::string section = path.substr(0, d1);
  std::string rest = path.substr(d1 + 1);
  bool known = false;
  if (section == "device" || section == "workload") {
    const auto d2 = rest.rfind('.');
    if (d2 == std::string::npos) throw ConfigError("override '" + path + "' needs " + section + ".<id>.key");
    const std::string id = rest.substr(0, d2), key = rest.substr(d2 + 1);
    if (section == "device") {
      for (auto& d : s.devices)
        if (d.id == id) known = set_device(d, key, value) || (throw ConfigError("unknown device key '" + key + "'", 0, key), false);
    } else {
      for (auto& w : s.workloads)
        if (w.id == id) known = set_workload(w, key, value) || (throw ConfigError("unknown workload key '" + key + "'", 0, key), false);
    }
    if (!known) throw ConfigError("override names unknown " + section + " '" + id + "'");
  } else if (section == "sim") known = set_sim(s, rest, value);
  else if (section == "llc") known = set_llc(s, rest, value);
  else if (section == "mlc") known = set_mlc(s, rest, value);
  else if (section == "thresholds") known = set_thresholds(s, rest, value);
  else throw ConfigError("unknown section '" + section + "' in override");
  if (!known) throw ConfigError("unknown key '" + rest + "' in [" + section + "]", 0, rest);
  s.validate();
}

namespace {

void put(std::ostream& os, const std::optional<double>& v) {
  if (!v) return;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", kReportDecimals, *v);
  os << buf;
}

template <class T>
void put_int(std::ostream& os, const std::optional<T>& v) {
  if (v) os << *v;
}

std::optional<double> get_d(const std::string& f) {
  if (f.empty()) return std::nullopt;
  return to_double(f, "csv");
}

}  // namespace

void emit_csv(const Report& report, std::ostream& os) {
  os << kReportHeader << "\n";
  for (const auto& r : report.rows) {
    os << r.tick << ',' << r.entity << ',' << r.kind << ',';
    put(os, r.llc_hit_rate);
    os << ',';
    put(os, r.mlc_miss_rate);
    os << ',';
    put(os, r.llc_miss_rate);
    os << ',';
    put(os, r.dca_leak_rate);
    os << ',';
    put(os, r.io_throughput);
    os << ',';
    put(os, r.latency_proxy);
    os << ',';
    put(os, r.mem_bw_lines);
    os << ',';
    put_int(os, r.mask_lo);
    os << ',';
    put_int(os, r.mask_hi);
    os << ',';
    if (r.dca_enabled) os << (*r.dca_enabled ? 1 : 0);
    os << ',' << r.priority << ',' << r.antagonist << ',' << r.phase << '\n';
  }
}

void emit_actions_csv(const Report& report, std::ostream& os) {
  os << "tick,action,target,detail\n";
  for (const auto& a : report.actions) {
    std::string detail = a.detail;
    for (char& c : detail)
      if (c == ',') c = ';';
    os << a.tick << ',' << a.action << ',' << a.target << ',' << detail << '\n';
  }
}

void emit_summary_csv(const Report& report, std::ostream& os) {
  os << "entity,kind,llc_hit_rate,mlc_miss_rate,llc_miss_rate,dca_leak_rate,io_throughput,latency_proxy,mem_bw_lines\n";
  for (const auto& s : report.summary) {
    os << s.entity << ',' << s.kind << ',';
    put(os, s.llc_hit_rate);
    os << ',';
    put(os, s.mlc_miss_rate);
    os << ',';
    put(os, s.llc_miss_rate);
    os << ',';
    put(os, s.dca_leak_rate);
    os << ',';
    put(os, s.io_throughput);
    os << ',';
    put(os, s.latency_proxy);
    os << ',';
    put(os, s.mem_bw_lines);
    os << '\n';
  }
}

std::vector<ReportRow> parse_report_csv(std::istream& is) {
  std::vector<ReportRow> rows;
  std::string line;
  if (!std::getline(is, line) || line != kReportHeader) throw ConfigError("report CSV header mismatch");
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 16) throw ConfigError("report row has " + std::to_string(f.size()) + " fields", lineno);
    ReportRow r;
    r.tick = to_uint(f[0], "tick");
    r.entity = f[1];
    r.kind = f[2];
    r.llc_hit_rate = get_d(f[3]);
    r.mlc_miss_rate = get_d(f[4]);
    r.llc_miss_rate = get_d(f[5]);
    r.dca_leak_rate = get_d(f[6]);
    r.io_throughput = get_d(f[7]);
    r.latency_proxy = get_d(f[8]);
    r.mem_bw_lines = get_d(f[9]);
    if (!f[10].empty()) r.mask_lo = to_u32(f[10], "mask_lo");
    if (!f[11].empty()) r.mask_hi = to_u32(f[11], "mask_hi");
    if (!f[12].empty()) r.dca_enabled = f[12] == "1";
    r.priority = f[13];
    r.antagonist = f[14];
    r.phase = f[15];
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace a4sim
