#include "a4sim/builtins.hpp"

#include <functional>
#include <map>

#include "a4sim/error.hpp"
#include "a4sim/scenario.hpp"

namespace a4sim {

namespace {

// Desk-scale machine shared by every builtin: 11-way LLC, 2 DCA ways,
// 2 inclusive ways, private MLCs.
std::string machine(unsigned nic_lines = 4096) {
  return R"([llc]
sets = 32768
ways = 11
dca_ways = 2
inclusive_ways = 2
line_bytes = 64

[mlc]
sets = 2048
ways = 8

[device nic0]
kind = network
lines_per_epoch = )" + std::to_string(nic_lines) + "\n";
}

std::string sim_section(const std::string& name, bool controller, unsigned ticks, unsigned warmup, unsigned cores = 6,
                        unsigned epochs = 120) {
  return "[sim]\nname = " + name + "\ncores = " + std::to_string(cores) +
         "\nepochs_per_tick = " + std::to_string(epochs) + "\ntotal_ticks = " + std::to_string(ticks) +
         "\nwarmup_ticks = " + std::to_string(warmup) + "\nseed = 7\ncontroller = " + (controller ? "on" : "off") +
         "\n\n";
}

std::string net_rx(const std::string& mask, bool touch, const std::string& priority = "high") {
  return "\n[workload dpdk]\nkind = net_rx\npriority = " + priority +
         "\ncores = 0-3\ndevice = nic0\nring_entries = 2048\nlines_per_packet = 16\ntouch = " +
         (touch ? "on" : "off") + (mask.empty() ? "" : "\nmask = " + mask) + "\n";
}

std::string xmem(const std::string& id, const std::string& cores, const std::string& mask, unsigned ws,
                 const std::string& priority = "high", unsigned accesses = 64,
                 const std::string& pattern = "random") {
  return "\n[workload " + id + "]\nkind = mem_stream\npriority = " + priority + "\ncores = " + cores +
         "\nworking_set_lines = " + std::to_string(ws) + "\npattern = " + pattern + "\naccesses_per_epoch = " + std::to_string(accesses) +
         (mask.empty() ? "" : "\nmask = " + mask) + "\n";
}

std::string ssd(const std::string& mask, bool dca, unsigned lines, const std::string& priority = "low",
                const std::string& cores = "6-7") {
  return "\n[device ssd0]\nkind = storage\nlines_per_epoch = " + std::to_string(lines) + "\ndca = " + (dca ? "on" : "off") +
         "\n\n[workload fio]\nkind = storage_stream\npriority = " + priority +
         "\ncores = " + cores + "\ndevice = ssd0\nblock_lines = 2048\nqueue_depth = 32" +
         (mask.empty() ? "" : "\nmask = " + mask) + "\n";
}

std::string mask_label(WayIndex lo, WayIndex hi) { return "mask_" + std::to_string(lo) + "_" + std::to_string(hi); }

std::string text_of(const std::string& name) {
  if (name == "fig3a_sweep" || name == "fig3b_sweep") {
    const bool touch = name == "fig3b_sweep";
    return sim_section(name, false, 30, 10) + machine() + net_rx("5-6", touch) + xmem("xmem", "4-5", "0-1", 147456);
  }
  if (name == "fig4_dca_off")
    return sim_section(name, false, 30, 10) + machine() + net_rx("5-6", true) + xmem("xmem", "4-5", "9-10", 147456);
  if (name == "fig5_overlap_exclude") return sim_section(name, false, 30, 10, 4) + machine(8192) + net_rx("7-8", true);
  if (name == "fig6a_selective_dca")
    return sim_section(name, false, 30, 10, 8, 20) + machine() + net_rx("", true) + ssd("", true, 32768);
  if (name == "fig6b_trash_shrink")
    return sim_section(name, false, 30, 10, 8, 40) + machine() + ssd("2-5", false, 4096) +
           xmem("xmem", "4-5", "2-5", 147456, "high", 256);
  if (name == "hpw_heavy")
    return sim_section(name, true, 70, 10, 12, 20) + machine() + net_rx("", true) +
           xmem("xmem1", "4-5", "", 49152, "high", 1024) + xmem("xmem2", "6-7", "", 65536, "high", 1024, "sequential") +
           ssd("", true, 32768, "low", "8-9") + xmem("xmem3", "10-11", "", 1048576, "low");
  if (name == "lpw_heavy")
    return sim_section(name, true, 70, 10, 12, 20) + machine() + net_rx("", true) +
           xmem("xmem1", "4-5", "", 49152, "high", 1024) + ssd("", true, 32768, "low", "6-7") +
           xmem("xmem2", "8-9", "", 65536, "low", 1024, "sequential") + xmem("xmem3", "10-11", "", 1048576, "low");
  throw ConfigError("unknown builtin '" + name + "'");
}

WorkloadSpec& workload(Scenario& s, const std::string& id) {
  for (auto& w : s.workloads)
    if (w.id == id) return w;
  throw ConfigError("builtin has no workload '" + id + "'");
}

DeviceSpec& device(Scenario& s, const std::string& id) {
  for (auto& d : s.devices)
    if (d.id == id) return d;
  throw ConfigError("builtin has no device '" + id + "'");
}

}  // namespace

std::vector<std::string> builtin_names() {
  return {"fig3a_sweep",         "fig3b_sweep",        "fig4_dca_off", "fig5_overlap_exclude",
          "fig6a_selective_dca", "fig6b_trash_shrink", "hpw_heavy",    "lpw_heavy"};
}

std::string builtin_scenario(const std::string& name) { return text_of(name); }

std::vector<SweepMember> builtin_family(const std::string& name) {
  const Scenario base = parse_scenario(text_of(name));
  std::vector<SweepMember> out;
  auto add = [&](std::string label, const std::function<void(Scenario&)>& edit) {
    Scenario s = base;
    edit(s);
    s.name = name + "/" + label;
    s.validate();
    out.push_back({std::move(label), std::move(s)});
  };
  const WayIndex ways = base.geometry.llc_ways;
  if (name == "fig3a_sweep" || name == "fig3b_sweep") {
    for (WayIndex lo = 0; lo + 1 < ways; ++lo)
      add(mask_label(lo, lo + 1), [&](Scenario& s) { workload(s, "xmem").mask = WayMask{lo, lo + 1}; });
  } else if (name == "fig4_dca_off") {
    for (const bool dca : {true, false})
      for (const WayMask m : {WayMask{2, 3}, WayMask{3, 4}, WayMask{7, 8}, WayMask{9, 10}})
        add(std::string(dca ? "dca_on_" : "dca_off_") + mask_label(m.lo, m.hi), [&](Scenario& s) {
          workload(s, "xmem").mask = m;
          device(s, "nic0").dca_enabled = dca;
        });
  } else if (name == "fig5_overlap_exclude") {
    const WayIndex incl = ways - base.geometry.inclusive_way_count;
    for (const WayIndex n : {2u, 4u}) {
      add(std::to_string(n) + "_exclude", [&](Scenario& s) { workload(s, "dpdk").mask = WayMask{incl - n, incl - 1}; });
      add(std::to_string(n + 2) + "_overlap",
          [&](Scenario& s) { workload(s, "dpdk").mask = WayMask{incl - n, ways - 1}; });
    }
  } else if (name == "fig6a_selective_dca") {
    add("net_alone", [&](Scenario& s) {
      std::erase_if(s.workloads, [](const WorkloadSpec& w) { return w.id == "fio"; });
      std::erase_if(s.devices, [](const DeviceSpec& d) { return d.id == "ssd0"; });
    });
    add("dca_on", [](Scenario&) {});
    add("ssd_dca_off", [&](Scenario& s) { device(s, "ssd0").dca_enabled = false; });
  } else if (name == "fig6b_trash_shrink") {
    for (WayIndex hi = 5; hi >= 2; --hi)
      add("fio_2_" + std::to_string(hi), [&](Scenario& s) { workload(s, "fio").mask = WayMask{2, hi}; });
  } else {
    add("controller_on", [](Scenario& s) { s.controller_enabled = true; });
    add("controller_off", [](Scenario& s) { s.controller_enabled = false; });
  }
  return out;
}

}  // namespace a4sim
