#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "a4sim/engine.hpp"

namespace a4sim {

struct ParseOptions {
  bool lenient = false;  // unknown keys become warnings
};

/// Parses scenario text. Errors are ConfigError with the source line set.
Scenario parse_scenario(std::string_view text, ParseOptions options = {}, std::vector<std::string>* warnings = nullptr);

/// Canonical text with every field spelled out; parses back to an equal Scenario.
std::string dump_scenario(const Scenario& s);

/// Applies `section.key=value` (`device.<id>.key`, `workload.<id>.key` for
/// named sections) and revalidates.
void apply_override(Scenario& s, const std::string& assignment);

inline constexpr const char* kReportHeader =
    "tick,entity,kind,llc_hit_rate,mlc_miss_rate,llc_miss_rate,dca_leak_rate,io_throughput,latency_proxy,"
    "mem_bw_lines,mask_lo,mask_hi,dca_enabled,priority,antagonist,phase";

void emit_csv(const Report& report, std::ostream& os);
void emit_actions_csv(const Report& report, std::ostream& os);
void emit_summary_csv(const Report& report, std::ostream& os);

/// Reads rows written by emit_csv.
std::vector<ReportRow> parse_report_csv(std::istream& is);

}  // namespace a4sim
