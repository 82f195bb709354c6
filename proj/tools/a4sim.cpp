#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "a4sim/builtins.hpp"
#include "a4sim/error.hpp"
#include "a4sim/scenario.hpp"
#include "a4sim/sweep.hpp"

namespace fs = std::filesystem;
using namespace a4sim;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read scenario file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_report(const Report& rep, const fs::path& dir) {
  fs::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    return f;
  };
  auto r = open("report.csv");
  emit_csv(rep, r);
  auto a = open("actions.csv");
  emit_actions_csv(rep, a);
  auto s = open("summary.csv");
  emit_summary_csv(rep, s);
}

void print_summary(const Report& rep) {
  emit_summary_csv(rep, std::cout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"a4sim: LLC/DCA contention simulator and A4-style partition controller"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "Run one scenario file or builtin");
  std::string scenario_arg, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint32_t> ticks;
  bool no_controller = false, lenient = false;
  std::vector<std::string> overrides;
  run_cmd->add_option("scenario", scenario_arg, "Scenario file path, or builtin:<name>")->required();
  run_cmd->add_option("--seed", seed, "Override the scenario seed");
  run_cmd->add_option("--out", out_dir, "Directory for report.csv, actions.csv, summary.csv");
  run_cmd->add_option("--ticks", ticks, "Override total_ticks");
  run_cmd->add_flag("--no-controller", no_controller, "Disable the controller");
  run_cmd->add_option("--set", overrides, "section.key=value override (repeatable)");
  run_cmd->add_flag("--lenient", lenient, "Treat unknown keys as warnings");

  auto* sweep_cmd = app.add_subcommand("sweep", "Run every member of a builtin family");
  std::string sweep_name, sweep_out;
  int threads = 0;
  bool serial = false;
  sweep_cmd->add_option("name", sweep_name, "Builtin name")->required();
  sweep_cmd->add_option("--out", sweep_out, "Output directory (one subdirectory per member)")->required();
  sweep_cmd->add_option("--threads", threads, "OpenMP threads (0 = runtime default)");
  sweep_cmd->add_flag("--serial", serial, "Run members one after another");

  auto* list_cmd = app.add_subcommand("list-builtins", "List builtin scenario names");
  auto* show_cmd = app.add_subcommand("show-builtin", "Print a builtin's base scenario text");
  std::string show_name;
  show_cmd->add_option("name", show_name)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list_cmd) {
      for (const auto& n : builtin_names()) std::cout << n << "\n";
      return 0;
    }
    if (*show_cmd) {
      std::cout << builtin_scenario(show_name);
      return 0;
    }
    if (*run_cmd) {
      std::vector<std::string> warnings;
      std::string text = scenario_arg.rfind("builtin:", 0) == 0 ? builtin_scenario(scenario_arg.substr(8))
                                                                 : read_file(scenario_arg);
      Scenario s = parse_scenario(text, {lenient}, &warnings);
      for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
      for (const auto& o : overrides) apply_override(s, o);
      if (seed) s.seed = *seed;
      if (ticks) s.total_ticks = *ticks;
      if (no_controller) s.controller_enabled = false;
      s.validate();
      const Report rep = run(s);
      if (out_dir.empty())
        print_summary(rep);
      else
        write_report(rep, out_dir);
      return 0;
    }
    if (*sweep_cmd) {
      const auto members = builtin_family(sweep_name);
      const auto results = serial ? run_sweep_serial(members) : run_sweep_parallel(members, threads);
      fs::create_directories(sweep_out);
      for (std::size_t i = 0; i < results.size(); ++i) write_report(results[i], fs::path(sweep_out) / members[i].label);
      std::ofstream idx(fs::path(sweep_out) / "members.csv");
      idx << "label\n";
      for (const auto& m : members) idx << m.label << "\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const SimulationError& e) {
    std::cerr << "simulation error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
