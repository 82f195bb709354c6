#pragma once

#include <string>
#include <vector>

#include "a4sim/engine.hpp"

namespace a4sim {

struct SweepMember {
  std::string label;
  Scenario scenario;
};

/// Reference implementation: members run one after another.
std::vector<Report> run_sweep_serial(const std::vector<SweepMember>& members);

/// Members run concurrently (OpenMP); results are in member order and equal
/// to run_sweep_serial. `threads` <= 0 uses the runtime default.
std::vector<Report> run_sweep_parallel(const std::vector<SweepMember>& members, int threads = 0);

}  // namespace a4sim
