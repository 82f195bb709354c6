#pragma once

#include <string>
#include <vector>

#include "a4sim/sweep.hpp"

namespace a4sim {

std::vector<std::string> builtin_names();

/// Base scenario text of a builtin experiment. Throws ConfigError for unknown names.
std::string builtin_scenario(const std::string& name);

/// Every run the experiment needs, derived from the base scenario.
std::vector<SweepMember> builtin_family(const std::string& name);

}  // namespace a4sim
