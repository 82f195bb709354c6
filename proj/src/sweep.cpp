#include "a4sim/sweep.hpp"

#include <exception>

#include <omp.h>

namespace a4sim {

std::vector<Report> run_sweep_serial(const std::vector<SweepMember>& members) {
  std::vector<Report> out;
  out.reserve(members.size());
  for (const auto& m : members) out.push_back(run(m.scenario));
  return out;
}

std::vector<Report> run_sweep_parallel(const std::vector<SweepMember>& members, int threads) {
  std::vector<Report> out(members.size());
  std::vector<std::exception_ptr> errors(members.size());
  const int n = static_cast<int>(members.size());
  const int t = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(t)
  for (int i = 0; i < n; ++i) {
    try {
      out[i] = run(members[i].scenario);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  // First failing member in order, so errors match the serial runner.
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace a4sim
