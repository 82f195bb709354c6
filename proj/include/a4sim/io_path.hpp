#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "a4sim/cache_model.hpp"

namespace a4sim {

enum class DeviceKind : std::uint8_t { Network, Storage };

const char* to_string(DeviceKind k);

struct DeviceSpec {
  std::string id;
  DeviceKind kind = DeviceKind::Network;
  std::uint32_t lines_per_epoch = 0;  // hard per-epoch ingress budget
  bool dca_enabled = true;
  friend bool operator==(const DeviceSpec&, const DeviceSpec&) = default;
};

struct DmaBatch {
  DeviceIndex device = 0;
  std::vector<LineAddr> addrs;
  std::uint64_t epoch_issued = 0;
};

/// Aggregate of one issue_dma call.
struct DmaResult {
  std::uint64_t updates = 0;
  std::uint64_t allocations = 0;
  std::uint64_t memory_writes = 0;
  std::vector<LeakEvent> leaks;
};

/// Runtime device registry. Index i here is device index i in the model.
class DeviceTable {
 public:
  /// Registers `spec` with the model; DMA-allocated lines belong to `owner_class`.
  DeviceIndex add(const DeviceSpec& spec, CacheModel& model, ClassId owner_class);

  std::size_t size() const { return devices_.size(); }
  const DeviceSpec& spec(DeviceIndex d) const;
  DeviceIndex find(const std::string& id) const;  // throws ConfigError

  void set_dca_enabled(DeviceIndex d, bool on);
  bool dca_enabled(DeviceIndex d) const { return spec(d).dca_enabled; }

  /// Lines still issuable by `d` in `epoch`.
  std::uint32_t budget_left(DeviceIndex d, std::uint64_t epoch) const;

  /// Applies dma_write_line per address in order with the device's current
  /// DCA flag. Throws SimulationError when the batch breaks the pacing budget.
  DmaResult issue_dma(const DmaBatch& batch, CacheModel& model);

 private:
  struct State {
    DeviceSpec spec;
    std::uint64_t epoch = ~std::uint64_t{0};
    std::uint32_t issued = 0;
  };
  State& state(DeviceIndex d);
  std::vector<State> devices_;
};

}  // namespace a4sim
