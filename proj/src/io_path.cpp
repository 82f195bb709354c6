#include "a4sim/io_path.hpp"

#include "a4sim/error.hpp"

namespace a4sim {

const char* to_string(DeviceKind k) { return k == DeviceKind::Network ? "network" : "storage"; }

DeviceIndex DeviceTable::add(const DeviceSpec& spec, CacheModel& model, ClassId owner_class) {
  for (const auto& s : devices_)
    if (s.spec.id == spec.id) throw ConfigError("duplicate device '" + spec.id + "'");
  const DeviceIndex idx = model.add_device(owner_class);
  if (idx != devices_.size()) throw ConfigError("device table out of step with the cache model");
  devices_.push_back({spec});
  return idx;
}

DeviceTable::State& DeviceTable::state(DeviceIndex d) {
  if (d >= devices_.size()) throw ConfigError("unknown device index " + std::to_string(d));
  return devices_[d];
}

const DeviceSpec& DeviceTable::spec(DeviceIndex d) const {
  if (d >= devices_.size()) throw ConfigError("unknown device index " + std::to_string(d));
  return devices_[d].spec;
}

DeviceIndex DeviceTable::find(const std::string& id) const {
  for (DeviceIndex i = 0; i < devices_.size(); ++i)
    if (devices_[i].spec.id == id) return i;
  throw ConfigError("unknown device '" + id + "'");
}

void DeviceTable::set_dca_enabled(DeviceIndex d, bool on) { state(d).spec.dca_enabled = on; }

std::uint32_t DeviceTable::budget_left(DeviceIndex d, std::uint64_t epoch) const {
  const auto& s = devices_.at(d);
  return s.epoch == epoch ? s.spec.lines_per_epoch - s.issued : s.spec.lines_per_epoch;
}

DmaResult DeviceTable::issue_dma(const DmaBatch& batch, CacheModel& model) {
  State& s = state(batch.device);
  if (s.epoch != batch.epoch_issued) {
    s.epoch = batch.epoch_issued;
    s.issued = 0;
  }
  if (batch.addrs.size() > s.spec.lines_per_epoch - s.issued)
    throw SimulationError("device '" + s.spec.id + "' exceeded its budget of " +
                          std::to_string(s.spec.lines_per_epoch) + " lines in epoch " +
                          std::to_string(batch.epoch_issued));
  s.issued += static_cast<std::uint32_t>(batch.addrs.size());
  DmaResult r;
  for (const LineAddr a : batch.addrs) {
    auto o = model.dma_write_line(batch.device, a, s.spec.dca_enabled);
    switch (o.kind) {
      case DmaWriteKind::UpdateInPlace: ++r.updates; break;
      case DmaWriteKind::AllocateDca: ++r.allocations; break;
      case DmaWriteKind::MemoryWrite: ++r.memory_writes; break;
    }
    if (o.leak) r.leaks.push_back(*o.leak);
  }
  return r;
}

}  // namespace a4sim
