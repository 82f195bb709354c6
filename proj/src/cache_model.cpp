#include "a4sim/cache_model.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <string>

#include "a4sim/error.hpp"

namespace a4sim {

std::ostream& operator<<(std::ostream& os, const WayMask& m) { return os << '[' << m.lo << ',' << m.hi << ']'; }

void CacheGeometry::validate() const {
  if (llc_sets == 0 || llc_ways == 0 || mlc_sets == 0 || mlc_ways == 0 || core_count == 0)
    throw ConfigError("cache counts must be positive");
  if (dca_way_count == 0 || inclusive_way_count == 0)
    throw ConfigError("dca_ways and inclusive_ways must be positive");
  if (dca_way_count + inclusive_way_count >= llc_ways)
    throw ConfigError("dca_ways + inclusive_ways must leave at least one standard way (ways = " +
                      std::to_string(llc_ways) + ")");
  if (line_bytes == 0 || !std::has_single_bit(line_bytes)) throw ConfigError("line_bytes must be a power of two");
  if (core_count > 1024) throw ConfigError("core_count above 1024 is not supported");
}

void validate_mask(const CacheGeometry& g, const WayMask& m) {
  if (m.lo > m.hi || m.hi >= g.llc_ways)
    throw ConfigError("way mask [" + std::to_string(m.lo) + "," + std::to_string(m.hi) +
                      "] is empty or outside 0.." + std::to_string(g.llc_ways - 1));
}

CacheModel::CacheModel(const CacheGeometry& geometry, ModelOptions options)
    : geometry_(geometry), options_(options) {
  geometry_.validate();
  llc_.resize(std::size_t{geometry_.llc_sets} * geometry_.llc_ways);
  mlc_.resize(std::size_t{geometry_.core_count} * geometry_.mlc_sets * geometry_.mlc_ways);
  mlc_tags_.assign(mlc_.size(), 0);
}

DeviceIndex CacheModel::add_device(ClassId owner_class) {
  device_owner_.push_back(owner_class);
  counters_.devices.emplace_back();
  return static_cast<DeviceIndex>(device_owner_.size() - 1);
}

void CacheModel::check_device(DeviceIndex device) const {
  if (device >= device_owner_.size()) throw ConfigError("unknown device index " + std::to_string(device));
}

void CacheModel::set_way_mask(ClassId class_id, WayMask mask) {
  validate_mask(geometry_, mask);
  if (class_id >= class_masks_.size()) class_masks_.resize(class_id + 1, geometry_.full_mask());
  class_masks_[class_id] = mask;
}

WayMask CacheModel::way_mask(ClassId class_id) const {
  return class_id < class_masks_.size() ? class_masks_[class_id] : geometry_.full_mask();
}

std::optional<WayIndex> CacheModel::llc_find(std::uint32_t set, std::uint64_t addr) const {
  const LlcFrame* f = llc_frame(set, 0);
  for (WayIndex w = 0; w < geometry_.llc_ways; ++w)
    if (f[w].valid && f[w].addr == addr) return w;
  return std::nullopt;
}

CacheModel::MlcFrame* CacheModel::mlc_find(CoreIndex core, std::uint64_t addr) {
  const std::size_t base = mlc_index(core, static_cast<std::uint32_t>(addr % geometry_.mlc_sets));
  const std::uint64_t* t = &mlc_tags_[base];
  for (std::uint32_t w = 0; w < geometry_.mlc_ways; ++w)
    if (t[w] == addr + 1) return &mlc_[base + w];
  return nullptr;
}

std::optional<CoreIndex> CacheModel::mlc_find_any(std::uint64_t addr) const {
  const std::size_t base = mlc_index(0, static_cast<std::uint32_t>(addr % geometry_.mlc_sets));
  const std::uint64_t* t = &mlc_tags_[base];
  const std::size_t n = std::size_t{geometry_.core_count} * geometry_.mlc_ways;
  for (std::size_t i = 0; i < n; ++i)
    if (t[i] == addr + 1) return static_cast<CoreIndex>(i / geometry_.mlc_ways);
  return std::nullopt;
}

void CacheModel::mlc_clear(MlcFrame* f) {
  *f = MlcFrame{};
  mlc_tags_[static_cast<std::size_t>(f - mlc_.data())] = 0;
}

WayIndex CacheModel::select_victim(std::uint32_t set, WayMask allowed) const {
  const LlcFrame* f = llc_frame(set, 0);
  WayIndex best = allowed.lo;
  std::uint64_t best_stamp = std::numeric_limits<std::uint64_t>::max();
  for (WayIndex w = allowed.lo; w <= allowed.hi; ++w) {
    if (!f[w].valid) return w;
    if (f[w].stamp < best_stamp) {
      best_stamp = f[w].stamp;
      best = w;
    }
  }
  return best;
}

void CacheModel::evict_llc(std::uint32_t set, WayIndex way, EvictionList& evicted, std::optional<LeakEvent>& leak) {
  LlcFrame& f = *llc_frame(set, way);
  if (!f.valid) return;
  EvictDest dest = EvictDest::Dropped;
  if (f.holder >= 0) {
    // The MLC copy stays tracked by the extended directory; it inherits the dirty data.
    if (MlcFrame* m = mlc_find(static_cast<CoreIndex>(f.holder), f.addr)) m->dirty = m->dirty || f.dirty;
  } else if (f.dirty) {
    dest = EvictDest::Memory;
    ++counters_.memory_write_lines;
  }
  if (f.io != kNoDevice && !f.consumed) {
    leak = LeakEvent{LineAddr{f.addr}, f.io};
    ++counters_.devices[f.io].leak_events;
    ++counters_.leaked_instances;
    memory_io_[f.addr] = f.io;
  }
  evicted.push({LineAddr{f.addr}, dest});
  f = LlcFrame{};
}

void CacheModel::victim_fill(CoreIndex core, const MlcFrame& victim, AccessOutcome& out) {
  const auto set = geometry_.llc_set_of(LineAddr{victim.addr});
  if (auto w = llc_find(set, victim.addr)) {
    // Already LLC-inclusive: the LLC copy simply loses its MLC sharer.
    LlcFrame& f = *llc_frame(set, *w);
    f.holder = -1;
    f.dirty = f.dirty || victim.dirty;
    out.evicted.push({LineAddr{victim.addr}, EvictDest::Llc});
    return;
  }
  (void)core;
  const WayIndex way = select_victim(set, way_mask(victim.owner));
  evict_llc(set, way, out.evicted, out.leak);
  LlcFrame& f = *llc_frame(set, way);
  f.valid = true;
  f.addr = victim.addr;
  f.owner = victim.owner;
  f.io = victim.io;
  f.dirty = victim.dirty;
  f.consumed = victim.consumed;
  f.holder = -1;
  f.stamp = ++clock_;
  ++counters_.victim_fills;
  if (victim.io != kNoDevice && victim.consumed) ++counters_.bloat_fills;
  out.llc_way_filled = way;
  out.evicted.push({LineAddr{victim.addr}, EvictDest::Llc});
}

void CacheModel::mlc_install(CoreIndex core, const MlcFrame& line, AccessOutcome& out) {
  MlcFrame* f = mlc_set_begin(core, static_cast<std::uint32_t>(line.addr % geometry_.mlc_sets));
  std::uint32_t slot = 0;
  std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
  bool found_invalid = false;
  for (std::uint32_t w = 0; w < geometry_.mlc_ways; ++w) {
    if (!f[w].valid) {
      slot = w;
      found_invalid = true;
      break;
    }
    if (f[w].stamp < best) {
      best = f[w].stamp;
      slot = w;
    }
  }
  const MlcFrame victim = f[slot];
  f[slot] = line;
  f[slot].valid = true;
  mlc_tags_[static_cast<std::size_t>(&f[slot] - mlc_.data())] = line.addr + 1;
  f[slot].stamp = ++clock_;
  if (!found_invalid) victim_fill(core, victim, out);
}

AccessOutcome CacheModel::cpu_access(CoreIndex core, LineAddr addr, AccessKind kind, ClassId class_id) {
  if (core >= geometry_.core_count) throw ConfigError("core index " + std::to_string(core) + " out of range");
  AccessOutcome out;
  const bool write = kind == AccessKind::Write;

  if (MlcFrame* hit = mlc_find(core, addr.value)) {
    hit->stamp = ++clock_;
    hit->dirty = hit->dirty || write;
    out.level = AccessLevel::MlcHit;
    after_op();
    return out;
  }

  const auto set = geometry_.llc_set_of(addr);
  MlcFrame line;
  line.addr = addr.value;
  line.owner = class_id;

  if (auto other = mlc_find_any(addr.value)) {
    // On-chip transfer from another core's MLC; ownership moves with the data.
    MlcFrame* src = mlc_find(*other, addr.value);
    line.io = src->io;
    line.dirty = src->dirty;
    line.consumed = true;
    mlc_clear(src);
    out.level = AccessLevel::LlcHit;
    if (auto w = llc_find(set, addr.value)) llc_frame(set, *w)->holder = static_cast<std::int32_t>(core);
    mlc_install(core, line, out);
  } else if (auto w = llc_find(set, addr.value)) {
    out.level = AccessLevel::LlcHit;
    LlcFrame& f = *llc_frame(set, *w);
    const bool io = f.io != kNoDevice;
    if (io && !f.consumed) ++counters_.consumed_from_cache;
    if (io) f.consumed = true;
    line.io = f.io;
    line.consumed = f.consumed;
    if (geometry_.is_inclusive_way(*w)) {
      f.holder = static_cast<std::int32_t>(core);
      f.stamp = ++clock_;
    } else if (io || options_.migrate_non_io) {
      LlcFrame moved = f;
      f = LlcFrame{};
      const WayIndex target = select_victim(set, geometry_.inclusive_ways());
      evict_llc(set, target, out.evicted, out.leak);
      LlcFrame& dst = *llc_frame(set, target);
      dst = moved;
      dst.holder = static_cast<std::int32_t>(core);
      dst.stamp = ++clock_;
      out.migrated_to_inclusive = true;
      out.migration_way = target;
      ++counters_.inclusive_migrations;
    } else {
      // LLC-exclusive hand-off: the MLC takes the line and its dirty state.
      line.dirty = f.dirty;
      f = LlcFrame{};
    }
    if (write) line.dirty = true;
    mlc_install(core, line, out);
  } else {
    out.level = AccessLevel::Memory;
    ++counters_.memory_read_lines;
    if (auto it = memory_io_.find(addr.value); it != memory_io_.end()) {
      line.io = it->second;
      line.consumed = true;
      memory_io_.erase(it);
    }
    line.dirty = write;
    mlc_install(core, line, out);
  }
  if (write) {
    if (MlcFrame* m = mlc_find(core, addr.value)) m->dirty = true;
  }
  after_op();
  return out;
}

DmaWriteOutcome CacheModel::dma_write_line(DeviceIndex device, LineAddr addr, bool dca_enabled) {
  check_device(device);
  DmaWriteOutcome out;
  DeviceCounters& dc = counters_.devices[device];
  ++dc.dma_lines_written;

  // The device overwrites the whole line: private copies are invalidated.
  if (auto holder = mlc_find_any(addr.value)) mlc_clear(mlc_find(*holder, addr.value));

  const auto set = geometry_.llc_set_of(addr);
  const auto w = llc_find(set, addr.value);
  if (w) {
    LlcFrame& f = *llc_frame(set, *w);
    f.holder = -1;
    if (f.io != kNoDevice && !f.consumed) ++counters_.overwritten_instances;
  }

  if (dca_enabled) {
    memory_io_.erase(addr.value);
    if (w) {
      LlcFrame& f = *llc_frame(set, *w);
      f.dirty = true;
      f.consumed = false;
      f.io = device;
      f.stamp = ++clock_;
      out.kind = DmaWriteKind::UpdateInPlace;
      out.way = *w;
      ++dc.dma_updates;
    } else {
      const WayIndex way = select_victim(set, geometry_.dca_ways());
      evict_llc(set, way, out.evicted, out.leak);
      LlcFrame& f = *llc_frame(set, way);
      f.valid = true;
      f.addr = addr.value;
      f.owner = device_owner_[device];
      f.io = device;
      f.dirty = true;
      f.consumed = false;
      f.holder = -1;
      f.stamp = ++clock_;
      out.kind = DmaWriteKind::AllocateDca;
      out.way = way;
      ++dc.dma_allocations;
    }
    ++counters_.dca_instances;
  } else {
    if (w) *llc_frame(set, *w) = LlcFrame{};
    memory_io_[addr.value] = device;
    ++counters_.memory_write_lines;
    ++dc.dma_memory_writes;
    out.kind = DmaWriteKind::MemoryWrite;
  }
  after_op();
  return out;
}

DmaReadOutcome CacheModel::dma_read_line(DeviceIndex device, LineAddr addr) {
  check_device(device);
  DmaReadOutcome out;
  ++counters_.devices[device].dma_lines_read;
  const auto set = geometry_.llc_set_of(addr);
  if (auto w = llc_find(set, addr.value)) {
    llc_frame(set, *w)->stamp = ++clock_;
    out.kind = DmaReadKind::ReadFromLlc;
    out.way = *w;
  } else if (auto holder = mlc_find_any(addr.value)) {
    const MlcFrame src = *mlc_find(*holder, addr.value);
    const WayIndex way = select_victim(set, geometry_.inclusive_ways());
    evict_llc(set, way, out.evicted, out.leak);
    LlcFrame& f = *llc_frame(set, way);
    f.valid = true;
    f.addr = src.addr;
    f.owner = src.owner;
    f.io = src.io;
    f.consumed = src.consumed;
    f.dirty = false;
    f.holder = static_cast<std::int32_t>(*holder);
    f.stamp = ++clock_;
    out.kind = DmaReadKind::ReadAllocatedInclusive;
    out.way = way;
  } else {
    ++counters_.memory_read_lines;
    out.kind = DmaReadKind::ReadFromMemory;
  }
  after_op();
  return out;
}

std::optional<LineMeta> CacheModel::llc_lookup(LineAddr addr) const {
  const auto set = geometry_.llc_set_of(addr);
  auto w = llc_find(set, addr.value);
  if (!w) return std::nullopt;
  const LlcFrame& f = *llc_frame(set, *w);
  LineMeta m;
  m.addr = addr;
  m.owner_class = f.owner;
  if (f.io != kNoDevice) m.io_origin = f.io;
  m.dirty = f.dirty;
  m.consumed = f.consumed;
  m.llc_state = f.holder >= 0 ? LlcState::Inclusive : LlcState::Exclusive;
  m.way = *w;
  return m;
}

std::optional<CoreIndex> CacheModel::mlc_holder(LineAddr addr) const { return mlc_find_any(addr.value); }

std::size_t CacheModel::llc_valid_lines() const {
  return static_cast<std::size_t>(std::count_if(llc_.begin(), llc_.end(), [](const LlcFrame& f) { return f.valid; }));
}

std::uint64_t CacheModel::pending_io_lines() const {
  return static_cast<std::uint64_t>(std::count_if(
      llc_.begin(), llc_.end(), [](const LlcFrame& f) { return f.valid && f.io != kNoDevice && !f.consumed; }));
}

void CacheModel::check_invariants() const {
  for (std::uint32_t s = 0; s < geometry_.llc_sets; ++s) {
    for (WayIndex w = 0; w < geometry_.llc_ways; ++w) {
      const LlcFrame& f = *llc_frame(s, w);
      if (!f.valid) continue;
      if (geometry_.llc_set_of(LineAddr{f.addr}) != s) throw SimulationError("LLC line in wrong set");
      for (WayIndex o = w + 1; o < geometry_.llc_ways; ++o) {
        const LlcFrame& g = *llc_frame(s, o);
        if (g.valid && g.addr == f.addr) throw SimulationError("duplicate LLC line");
      }
      const auto holder = mlc_find_any(f.addr);
      if (holder && !geometry_.is_inclusive_way(w))
        throw SimulationError("line cached in an MLC resides in non-inclusive way " + std::to_string(w));
      if (holder.has_value() != (f.holder >= 0) || (holder && static_cast<std::int32_t>(*holder) != f.holder))
        throw SimulationError("LLC sharer bookkeeping out of sync for line " + std::to_string(f.addr));
    }
  }
  // A line lives in at most one MLC.
  for (CoreIndex c = 0; c < geometry_.core_count; ++c) {
    for (std::uint32_t s = 0; s < geometry_.mlc_sets; ++s) {
      const MlcFrame* f = &mlc_[(std::size_t{s} * geometry_.core_count + c) * geometry_.mlc_ways];
      for (std::uint32_t w = 0; w < geometry_.mlc_ways; ++w) {
        if (!f[w].valid) continue;
        for (CoreIndex o = c + 1; o < geometry_.core_count; ++o) {
          const MlcFrame* g = &mlc_[(std::size_t{s} * geometry_.core_count + o) * geometry_.mlc_ways];
          for (std::uint32_t v = 0; v < geometry_.mlc_ways; ++v)
            if (g[v].valid && g[v].addr == f[w].addr) throw SimulationError("line present in two MLCs");
        }
      }
    }
  }
}

void CacheModel::dump_llc(std::ostream& os) const {
  for (std::uint32_t s = 0; s < geometry_.llc_sets; ++s) {
    for (WayIndex w = 0; w < geometry_.llc_ways; ++w) {
      const LlcFrame& f = *llc_frame(s, w);
      if (!f.valid) continue;
      os << s << ',' << w << ',' << f.addr << ',' << (f.holder >= 0 ? 'I' : 'E') << ',' << f.owner << ',';
      if (f.io != kNoDevice)
        os << f.io;
      else
        os << -1;
      os << ',' << (f.consumed ? 1 : 0) << ',' << (f.dirty ? 1 : 0) << '\n';
    }
  }
}

}  // namespace a4sim
