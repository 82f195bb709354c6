#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <unordered_map>
#include <vector>

namespace a4sim {

using WayIndex = std::uint32_t;
using ClassId = std::uint32_t;
using DeviceIndex = std::uint32_t;
using CoreIndex = std::uint32_t;

inline constexpr DeviceIndex kNoDevice = 0xFFFFFFFFu;

struct LineAddr {
  std::uint64_t value = 0;
  friend constexpr auto operator<=>(const LineAddr&, const LineAddr&) = default;
};

/// Contiguous inclusive way range [lo, hi]. CAT only accepts contiguous masks,
/// so nothing else is representable.
struct WayMask {
  WayIndex lo = 0;
  WayIndex hi = 0;

  constexpr std::uint32_t width() const { return hi - lo + 1; }
  constexpr bool contains(WayIndex w) const { return w >= lo && w <= hi; }
  constexpr bool overlaps(const WayMask& o) const { return lo <= o.hi && o.lo <= hi; }
  friend constexpr bool operator==(const WayMask&, const WayMask&) = default;
};

std::ostream& operator<<(std::ostream& os, const WayMask& m);

struct CacheGeometry {
  std::uint32_t llc_sets = 2048;
  std::uint32_t llc_ways = 11;
  std::uint32_t dca_way_count = 2;        // leftmost ways
  std::uint32_t inclusive_way_count = 2;  // rightmost ways
  std::uint32_t line_bytes = 64;
  std::uint32_t mlc_sets = 128;
  std::uint32_t mlc_ways = 8;
  std::uint32_t core_count = 16;

  /// Throws ConfigError on any invariant violation.
  void validate() const;

  WayMask full_mask() const { return {0, llc_ways - 1}; }
  WayMask dca_ways() const { return {0, dca_way_count - 1}; }
  WayMask inclusive_ways() const { return {llc_ways - inclusive_way_count, llc_ways - 1}; }
  WayMask standard_ways() const { return {dca_way_count, llc_ways - inclusive_way_count - 1}; }
  bool is_dca_way(WayIndex w) const { return w < dca_way_count; }
  bool is_inclusive_way(WayIndex w) const { return w >= llc_ways - inclusive_way_count; }

  std::uint32_t llc_set_of(LineAddr a) const { return static_cast<std::uint32_t>(a.value % llc_sets); }
  std::uint32_t mlc_set_of(LineAddr a) const { return static_cast<std::uint32_t>(a.value % mlc_sets); }

  friend bool operator==(const CacheGeometry&, const CacheGeometry&) = default;
};

/// Throws ConfigError unless `m` is a non-empty contiguous range inside `g`.
void validate_mask(const CacheGeometry& g, const WayMask& m);

enum class LlcState : std::uint8_t { Absent, Exclusive, Inclusive };
enum class AccessKind : std::uint8_t { Read, Write };
enum class AccessLevel : std::uint8_t { MlcHit, LlcHit, Memory };
enum class EvictDest : std::uint8_t { Llc, Memory, Dropped };
enum class DmaWriteKind : std::uint8_t { UpdateInPlace, AllocateDca, MemoryWrite };
enum class DmaReadKind : std::uint8_t { ReadFromLlc, ReadAllocatedInclusive, ReadFromMemory };

struct Eviction {
  LineAddr addr;
  EvictDest dest = EvictDest::Dropped;
  friend bool operator==(const Eviction&, const Eviction&) = default;
};

/// Fixed-capacity eviction list; one model operation evicts at most three lines.
class EvictionList {
 public:
  void push(Eviction e) { items_[size_++] = e; }
  std::span<const Eviction> view() const { return {items_.data(), size_}; }
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

 private:
  std::array<Eviction, 4> items_{};
  std::size_t size_ = 0;
};

struct LeakEvent {
  LineAddr addr;
  DeviceIndex device = kNoDevice;  // device that wrote the leaked line
  friend bool operator==(const LeakEvent&, const LeakEvent&) = default;
};

struct AccessOutcome {
  AccessLevel level = AccessLevel::Memory;
  bool migrated_to_inclusive = false;
  std::optional<WayIndex> migration_way;   // inclusive way the line moved into
  std::optional<WayIndex> llc_way_filled;  // way that received the MLC victim fill
  EvictionList evicted;
  std::optional<LeakEvent> leak;  // an unconsumed I/O line was displaced
};

struct DmaWriteOutcome {
  DmaWriteKind kind = DmaWriteKind::MemoryWrite;
  std::optional<WayIndex> way;
  EvictionList evicted;
  std::optional<LeakEvent> leak;
};

struct DmaReadOutcome {
  DmaReadKind kind = DmaReadKind::ReadFromMemory;
  std::optional<WayIndex> way;
  EvictionList evicted;
  std::optional<LeakEvent> leak;
};

/// Read-only view of one resident LLC line.
struct LineMeta {
  LineAddr addr;
  ClassId owner_class = 0;
  std::optional<DeviceIndex> io_origin;
  bool dirty = false;
  bool consumed = false;
  LlcState llc_state = LlcState::Absent;
  WayIndex way = 0;
};

struct DeviceCounters {
  std::uint64_t dma_lines_written = 0;
  std::uint64_t dma_updates = 0;
  std::uint64_t dma_allocations = 0;
  std::uint64_t dma_memory_writes = 0;
  std::uint64_t leak_events = 0;  // lines written by this device evicted unconsumed
  std::uint64_t dma_lines_read = 0;
};

struct ModelCounters {
  std::uint64_t memory_read_lines = 0;
  std::uint64_t memory_write_lines = 0;
  std::uint64_t inclusive_migrations = 0;
  std::uint64_t victim_fills = 0;
  std::uint64_t bloat_fills = 0;
  // DMA line-instance accounting: every instance placed in the LLC ends up
  // consumed, leaked, overwritten before use, or still pending.
  std::uint64_t dca_instances = 0;
  std::uint64_t consumed_from_cache = 0;
  std::uint64_t leaked_instances = 0;
  std::uint64_t overwritten_instances = 0;
  std::vector<DeviceCounters> devices;
};

struct ModelOptions {
  /// When off, an LLC hit on a non-I/O line outside the inclusive ways hands
  /// the line to the MLC and drops it from the LLC instead of migrating it.
  bool migrate_non_io = false;
  /// Re-check structural invariants after every operation (slow; tests).
  bool paranoid = false;
  friend bool operator==(const ModelOptions&, const ModelOptions&) = default;
};

/// Non-inclusive LLC with DCA ways and directory-coupled inclusive ways,
/// plus private per-core MLCs. Single-threaded; one logical owner at a time.
class CacheModel {
 public:
  explicit CacheModel(const CacheGeometry& geometry, ModelOptions options = {});

  const CacheGeometry& geometry() const { return geometry_; }
  const ModelOptions& options() const { return options_; }

  /// Registers a DMA-capable device; lines it allocates are owned by `owner_class`.
  DeviceIndex add_device(ClassId owner_class);
  std::size_t device_count() const { return device_owner_.size(); }

  void set_way_mask(ClassId class_id, WayMask mask);
  WayMask way_mask(ClassId class_id) const;

  AccessOutcome cpu_access(CoreIndex core, LineAddr addr, AccessKind kind, ClassId class_id);
  DmaWriteOutcome dma_write_line(DeviceIndex device, LineAddr addr, bool dca_enabled);
  DmaReadOutcome dma_read_line(DeviceIndex device, LineAddr addr);

  /// Invalid frame with the lowest index in `allowed`, else the LRU frame.
  WayIndex select_victim(std::uint32_t set, WayMask allowed) const;

  const ModelCounters& counters() const { return counters_; }

  std::optional<LineMeta> llc_lookup(LineAddr addr) const;
  /// Core whose MLC holds `addr`, if any.
  std::optional<CoreIndex> mlc_holder(LineAddr addr) const;
  std::size_t llc_valid_lines() const;
  /// Unconsumed I/O lines currently resident in the LLC.
  std::uint64_t pending_io_lines() const;

  /// Throws SimulationError when inclusive residency or bookkeeping is broken.
  void check_invariants() const;

  /// `set,way,addr,state,owner,io_origin,consumed,dirty` per resident LLC line.
  void dump_llc(std::ostream& os) const;

 private:
  struct LlcFrame {
    std::uint64_t addr = 0;
    std::uint64_t stamp = 0;
    ClassId owner = 0;
    DeviceIndex io = kNoDevice;
    std::int32_t holder = -1;  // core whose MLC also holds the line
    bool valid = false;
    bool dirty = false;
    bool consumed = false;
  };
  struct MlcFrame {
    std::uint64_t addr = 0;
    std::uint64_t stamp = 0;
    ClassId owner = 0;
    DeviceIndex io = kNoDevice;
    bool valid = false;
    bool dirty = false;
    bool consumed = false;
  };

  LlcFrame* llc_frame(std::uint32_t set, WayIndex way) { return &llc_[std::size_t{set} * geometry_.llc_ways + way]; }
  const LlcFrame* llc_frame(std::uint32_t set, WayIndex way) const {
    return &llc_[std::size_t{set} * geometry_.llc_ways + way];
  }
  std::optional<WayIndex> llc_find(std::uint32_t set, std::uint64_t addr) const;
  MlcFrame* mlc_find(CoreIndex core, std::uint64_t addr);
  std::optional<CoreIndex> mlc_find_any(std::uint64_t addr) const;
  std::size_t mlc_index(CoreIndex core, std::uint32_t set) const {
    return (std::size_t{set} * geometry_.core_count + core) * geometry_.mlc_ways;
  }
  MlcFrame* mlc_set_begin(CoreIndex core, std::uint32_t set) { return &mlc_[mlc_index(core, set)]; }
  void mlc_clear(MlcFrame* f);

  void evict_llc(std::uint32_t set, WayIndex way, EvictionList& evicted, std::optional<LeakEvent>& leak);
  void mlc_install(CoreIndex core, const MlcFrame& line, AccessOutcome& out);
  void victim_fill(CoreIndex core, const MlcFrame& victim, AccessOutcome& out);
  void check_device(DeviceIndex device) const;
  void after_op() const {
    if (options_.paranoid) check_invariants();
  }

  CacheGeometry geometry_;
  ModelOptions options_;
  std::vector<LlcFrame> llc_;
  std::vector<MlcFrame> mlc_;
  std::vector<std::uint64_t> mlc_tags_;  // addr + 1 per MLC frame, 0 when invalid
  std::vector<WayMask> class_masks_;
  std::vector<ClassId> device_owner_;
  // DMA-written lines currently living only in memory, by writing device.
  std::unordered_map<std::uint64_t, DeviceIndex> memory_io_;
  std::uint64_t clock_ = 0;
  ModelCounters counters_;
};

}  // namespace a4sim
