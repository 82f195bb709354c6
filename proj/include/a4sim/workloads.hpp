#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "a4sim/cache_model.hpp"

namespace a4sim {

enum class WorkloadKind : std::uint8_t { NetRx, StorageStream, MemStream };
enum class Priority : std::uint8_t { High, Low };
enum class Pattern : std::uint8_t { Sequential, Random };
enum class MemOp : std::uint8_t { Read, Write };

const char* to_string(WorkloadKind k);
const char* to_string(Priority p);

struct NetRxParams {
  std::uint32_t ring_entries = 2048;  // per core
  std::uint32_t lines_per_packet = 1;
  bool touch = true;
  std::uint32_t desc_bytes = 16;
  std::uint32_t packets_per_epoch = 0;  // per core; 0 = keep pace with the device
  friend bool operator==(const NetRxParams&, const NetRxParams&) = default;
};

struct StorageStreamParams {
  std::uint32_t block_lines = 512;
  std::uint32_t queue_depth = 32;  // per core
  bool fresh_buffers = true;
  std::uint32_t process_reads_per_line = 1;
  std::uint32_t chunk_lines = 8;       // device interleave granule across in-flight blocks
  std::uint32_t lines_per_epoch = 0;   // per-core processing budget; 0 = keep pace
  friend bool operator==(const StorageStreamParams&, const StorageStreamParams&) = default;
};

struct MemStreamParams {
  std::uint64_t working_set_lines = 65536;  // whole workload, split evenly over its cores
  Pattern pattern = Pattern::Sequential;
  MemOp op = MemOp::Read;
  std::uint32_t accesses_per_epoch = 64;  // per core
  friend bool operator==(const MemStreamParams&, const MemStreamParams&) = default;
};

struct WorkloadSpec {
  std::string id;
  WorkloadKind kind = WorkloadKind::MemStream;
  Priority priority = Priority::High;
  std::vector<CoreIndex> cores;
  std::string device;  // empty for mem_stream
  std::optional<WayMask> mask;  // static mask used when the controller is off
  bool active = true;           // false: waits for a launch event
  NetRxParams net;
  StorageStreamParams storage;
  MemStreamParams mem;
  friend bool operator==(const WorkloadSpec&, const WorkloadSpec&) = default;
};

/// Per-workload demand-access tallies plus completed-work accounting.
struct WorkloadCounters {
  std::uint64_t accesses = 0;
  std::uint64_t mlc_hits = 0;
  std::uint64_t mlc_misses = 0;
  std::uint64_t llc_hits = 0;
  std::uint64_t llc_misses = 0;
  std::uint64_t completed = 0;       // packets or blocks
  std::uint64_t ring_wait_epochs = 0;  // summed DMA-to-consume delay of completed packets
  std::uint64_t dropped = 0;         // packets refused by a full ring

  void record(AccessLevel level);
};

struct WorkloadContext {
  LineAddr base;          // start of the workload's private address region
  ClassId class_id = 0;
  std::uint32_t device_lines_per_epoch = 0;
  std::uint32_t line_bytes = 64;
  std::uint64_t seed = 0;
};

class Workload {
 public:
  virtual ~Workload() = default;

  /// Lines the device writes this epoch, at most `budget`. Non-I/O workloads write nothing.
  virtual void produce_dma(std::uint64_t epoch, std::uint32_t budget, std::vector<LineAddr>& out);
  virtual void cpu_step(std::uint64_t epoch, CacheModel& model, WorkloadCounters& c) = 0;

  /// Address lines reserved at `base`; storage reports 0 (unbounded region).
  virtual std::uint64_t footprint_lines() const = 0;
};

/// Number of descriptor lines per core ring.
std::uint32_t net_desc_lines(const NetRxParams& p, std::uint32_t line_bytes);

std::unique_ptr<Workload> make_workload(const WorkloadSpec& spec, const WorkloadContext& ctx);

class NetRxWorkload final : public Workload {
 public:
  NetRxWorkload(const WorkloadSpec& spec, const WorkloadContext& ctx);
  void produce_dma(std::uint64_t epoch, std::uint32_t budget, std::vector<LineAddr>& out) override;
  void cpu_step(std::uint64_t epoch, CacheModel& model, WorkloadCounters& c) override;
  std::uint64_t footprint_lines() const override;

  std::uint32_t packets_per_epoch() const { return ppe_; }

 private:
  struct Packet {
    std::uint32_t slot;
    std::uint64_t epoch;
  };
  LineAddr desc_line(std::size_t core, std::uint32_t slot) const;
  LineAddr payload_line(std::size_t core, std::uint32_t slot, std::uint32_t i) const;

  std::vector<CoreIndex> cores_;
  NetRxParams p_;
  WorkloadContext ctx_;
  std::uint32_t desc_lines_;
  std::uint32_t ppe_;
  std::vector<std::deque<Packet>> queues_;
  std::vector<std::uint32_t> next_slot_;
  std::size_t rr_ = 0;
  std::uint64_t dropped_pending_ = 0;
};

class StorageStreamWorkload final : public Workload {
 public:
  StorageStreamWorkload(const WorkloadSpec& spec, const WorkloadContext& ctx);
  void produce_dma(std::uint64_t epoch, std::uint32_t budget, std::vector<LineAddr>& out) override;
  void cpu_step(std::uint64_t epoch, CacheModel& model, WorkloadCounters& c) override;
  std::uint64_t footprint_lines() const override { return 0; }

  std::uint32_t lines_per_epoch() const { return lpe_; }

 private:
  struct Block {
    std::uint64_t base;
    std::size_t core;
    std::uint32_t arrived = 0;
    std::uint32_t processed = 0;
    std::uint64_t issue_epoch = 0;
  };
  void submit(std::size_t core, std::uint64_t epoch);

  std::vector<CoreIndex> cores_;
  StorageStreamParams p_;
  WorkloadContext ctx_;
  std::uint32_t lpe_;
  std::uint64_t next_fresh_ = 0;
  std::vector<std::vector<std::uint64_t>> free_buffers_;  // per core, reused buffers
  std::deque<Block> inflight_;
  std::size_t cursor_ = 0;
  std::vector<std::deque<Block>> ready_;
};

class MemStreamWorkload final : public Workload {
 public:
  MemStreamWorkload(const WorkloadSpec& spec, const WorkloadContext& ctx);
  void cpu_step(std::uint64_t epoch, CacheModel& model, WorkloadCounters& c) override;
  std::uint64_t footprint_lines() const override { return p_.working_set_lines; }

 private:
  std::vector<CoreIndex> cores_;
  MemStreamParams p_;
  WorkloadContext ctx_;
  std::uint64_t slice_;
  std::vector<std::uint64_t> cursor_;
  std::vector<std::mt19937_64> rng_;
};

}  // namespace a4sim
