#include "a4sim/workloads.hpp"

#include <algorithm>

#include "a4sim/error.hpp"

namespace a4sim {

const char* to_string(WorkloadKind k) {
  switch (k) {
    case WorkloadKind::NetRx: return "net_rx";
    case WorkloadKind::StorageStream: return "storage_stream";
    case WorkloadKind::MemStream: return "mem_stream";
  }
  return "?";
}

const char* to_string(Priority p) { return p == Priority::High ? "high" : "low"; }

void WorkloadCounters::record(AccessLevel level) {
  ++accesses;
  switch (level) {
    case AccessLevel::MlcHit: ++mlc_hits; break;
    case AccessLevel::LlcHit:
      ++mlc_misses;
      ++llc_hits;
      break;
    case AccessLevel::Memory:
      ++mlc_misses;
      ++llc_misses;
      break;
  }
}

void Workload::produce_dma(std::uint64_t, std::uint32_t, std::vector<LineAddr>&) {}

std::uint32_t net_desc_lines(const NetRxParams& p, std::uint32_t line_bytes) {
  const std::uint64_t bytes = std::uint64_t{p.ring_entries} * p.desc_bytes;
  return static_cast<std::uint32_t>((bytes + line_bytes - 1) / line_bytes);
}

std::unique_ptr<Workload> make_workload(const WorkloadSpec& spec, const WorkloadContext& ctx) {
  if (spec.cores.empty()) throw ConfigError("workload '" + spec.id + "' has no cores");
  switch (spec.kind) {
    case WorkloadKind::NetRx: return std::make_unique<NetRxWorkload>(spec, ctx);
    case WorkloadKind::StorageStream: return std::make_unique<StorageStreamWorkload>(spec, ctx);
    case WorkloadKind::MemStream: return std::make_unique<MemStreamWorkload>(spec, ctx);
  }
  throw ConfigError("bad workload kind");
}

// ---- net_rx ---------------------------------------------------------------

NetRxWorkload::NetRxWorkload(const WorkloadSpec& spec, const WorkloadContext& ctx)
    : cores_(spec.cores), p_(spec.net), ctx_(ctx) {
  if (p_.ring_entries == 0 || p_.lines_per_packet == 0 || p_.desc_bytes == 0)
    throw ConfigError("workload '" + spec.id + "': ring_entries, lines_per_packet and desc_bytes must be positive");
  desc_lines_ = net_desc_lines(p_, ctx.line_bytes);
  ppe_ = p_.packets_per_epoch;
  if (ppe_ == 0) {
    const std::uint32_t pkts = ctx.device_lines_per_epoch / (p_.lines_per_packet + 1);
    ppe_ = static_cast<std::uint32_t>((pkts + cores_.size() - 1) / cores_.size()) + 1;
  }
  queues_.resize(cores_.size());
  next_slot_.assign(cores_.size(), 0);
}

std::uint64_t NetRxWorkload::footprint_lines() const {
  return cores_.size() * (std::uint64_t{desc_lines_} + std::uint64_t{p_.ring_entries} * p_.lines_per_packet);
}

LineAddr NetRxWorkload::desc_line(std::size_t core, std::uint32_t slot) const {
  const std::uint64_t per_core = desc_lines_ + std::uint64_t{p_.ring_entries} * p_.lines_per_packet;
  return LineAddr{ctx_.base.value + core * per_core + std::uint64_t{slot} * p_.desc_bytes / ctx_.line_bytes};
}

LineAddr NetRxWorkload::payload_line(std::size_t core, std::uint32_t slot, std::uint32_t i) const {
  const std::uint64_t per_core = desc_lines_ + std::uint64_t{p_.ring_entries} * p_.lines_per_packet;
  return LineAddr{ctx_.base.value + core * per_core + desc_lines_ + std::uint64_t{slot} * p_.lines_per_packet + i};
}

void NetRxWorkload::produce_dma(std::uint64_t epoch, std::uint32_t budget, std::vector<LineAddr>& out) {
  const std::uint32_t cost = p_.lines_per_packet + 1;
  for (std::uint32_t n = budget / cost; n > 0; --n) {
    const std::size_t core = rr_;
    rr_ = (rr_ + 1) % cores_.size();
    auto& q = queues_[core];
    if (q.size() >= p_.ring_entries) {
      ++dropped_pending_;
      continue;
    }
    const std::uint32_t slot = next_slot_[core];
    next_slot_[core] = (slot + 1) % p_.ring_entries;
    for (std::uint32_t i = 0; i < p_.lines_per_packet; ++i) out.push_back(payload_line(core, slot, i));
    out.push_back(desc_line(core, slot));  // descriptor write-back follows the payload
    q.push_back({slot, epoch});
  }
}

void NetRxWorkload::cpu_step(std::uint64_t epoch, CacheModel& model, WorkloadCounters& c) {
  c.dropped += dropped_pending_;
  dropped_pending_ = 0;
  for (std::size_t k = 0; k < cores_.size(); ++k) {
    auto& q = queues_[k];
    for (std::uint32_t n = 0; n < ppe_ && !q.empty(); ++n) {
      const Packet pkt = q.front();
      q.pop_front();
      c.record(model.cpu_access(cores_[k], desc_line(k, pkt.slot), AccessKind::Read, ctx_.class_id).level);
      if (p_.touch)
        for (std::uint32_t i = 0; i < p_.lines_per_packet; ++i)
          c.record(model.cpu_access(cores_[k], payload_line(k, pkt.slot, i), AccessKind::Read, ctx_.class_id).level);
      ++c.completed;
      c.ring_wait_epochs += epoch - pkt.epoch;
    }
  }
}

// ---- storage_stream -------------------------------------------------------

StorageStreamWorkload::StorageStreamWorkload(const WorkloadSpec& spec, const WorkloadContext& ctx)
    : cores_(spec.cores), p_(spec.storage), ctx_(ctx) {
  if (p_.block_lines == 0 || p_.queue_depth == 0 || p_.chunk_lines == 0 || p_.process_reads_per_line == 0)
    throw ConfigError("workload '" + spec.id +
                      "': block_lines, queue_depth, chunk_lines and process_reads_per_line must be positive");
  lpe_ = p_.lines_per_epoch;
  if (lpe_ == 0) {
    const std::uint64_t per_core = (ctx.device_lines_per_epoch + cores_.size() - 1) / cores_.size();
    lpe_ = static_cast<std::uint32_t>((per_core * 5 + 3) / 4 + 1);
  }
  free_buffers_.resize(cores_.size());
  ready_.resize(cores_.size());
  if (!p_.fresh_buffers) {
    for (std::size_t k = 0; k < cores_.size(); ++k)
      for (std::uint32_t b = 0; b < p_.queue_depth; ++b) {
        free_buffers_[k].push_back(next_fresh_);
        next_fresh_ += p_.block_lines;
      }
  }
  for (std::uint32_t b = 0; b < p_.queue_depth; ++b)
    for (std::size_t k = 0; k < cores_.size(); ++k) submit(k, 0);
}

void StorageStreamWorkload::submit(std::size_t core, std::uint64_t epoch) {
  std::uint64_t base;
  if (p_.fresh_buffers) {
    base = next_fresh_;
    next_fresh_ += p_.block_lines;
  } else {
    base = free_buffers_[core].front();
    free_buffers_[core].erase(free_buffers_[core].begin());
  }
  inflight_.push_back({base, core, 0, 0, epoch});
}

void StorageStreamWorkload::produce_dma(std::uint64_t epoch, std::uint32_t budget, std::vector<LineAddr>& out) {
  (void)epoch;
  while (budget > 0 && !inflight_.empty()) {
    if (cursor_ >= inflight_.size()) cursor_ = 0;
    Block& b = inflight_[cursor_];
    const std::uint32_t n = std::min({p_.chunk_lines, p_.block_lines - b.arrived, budget});
    for (std::uint32_t i = 0; i < n; ++i) out.push_back(LineAddr{ctx_.base.value + b.base + b.arrived + i});
    b.arrived += n;
    budget -= n;
    if (b.arrived == p_.block_lines) {
      ready_[b.core].push_back(b);
      inflight_.erase(inflight_.begin() + static_cast<std::ptrdiff_t>(cursor_));
    } else {
      ++cursor_;
    }
  }
}

void StorageStreamWorkload::cpu_step(std::uint64_t epoch, CacheModel& model, WorkloadCounters& c) {
  for (std::size_t k = 0; k < cores_.size(); ++k) {
    auto& q = ready_[k];
    std::uint32_t budget = lpe_;
    while (budget > 0 && !q.empty()) {
      Block& b = q.front();
      const LineAddr a{ctx_.base.value + b.base + b.processed};
      for (std::uint32_t r = 0; r < p_.process_reads_per_line; ++r)
        c.record(model.cpu_access(cores_[k], a, AccessKind::Read, ctx_.class_id).level);
      --budget;
      if (++b.processed == p_.block_lines) {
        ++c.completed;
        if (!p_.fresh_buffers) free_buffers_[k].push_back(b.base);
        q.pop_front();
        submit(k, epoch);
      }
    }
  }
}

// ---- mem_stream -----------------------------------------------------------

MemStreamWorkload::MemStreamWorkload(const WorkloadSpec& spec, const WorkloadContext& ctx)
    : cores_(spec.cores), p_(spec.mem), ctx_(ctx) {
  if (p_.working_set_lines == 0) throw ConfigError("workload '" + spec.id + "': working_set_lines must be positive");
  slice_ = std::max<std::uint64_t>(1, p_.working_set_lines / cores_.size());
  cursor_.assign(cores_.size(), 0);
  for (std::size_t k = 0; k < cores_.size(); ++k) {
    std::seed_seq seq{ctx.seed, std::uint64_t{ctx.class_id}, std::uint64_t{k}};
    rng_.emplace_back(seq);
  }
}

void MemStreamWorkload::cpu_step(std::uint64_t, CacheModel& model, WorkloadCounters& c) {
  const AccessKind kind = p_.op == MemOp::Write ? AccessKind::Write : AccessKind::Read;
  for (std::size_t k = 0; k < cores_.size(); ++k) {
    const std::uint64_t base = ctx_.base.value + k * slice_;
    for (std::uint32_t n = 0; n < p_.accesses_per_epoch; ++n) {
      std::uint64_t off;
      if (p_.pattern == Pattern::Sequential) {
        off = cursor_[k];
        cursor_[k] = (cursor_[k] + 1) % slice_;
      } else {
        off = std::uniform_int_distribution<std::uint64_t>(0, slice_ - 1)(rng_[k]);
      }
      c.record(model.cpu_access(cores_[k], LineAddr{base + off}, kind, ctx_.class_id).level);
    }
  }
}

}  // namespace a4sim
