#pragma once

// Brute-force reference for the cache model: per-set recency lists, MLCs as
// LRU-ordered vectors, linear searches everywhere. Slow, but small enough to
// audit by eye.

#include <algorithm>
#include <cstdint>
#include <list>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "a4sim/cache_model.hpp"

namespace reftest {

struct RLine {
  std::uint64_t addr = 0;
  std::uint32_t owner = 0;
  int io = -1;
  int holder = -1;
  bool dirty = false;
  bool consumed = false;
};

struct RMline {
  std::uint64_t addr = 0;
  std::uint32_t owner = 0;
  int io = -1;
  bool dirty = false;
  bool consumed = false;
};

struct REvict {
  std::uint64_t addr;
  int dest;  // 0 llc, 1 memory, 2 dropped
};

struct RResult {
  int level = 2;  // 0 mlc, 1 llc, 2 memory; for DMA: the outcome kind
  bool migrated = false;
  int way_a = -1;  // migration way, or DMA way
  int way_b = -1;  // victim-fill way
  std::vector<REvict> evicted;
  long leak_addr = -1;
  int leak_dev = -1;
};

class ReferenceCache {
 public:
  ReferenceCache(std::uint32_t sets, std::uint32_t ways, std::uint32_t dca, std::uint32_t incl, std::uint32_t msets,
                 std::uint32_t mways, std::uint32_t cores, bool migrate_non_io)
      : sets_(sets), ways_(ways), dca_(dca), incl_(incl), msets_(msets), mways_(mways), migrate_(migrate_non_io) {
    llc_.assign(sets, std::vector<std::optional<RLine>>(ways));
    rec_.assign(sets, {});
    mlc_.assign(cores, std::vector<std::vector<RMline>>(msets));
  }

  int add_device(std::uint32_t owner) {
    dev_owner_.push_back(owner);
    return static_cast<int>(dev_owner_.size()) - 1;
  }

  void set_mask(std::uint32_t cls, std::uint32_t lo, std::uint32_t hi) { masks_[cls] = {lo, hi}; }

  RResult cpu(std::uint32_t core, std::uint64_t a, bool write, std::uint32_t cls) {
    RResult r;
    auto& mine = mlc_[core][a % msets_];
    for (std::size_t i = 0; i < mine.size(); ++i) {
      if (mine[i].addr == a) {
        RMline l = mine[i];
        mine.erase(mine.begin() + static_cast<long>(i));
        if (write) l.dirty = true;
        mine.push_back(l);
        r.level = 0;
        return r;
      }
    }
    const std::uint32_t s = a % sets_;
    RMline nl{a, cls, -1, false, false};
    int other = -1;
    for (std::uint32_t c = 0; c < mlc_.size(); ++c)
      for (auto& l : mlc_[c][a % msets_])
        if (l.addr == a) other = static_cast<int>(c);
    int w = find(s, a);
    if (other >= 0) {
      auto& ol = mlc_[other][a % msets_];
      auto it = std::find_if(ol.begin(), ol.end(), [&](const RMline& l) { return l.addr == a; });
      nl.io = it->io;
      nl.dirty = it->dirty;
      nl.consumed = true;
      ol.erase(it);
      r.level = 1;
      if (w >= 0) llc_[s][w]->holder = static_cast<int>(core);
    } else if (w >= 0) {
      r.level = 1;
      RLine& L = *llc_[s][w];
      if (L.io >= 0) {
        if (!L.consumed) consumed_++;
        L.consumed = true;
      }
      nl.io = L.io;
      nl.consumed = L.consumed;
      if (static_cast<std::uint32_t>(w) >= ways_ - incl_) {
        L.holder = static_cast<int>(core);
        touch(s, w);
      } else if (L.io >= 0 || migrate_) {
        RLine moved = L;
        drop(s, w);
        int t = victim(s, ways_ - incl_, ways_ - 1);
        evict(s, t, r);
        moved.holder = static_cast<int>(core);
        llc_[s][t] = moved;
        touch(s, t);
        r.migrated = true;
        r.way_a = t;
      } else {
        nl.dirty = L.dirty;
        drop(s, w);
      }
    } else {
      r.level = 2;
      mem_reads_++;
      auto it = memio_.find(a);
      if (it != memio_.end()) {
        nl.io = it->second;
        nl.consumed = true;
        memio_.erase(it);
      }
    }
    if (write) nl.dirty = true;
    auto& set = mine;
    std::optional<RMline> vict;
    if (set.size() == mways_) {
      vict = set.front();
      set.erase(set.begin());
    }
    set.push_back(nl);
    if (vict) fill(*vict, r);
    return r;
  }

  RResult dma_write(int dev, std::uint64_t a, bool dca) {
    RResult r;
    for (auto& core : mlc_) {
      auto& l = core[a % msets_];
      l.erase(std::remove_if(l.begin(), l.end(), [&](const RMline& x) { return x.addr == a; }), l.end());
    }
    const std::uint32_t s = a % sets_;
    int w = find(s, a);
    if (w >= 0) {
      llc_[s][w]->holder = -1;
      if (llc_[s][w]->io >= 0 && !llc_[s][w]->consumed) overwritten_++;
    }
    if (dca) {
      memio_.erase(a);
      if (w >= 0) {
        RLine& L = *llc_[s][w];
        L.dirty = true;
        L.consumed = false;
        L.io = dev;
        touch(s, w);
        r.level = 0;
        r.way_a = w;
      } else {
        int t = victim(s, 0, dca_ - 1);
        evict(s, t, r);
        llc_[s][t] = RLine{a, dev_owner_[dev], dev, -1, true, false};
        touch(s, t);
        r.level = 1;
        r.way_a = t;
      }
    } else {
      if (w >= 0) drop(s, w);
      memio_[a] = dev;
      mem_writes_++;
      r.level = 2;
    }
    return r;
  }

  RResult dma_read(std::uint64_t a) {
    RResult r;
    const std::uint32_t s = a % sets_;
    int w = find(s, a);
    if (w >= 0) {
      touch(s, w);
      r.level = 0;
      r.way_a = w;
      return r;
    }
    for (std::uint32_t c = 0; c < mlc_.size(); ++c) {
      for (auto& l : mlc_[c][a % msets_]) {
        if (l.addr != a) continue;
        RMline copy = l;
        int t = victim(s, ways_ - incl_, ways_ - 1);
        evict(s, t, r);
        llc_[s][t] = RLine{a, copy.owner, copy.io, static_cast<int>(c), false, copy.consumed};
        touch(s, t);
        r.level = 1;
        r.way_a = t;
        return r;
      }
    }
    mem_reads_++;
    r.level = 2;
    return r;
  }

  /// Same format as the model's LLC dump.
  std::string dump() const {
    std::ostringstream os;
    for (std::uint32_t s = 0; s < sets_; ++s)
      for (std::uint32_t w = 0; w < ways_; ++w) {
        if (!llc_[s][w]) continue;
        const RLine& l = *llc_[s][w];
        os << s << ',' << w << ',' << l.addr << ',' << (l.holder >= 0 ? 'I' : 'E') << ',' << l.owner << ',' << l.io
           << ',' << (l.consumed ? 1 : 0) << ',' << (l.dirty ? 1 : 0) << '\n';
      }
    return os.str();
  }

  std::uint64_t mem_reads_ = 0, mem_writes_ = 0, consumed_ = 0, leaked_ = 0, overwritten_ = 0;

 private:
  int find(std::uint32_t s, std::uint64_t a) const {
    for (std::uint32_t w = 0; w < ways_; ++w)
      if (llc_[s][w] && llc_[s][w]->addr == a) return static_cast<int>(w);
    return -1;
  }
  void touch(std::uint32_t s, int w) {
    rec_[s].remove(w);
    rec_[s].push_back(w);
  }
  void drop(std::uint32_t s, int w) {
    llc_[s][w].reset();
    rec_[s].remove(w);
  }
  int victim(std::uint32_t s, std::uint32_t lo, std::uint32_t hi) const {
    for (std::uint32_t w = lo; w <= hi; ++w)
      if (!llc_[s][w]) return static_cast<int>(w);
    for (int w : rec_[s])
      if (static_cast<std::uint32_t>(w) >= lo && static_cast<std::uint32_t>(w) <= hi) return w;
    return -1;
  }
  void evict(std::uint32_t s, int w, RResult& r) {
    if (!llc_[s][w]) return;
    RLine l = *llc_[s][w];
    int dest = 2;
    if (l.holder >= 0) {
      for (auto& m : mlc_[l.holder][l.addr % msets_])
        if (m.addr == l.addr) m.dirty = m.dirty || l.dirty;
    } else if (l.dirty) {
      dest = 1;
      mem_writes_++;
    }
    if (l.io >= 0 && !l.consumed) {
      r.leak_addr = static_cast<long>(l.addr);
      r.leak_dev = l.io;
      leaked_++;
      memio_[l.addr] = l.io;
    }
    r.evicted.push_back({l.addr, dest});
    drop(s, w);
  }
  void fill(const RMline& v, RResult& r) {
    const std::uint32_t s = v.addr % sets_;
    int w = find(s, v.addr);
    if (w >= 0) {
      llc_[s][w]->holder = -1;
      llc_[s][w]->dirty = llc_[s][w]->dirty || v.dirty;
      r.evicted.push_back({v.addr, 0});
      return;
    }
    auto it = masks_.find(v.owner);
    std::uint32_t lo = 0, hi = ways_ - 1;
    if (it != masks_.end()) std::tie(lo, hi) = it->second;
    int t = victim(s, lo, hi);
    evict(s, t, r);
    llc_[s][t] = RLine{v.addr, v.owner, v.io, -1, v.dirty, v.consumed};
    touch(s, t);
    r.way_b = t;
    r.evicted.push_back({v.addr, 0});
  }

  std::uint32_t sets_, ways_, dca_, incl_, msets_, mways_;
  bool migrate_;
  std::vector<std::vector<std::optional<RLine>>> llc_;
  std::vector<std::list<int>> rec_;
  std::vector<std::vector<std::vector<RMline>>> mlc_;
  std::map<std::uint32_t, std::pair<std::uint32_t, std::uint32_t>> masks_;
  std::vector<std::uint32_t> dev_owner_;
  std::map<std::uint64_t, int> memio_;
};

inline int dest_code(a4sim::EvictDest d) {
  switch (d) {
    case a4sim::EvictDest::Llc: return 0;
    case a4sim::EvictDest::Memory: return 1;
    case a4sim::EvictDest::Dropped: return 2;
  }
  return -1;
}

template <class Outcome>
bool same_evictions(const Outcome& o, const RResult& r) {
  auto v = o.evicted.view();
  if (v.size() != r.evicted.size()) return false;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i].addr.value != r.evicted[i].addr || dest_code(v[i].dest) != r.evicted[i].dest) return false;
  return true;
}

template <class Outcome>
bool same_leak(const Outcome& o, const RResult& r) {
  if (!o.leak) return r.leak_addr < 0;
  return static_cast<long>(o.leak->addr.value) == r.leak_addr && static_cast<int>(o.leak->device) == r.leak_dev;
}

struct CampaignResult {
  std::size_t traces = 0;
  std::size_t operations = 0;
  std::size_t mismatches = 0;
  std::string first_mismatch;
};

/// Replays `traces` random traces through both the model and the reference.
inline CampaignResult run_oracle_campaign(std::size_t traces, std::size_t ops_per_trace, std::uint64_t seed) {
  CampaignResult res;
  std::mt19937_64 rng(seed);
  auto pick = [&](std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng); };
  for (std::size_t t = 0; t < traces; ++t) {
    a4sim::CacheGeometry g;
    const int shape = static_cast<int>(t % 3);
    if (shape == 0) {
      g.llc_sets = 4; g.llc_ways = 4; g.dca_way_count = 1; g.inclusive_way_count = 1;
      g.mlc_sets = 2; g.mlc_ways = 2; g.core_count = 2;
    } else if (shape == 1) {
      g.llc_sets = 8; g.llc_ways = 11; g.dca_way_count = 2; g.inclusive_way_count = 2;
      g.mlc_sets = 4; g.mlc_ways = 2; g.core_count = 3;
    } else {
      g.llc_sets = 2; g.llc_ways = 6; g.dca_way_count = 2; g.inclusive_way_count = 1;
      g.mlc_sets = 1; g.mlc_ways = 3; g.core_count = 4;
    }
    const bool migrate = pick(2) == 0;
    a4sim::CacheModel model(g, {.migrate_non_io = migrate, .paranoid = true});
    ReferenceCache ref(g.llc_sets, g.llc_ways, g.dca_way_count, g.inclusive_way_count, g.mlc_sets, g.mlc_ways,
                       g.core_count, migrate);
    const std::uint32_t classes = 3;
    for (std::uint32_t d = 0; d < 2; ++d) {
      model.add_device(d);
      ref.add_device(d);
    }
    const std::uint64_t span = std::uint64_t{g.llc_sets} * (g.llc_ways + 2);
    bool bad = false;
    for (std::size_t i = 0; i < ops_per_trace && !bad; ++i) {
      ++res.operations;
      const std::uint64_t a = pick(span);
      const auto op = pick(20);
      std::ostringstream what;
      if (op < 10) {
        const auto core = static_cast<std::uint32_t>(pick(g.core_count));
        const bool write = pick(3) == 0;
        const auto cls = static_cast<std::uint32_t>(pick(classes));
        auto o = model.cpu_access(core, a4sim::LineAddr{a}, write ? a4sim::AccessKind::Write : a4sim::AccessKind::Read,
                                  cls);
        auto r = ref.cpu(core, a, write, cls);
        bad = static_cast<int>(o.level) != r.level || o.migrated_to_inclusive != r.migrated ||
              o.migration_way.value_or(-1u) != static_cast<std::uint32_t>(r.way_a) ||
              o.llc_way_filled.value_or(-1u) != static_cast<std::uint32_t>(r.way_b) || !same_evictions(o, r) ||
              !same_leak(o, r);
        what << "cpu core=" << core << " addr=" << a;
      } else if (op < 15) {
        const auto dev = static_cast<std::uint32_t>(pick(2));
        const bool dca = pick(4) != 0;
        auto o = model.dma_write_line(dev, a4sim::LineAddr{a}, dca);
        auto r = ref.dma_write(static_cast<int>(dev), a, dca);
        bad = static_cast<int>(o.kind) != r.level || o.way.value_or(-1u) != static_cast<std::uint32_t>(r.way_a) ||
              !same_evictions(o, r) || !same_leak(o, r);
        what << "dma_write dev=" << dev << " addr=" << a;
      } else if (op < 18) {
        auto o = model.dma_read_line(0, a4sim::LineAddr{a});
        auto r = ref.dma_read(a);
        bad = static_cast<int>(o.kind) != r.level || o.way.value_or(-1u) != static_cast<std::uint32_t>(r.way_a) ||
              !same_evictions(o, r) || !same_leak(o, r);
        what << "dma_read addr=" << a;
      } else {
        const auto cls = static_cast<std::uint32_t>(pick(classes));
        auto lo = static_cast<std::uint32_t>(pick(g.llc_ways));
        auto hi = lo + static_cast<std::uint32_t>(pick(g.llc_ways - lo));
        model.set_way_mask(cls, {lo, hi});
        ref.set_mask(cls, lo, hi);
      }
      if (bad) {
        ++res.mismatches;
        if (res.first_mismatch.empty())
          res.first_mismatch = "trace " + std::to_string(t) + " op " + std::to_string(i) + ": " + what.str();
      }
    }
    std::ostringstream dump;
    model.dump_llc(dump);
    const auto& c = model.counters();
    if (!bad && (dump.str() != ref.dump() || c.memory_read_lines != ref.mem_reads_ ||
                 c.memory_write_lines != ref.mem_writes_ || c.consumed_from_cache != ref.consumed_ ||
                 c.leaked_instances != ref.leaked_ || c.overwritten_instances != ref.overwritten_)) {
      ++res.mismatches;
      if (res.first_mismatch.empty()) res.first_mismatch = "trace " + std::to_string(t) + ": final state differs";
    }
    ++res.traces;
  }
  return res;
}

}  // namespace reftest
