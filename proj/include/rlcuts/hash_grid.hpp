// Copyright (c) 2026, the rlcuts authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "rlcuts/cut.hpp"
#include "rlcuts/math.hpp"

namespace rlcuts {

struct HashConfig {
  uint32_t capacity = 1u << 16;
  double base_tile = 0;  // world size of a level-0 cell; <= 0 means "derive from scene"
  uint32_t probe_limit = 32;
  uint32_t normal_bits = 4;  // octahedral bits per component
  double jitter_scale = 0;   // 0 keeps key derivation a pure function
};

// 5D cell key: quantized position, octahedral-quantized normal, footprint level.
struct CellKey {
  int32_t qx = 0;
  int32_t qy = 0;
  int32_t qz = 0;
  uint32_t qn = 0;
  uint32_t level = 0;

  bool operator==(const CellKey&) const = default;
};

uint64_t hash_key(const CellKey& key);

// Footprint-to-LOD mapping: footprint 1/sqrt(area_pdf), level =
// clamp(round(log2(footprint / base_tile)), 0, 16). Throws on area_pdf <= 0.
uint32_t level_for_footprint(double area_pdf, double base_tile);

double cell_size_for_level(double base_tile, uint32_t level);

// Maps a direction on the unit sphere to the octahedral [0,1]^2 square and
// back. decode(encode(n)) reproduces n for unit vectors.
Vec2 octa_encode(const Vec3& n);
Vec3 octa_decode(double u, double v);

// Quantizes a jittered shading point. One uniform drives the shared offset of
// all three position axes, the other the shared sub-quantum offset of both
// normal components; with jitter_scale = 0 both are ignored. The normal must
// be unit length within 1e-4.
CellKey make_key(const Vec3& position, const Vec3& normal, uint32_t level,
                 double jitter_u1, double jitter_u2, const HashConfig& config);

// Slot index into the grid, or the shared fallback cell on probe exhaustion.
struct CellHandle {
  static constexpr uint32_t kFallback = UINT32_MAX;
  uint32_t slot = kFallback;

  bool is_fallback() const { return slot == kFallback; }
};

class SpinLock {
 public:
  void lock() {
    while (flag_.test_and_set(std::memory_order_acquire)) {
    }
  }
  void unlock() { flag_.clear(std::memory_order_release); }

 private:
  std::atomic_flag flag_ = ATOMIC_FLAG_INIT;
};

// Fixed-capacity open-addressing hash of shading cells. Slots are claimed
// with an atomic empty -> building -> ready protocol so exactly one caller
// copies the template cut in and readers never observe a partial copy. The
// fallback cell is sampled when the table overflows but never adapted.
class HashGrid {
 public:
  HashGrid(const HashConfig& config, Cut template_cut);

  HashGrid(const HashGrid&) = delete;
  HashGrid& operator=(const HashGrid&) = delete;

  CellHandle lookup_or_insert(const CellKey& key);

  Cut& cut(CellHandle handle);
  const Cut& cut(CellHandle handle) const;
  const CellKey& key_of(uint32_t slot) const;

  // Serializes sampling and q updates on one cell; no-op storage exists for
  // the fallback handle so callers can lock unconditionally.
  SpinLock& cell_lock(CellHandle handle);

  void mark_touched(CellHandle handle);  // fallback: no-op
  std::vector<uint32_t> touched_slots() const;
  void clear_touched();

  const HashConfig& config() const { return config_; }
  const Cut& fallback_cut() const { return fallback_; }
  uint32_t occupied_count() const { return occupied_.load(std::memory_order_relaxed); }
  uint64_t lookup_count() const { return lookups_.load(std::memory_order_relaxed); }
  uint64_t fallback_hits() const { return fallback_hits_.load(std::memory_order_relaxed); }

  // Total learned-distribution storage, in per-cluster records: the sum of
  // cut sizes over occupied slots. Grows with occupancy, never with the
  // light count.
  uint64_t memory_records() const;

  // CSV: one header row, one value row with occupancy, lookup and fallback
  // counters, and the per-level occupied histogram.
  void dump_stats(std::ostream& out) const;

 private:
  struct Slot {
    std::atomic<uint32_t> state{0};  // 0 empty, 1 building, 2 ready
    std::atomic<uint8_t> touched{0};
    SpinLock lock;
    CellKey key;
    Cut cut;
  };

  HashConfig config_;
  Cut template_;
  Cut fallback_;
  SpinLock fallback_lock_;
  std::unique_ptr<Slot[]> slots_;
  std::atomic<uint32_t> occupied_{0};
  std::atomic<uint64_t> lookups_{0};
  std::atomic<uint64_t> fallback_hits_{0};
};

}  // namespace rlcuts
