// Copyright (c) 2026, the rlcuts authors.
// SPDX-License-Identifier: Apache-2.0

#include "rlcuts/hash_grid.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "rlcuts/rng.hpp"

namespace rlcuts {

namespace {

constexpr uint32_t kEmpty = 0;
constexpr uint32_t kBuilding = 1;
constexpr uint32_t kReady = 2;
constexpr uint32_t kMaxLevel = 16;

double sign_not_zero(double v) { return v >= 0 ? 1.0 : -1.0; }

}  // namespace

uint64_t hash_key(const CellKey& key) {
  const uint64_t w0 = (uint64_t(uint32_t(key.qx)) << 32) | uint64_t(uint32_t(key.qy));
  const uint64_t w1 = (uint64_t(uint32_t(key.qz)) << 32) |
                      (uint64_t(key.qn & 0xffffu) << 16) | uint64_t(key.level & 0xffffu);
  return hash_combine(mix64(w0), w1);
}

uint32_t level_for_footprint(double area_pdf, double base_tile) {
  if (!(area_pdf > 0)) {
    throw std::invalid_argument("level_for_footprint: area pdf must be positive");
  }
  if (!(base_tile > 0)) {
    throw std::invalid_argument("level_for_footprint: base tile must be positive");
  }
  const double footprint = 1.0 / std::sqrt(area_pdf);
  const double level = std::round(std::log2(footprint / base_tile));
  return uint32_t(std::clamp(level, 0.0, double(kMaxLevel)));
}

double cell_size_for_level(double base_tile, uint32_t level) {
  return base_tile * std::exp2(double(level));
}

Vec2 octa_encode(const Vec3& n) {
  const double norm = std::abs(n.x) + std::abs(n.y) + std::abs(n.z);
  double ox = n.x / norm;
  double oy = n.y / norm;
  if (n.z < 0) {
    const double tx = (1.0 - std::abs(oy)) * sign_not_zero(ox);
    const double ty = (1.0 - std::abs(ox)) * sign_not_zero(oy);
    ox = tx;
    oy = ty;
  }
  return Vec2{ox * 0.5 + 0.5, oy * 0.5 + 0.5};
}

Vec3 octa_decode(double u, double v) {
  const double ox = u * 2.0 - 1.0;
  const double oy = v * 2.0 - 1.0;
  Vec3 n{ox, oy, 1.0 - std::abs(ox) - std::abs(oy)};
  if (n.z < 0) {
    const double tx = (1.0 - std::abs(oy)) * sign_not_zero(ox);
    const double ty = (1.0 - std::abs(ox)) * sign_not_zero(oy);
    n.x = tx;
    n.y = ty;
  }
  return normalize(n);
}

CellKey make_key(const Vec3& position, const Vec3& normal, uint32_t level,
                 double jitter_u1, double jitter_u2, const HashConfig& config) {
  if (std::abs(length(normal) - 1.0) > 1e-4) {
    throw std::invalid_argument("make_key: normal must be unit length");
  }
  const double cell = cell_size_for_level(config.base_tile, level);
  const double offset = config.jitter_scale * cell * (jitter_u1 - 0.5);

  CellKey key;
  key.qx = int32_t(std::floor((position.x + offset) / cell));
  key.qy = int32_t(std::floor((position.y + offset) / cell));
  key.qz = int32_t(std::floor((position.z + offset) / cell));
  key.level = level;

  const uint32_t steps = 1u << config.normal_bits;
  const double quantum = 1.0 / double(steps);
  const double noffset = config.jitter_scale * quantum * (jitter_u2 - 0.5);
  const Vec2 octa = octa_encode(normal);
  const auto quantize = [&](double c) {
    const double q = std::floor((c + noffset) * double(steps));
    return uint32_t(std::clamp(q, 0.0, double(steps - 1)));
  };
  key.qn = (quantize(octa.x) << config.normal_bits) | quantize(octa.y);
  return key;
}

HashGrid::HashGrid(const HashConfig& config, Cut template_cut)
    : config_(config), template_(std::move(template_cut)), fallback_(template_) {
  if (config_.capacity < 1) {
    throw std::invalid_argument("HashGrid: capacity must be at least 1");
  }
  if (!(config_.base_tile > 0)) {
    throw std::invalid_argument("HashGrid: base tile must be resolved before build");
  }
  slots_ = std::make_unique<Slot[]>(config_.capacity);
}

CellHandle HashGrid::lookup_or_insert(const CellKey& key) {
  lookups_.fetch_add(1, std::memory_order_relaxed);
  const uint64_t h = hash_key(key);
  const uint32_t probes = std::min(config_.probe_limit, config_.capacity);
  for (uint32_t i = 0; i < probes; ++i) {
    const uint32_t index = uint32_t((h + i) % config_.capacity);
    Slot& slot = slots_[index];
    uint32_t state = slot.state.load(std::memory_order_acquire);
    if (state == kEmpty) {
      uint32_t expected = kEmpty;
      if (slot.state.compare_exchange_strong(expected, kBuilding,
                                             std::memory_order_acq_rel)) {
        slot.key = key;
        slot.cut = template_;
        slot.state.store(kReady, std::memory_order_release);
        occupied_.fetch_add(1, std::memory_order_relaxed);
        return CellHandle{index};
      }
      state = expected;
    }
    while (state == kBuilding) {
      std::this_thread::yield();
      state = slot.state.load(std::memory_order_acquire);
    }
    if (slot.key == key) return CellHandle{index};
  }
  fallback_hits_.fetch_add(1, std::memory_order_relaxed);
  return CellHandle{};
}

Cut& HashGrid::cut(CellHandle handle) {
  return handle.is_fallback() ? fallback_ : slots_[handle.slot].cut;
}

const Cut& HashGrid::cut(CellHandle handle) const {
  return handle.is_fallback() ? fallback_ : slots_[handle.slot].cut;
}

const CellKey& HashGrid::key_of(uint32_t slot) const { return slots_[slot].key; }

SpinLock& HashGrid::cell_lock(CellHandle handle) {
  return handle.is_fallback() ? fallback_lock_ : slots_[handle.slot].lock;
}

void HashGrid::mark_touched(CellHandle handle) {
  if (handle.is_fallback()) return;
  slots_[handle.slot].touched.store(1, std::memory_order_relaxed);
}

std::vector<uint32_t> HashGrid::touched_slots() const {
  std::vector<uint32_t> touched;
  for (uint32_t i = 0; i < config_.capacity; ++i) {
    if (slots_[i].state.load(std::memory_order_acquire) == kReady &&
        slots_[i].touched.load(std::memory_order_relaxed)) {
      touched.push_back(i);
    }
  }
  return touched;
}

void HashGrid::clear_touched() {
  for (uint32_t i = 0; i < config_.capacity; ++i) {
    slots_[i].touched.store(0, std::memory_order_relaxed);
  }
}

uint64_t HashGrid::memory_records() const {
  uint64_t records = 0;
  for (uint32_t i = 0; i < config_.capacity; ++i) {
    if (slots_[i].state.load(std::memory_order_acquire) == kReady) {
      records += slots_[i].cut.size();
    }
  }
  return records;
}

void HashGrid::dump_stats(std::ostream& out) const {
  uint64_t histogram[kMaxLevel + 1] = {};
  for (uint32_t i = 0; i < config_.capacity; ++i) {
    if (slots_[i].state.load(std::memory_order_acquire) == kReady) {
      ++histogram[std::min(slots_[i].key.level, kMaxLevel)];
    }
  }
  out << "occupied,lookups,fallback_hits";
  for (uint32_t level = 0; level <= kMaxLevel; ++level) out << ",level_" << level;
  out << "\n";
  out << occupied_count() << ',' << lookup_count() << ',' << fallback_hits();
  for (uint32_t level = 0; level <= kMaxLevel; ++level) out << ',' << histogram[level];
  out << "\n";
}

}  // namespace rlcuts
