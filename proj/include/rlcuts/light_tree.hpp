// Copyright (c) 2026, the rlcuts authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "rlcuts/scene.hpp"

namespace rlcuts {

struct EmitterRecord {
  uint32_t triangle_id = 0;
  Vec3 centroid;
  double energy = 0;  // luminance(emission) * area, a flux proxy
};

// One record per emissive triangle, in scene emitter order.
std::vector<EmitterRecord> collect_emitters(const Scene& scene);

// Bit-interleaved 30-bit Morton code; x occupies the least significant slot
// of each 3-bit group, then y, then z. Inputs must be < 1024.
uint32_t morton3(uint32_t qx, uint32_t qy, uint32_t qz);

struct LightTreeNode {
  uint32_t range_begin = 0;  // into the sorted light order
  uint32_t range_end = 0;
  int32_t left = -1;
  int32_t right = -1;
  int32_t parent = -1;
  double energy = 0;
};

// Global binary reference hierarchy over all emitters: Morton-sorted leaves,
// internal nodes split at the highest differing code bit (median split when a
// range shares one code). The tree is an implicit guide only; it stores no
// sampling probabilities.
struct LightTree {
  std::vector<uint32_t> order;       // sorted position -> emitter index
  std::vector<LightTreeNode> nodes;  // root at index 0
  uint32_t root = 0;

  uint32_t light_count() const { return uint32_t(order.size()); }
  bool is_leaf(uint32_t id) const { return nodes[id].left < 0; }
};

// Throws std::invalid_argument when emitters is empty. The quantization grid
// spans `bounds` expanded by 1e-6; use emitter_centroid_bounds() for the
// default grid.
LightTree build_light_tree(const std::vector<EmitterRecord>& emitters, const AABB& bounds);

AABB emitter_centroid_bounds(const std::vector<EmitterRecord>& emitters);

// Children of an internal node, nullopt for a leaf. Throws std::out_of_range
// on an invalid id.
std::optional<std::pair<uint32_t, uint32_t>> node_children(const LightTree& tree,
                                                           uint32_t node_id);

// One node per line: `id begin end left right energy`.
void dump_light_tree(const LightTree& tree, std::ostream& out);

}  // namespace rlcuts
