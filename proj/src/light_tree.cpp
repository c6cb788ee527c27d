// Copyright (c) 2026, the rlcuts authors.
// SPDX-License-Identifier: Apache-2.0

#include "rlcuts/light_tree.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace rlcuts {

namespace {

uint32_t expand_bits10(uint32_t x) {
  x &= 0x3ff;
  x = (x | (x << 16)) & 0x030000ff;
  x = (x | (x << 8)) & 0x0300f00f;
  x = (x | (x << 4)) & 0x030c30c3;
  x = (x | (x << 2)) & 0x09249249;
  return x;
}

struct SortedLight {
  uint32_t code;
  uint32_t emitter;
};

}  // namespace

std::vector<EmitterRecord> collect_emitters(const Scene& scene) {
  std::vector<EmitterRecord> emitters;
  emitters.reserve(scene.emitter_ids.size());
  for (uint32_t tri_id : scene.emitter_ids) {
    const Triangle& tri = scene.triangles[tri_id];
    EmitterRecord rec;
    rec.triangle_id = tri_id;
    rec.centroid = triangle_centroid(tri);
    rec.energy = luminance(scene.material_of(tri_id).emission) * triangle_area(tri);
    emitters.push_back(rec);
  }
  return emitters;
}

uint32_t morton3(uint32_t qx, uint32_t qy, uint32_t qz) {
  if (qx >= 1024 || qy >= 1024 || qz >= 1024)
    throw std::invalid_argument("morton3: inputs must be 10-bit");
  return expand_bits10(qx) | (expand_bits10(qy) << 1) | (expand_bits10(qz) << 2);
}

AABB emitter_centroid_bounds(const std::vector<EmitterRecord>& emitters) {
  AABB box;
  for (const EmitterRecord& e : emitters) box.extend(e.centroid);
  return box;
}

LightTree build_light_tree(const std::vector<EmitterRecord>& emitters, const AABB& bounds) {
  if (emitters.empty()) throw std::invalid_argument("build_light_tree: no emitters");

  const Vec3 lo = bounds.lo - Vec3(1e-6);
  const Vec3 ext = max(bounds.extent() + Vec3(2e-6), Vec3(1e-12));

  std::vector<SortedLight> sorted(emitters.size());
  for (uint32_t i = 0; i < emitters.size(); ++i) {
    const Vec3 rel = emitters[i].centroid - lo;
    uint32_t q[3];
    for (int a = 0; a < 3; ++a)
      q[a] = uint32_t(std::min(1023.0, std::max(0.0, rel[a] / ext[a] * 1024.0)));
    sorted[i] = {morton3(q[0], q[1], q[2]), i};
  }
  std::sort(sorted.begin(), sorted.end(), [](const SortedLight& a, const SortedLight& b) {
    return a.code != b.code ? a.code < b.code : a.emitter < b.emitter;
  });

  LightTree tree;
  tree.order.resize(sorted.size());
  for (uint32_t i = 0; i < sorted.size(); ++i) tree.order[i] = sorted[i].emitter;
  tree.nodes.reserve(2 * sorted.size());

  // Recursive range split; returns node id and aggregates energy bottom-up.
  auto build = [&](auto&& self, uint32_t begin, uint32_t end, int32_t parent) -> uint32_t {
    const uint32_t id = uint32_t(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes[id].range_begin = begin;
    tree.nodes[id].range_end = end;
    tree.nodes[id].parent = parent;

    if (end - begin == 1) {
      tree.nodes[id].energy = emitters[tree.order[begin]].energy;
      return id;
    }

    const uint32_t first = sorted[begin].code;
    const uint32_t last = sorted[end - 1].code;
    uint32_t mid;
    if (first == last) {
      mid = begin + (end - begin) / 2;
    } else {
      // Split below the highest differing bit: first index whose code
      // leaves the low (bit-cleared) group.
      const int bit = 31 - __builtin_clz(first ^ last);
      const uint32_t threshold = (first & ~((1u << (bit + 1)) - 1u)) | (1u << bit);
      mid = uint32_t(std::lower_bound(sorted.begin() + begin, sorted.begin() + end,
                                      threshold,
                                      [](const SortedLight& s, uint32_t th) {
                                        return s.code < th;
                                      }) -
                     sorted.begin());
    }

    const uint32_t l = self(self, begin, mid, int32_t(id));
    const uint32_t r = self(self, mid, end, int32_t(id));
    tree.nodes[id].left = int32_t(l);
    tree.nodes[id].right = int32_t(r);
    tree.nodes[id].energy = tree.nodes[l].energy + tree.nodes[r].energy;
    return id;
  };
  tree.root = build(build, 0, uint32_t(sorted.size()), -1);
  return tree;
}

std::optional<std::pair<uint32_t, uint32_t>> node_children(const LightTree& tree,
                                                           uint32_t node_id) {
  if (node_id >= tree.nodes.size())
    throw std::out_of_range("node_children: invalid node id");
  const LightTreeNode& n = tree.nodes[node_id];
  if (n.left < 0) return std::nullopt;
  return std::make_pair(uint32_t(n.left), uint32_t(n.right));
}

void dump_light_tree(const LightTree& tree, std::ostream& out) {
  for (uint32_t id = 0; id < tree.nodes.size(); ++id) {
    const LightTreeNode& n = tree.nodes[id];
    out << id << ' ' << n.range_begin << ' ' << n.range_end << ' ' << n.left << ' '
        << n.right << ' ' << n.energy << '\n';
  }
}

}  // namespace rlcuts
