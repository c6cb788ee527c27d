// Copyright (c) 2026, the rlcuts authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "rlcuts/scene.hpp"

namespace rlcuts {

// Bounding volume hierarchy over scene triangles. Immutable after build;
// safe for unsynchronized shared reads.
struct SceneAccel {
  struct Node {
    AABB bounds;
    uint32_t left = 0;    // internal only
    uint32_t right = 0;   // internal only
    uint32_t begin = 0;   // leaf only: range into tri_order
    uint32_t count = 0;   // 0 for internal nodes
  };

  std::vector<Node> nodes;
  std::vector<uint32_t> tri_order;
  const Scene* scene = nullptr;
  AABB scene_bounds;
  double shadow_eps = 0;  // 1e-4 x scene diagonal, applied at segment endpoints
};

// Top-down median split on the centroid of the longest axis, leaf size <= 4.
// Throws std::invalid_argument for an empty scene.
SceneAccel build_scene_bvh(const Scene& scene);

// Closest hit with t in (ray.t_min, ray.t_max), or nullopt.
std::optional<Hit> intersect(const SceneAccel& accel, const Ray& ray);

// True iff any triangle blocks the open segment (a, b); shadow_eps is applied
// at both endpoints.
bool occluded(const SceneAccel& accel, const Vec3& a, const Vec3& b);

// Watertight-enough double precision triangle test used by both the BVH and
// the brute-force oracles in the test suite.
bool intersect_triangle(const Triangle& tri, const Ray& ray, double t_max, double* t_out);

}  // namespace rlcuts
