// Copyright (c) 2026, the rlcuts authors.
// SPDX-License-Identifier: Apache-2.0

#include "rlcuts/bvh.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace rlcuts {

namespace {

constexpr uint32_t kLeafSize = 4;

struct BuildEntry {
  uint32_t node;
  uint32_t begin, end;
};

AABB triangle_bounds(const Triangle& t) {
  AABB b;
  b.extend(t.p0);
  b.extend(t.p1);
  b.extend(t.p2);
  return b;
}

bool intersect_aabb(const AABB& box, const Vec3& origin, const Vec3& inv_dir,
                    double t_min, double t_max) {
  for (int a = 0; a < 3; ++a) {
    double t0 = (box.lo[a] - origin[a]) * inv_dir[a];
    double t1 = (box.hi[a] - origin[a]) * inv_dir[a];
    if (inv_dir[a] < 0) std::swap(t0, t1);
    t_min = std::max(t_min, t0);
    t_max = std::min(t_max, t1);
    if (t_max < t_min) return false;
  }
  return true;
}

}  // namespace

bool intersect_triangle(const Triangle& tri, const Ray& ray, double t_max, double* t_out) {
  // Moller-Trumbore.
  const Vec3 e1 = tri.p1 - tri.p0;
  const Vec3 e2 = tri.p2 - tri.p0;
  const Vec3 pv = cross(ray.dir, e2);
  const double det = dot(e1, pv);
  if (std::abs(det) < 1e-14) return false;
  const double inv_det = 1.0 / det;
  const Vec3 tv = ray.origin - tri.p0;
  const double u = dot(tv, pv) * inv_det;
  if (u < 0 || u > 1) return false;
  const Vec3 qv = cross(tv, e1);
  const double v = dot(ray.dir, qv) * inv_det;
  if (v < 0 || u + v > 1) return false;
  const double t = dot(e2, qv) * inv_det;
  if (t <= ray.t_min || t >= t_max) return false;
  *t_out = t;
  return true;
}

SceneAccel build_scene_bvh(const Scene& scene) {
  if (scene.triangles.empty())
    throw std::invalid_argument("build_scene_bvh: empty scene");

  const size_t n = scene.triangles.size();
  std::vector<AABB> tri_bounds(n);
  std::vector<Vec3> centroids(n);
  for (size_t i = 0; i < n; ++i) {
    tri_bounds[i] = triangle_bounds(scene.triangles[i]);
    centroids[i] = tri_bounds[i].center();
  }

  SceneAccel accel;
  accel.scene = &scene;
  accel.tri_order.resize(n);
  std::iota(accel.tri_order.begin(), accel.tri_order.end(), 0u);
  accel.nodes.reserve(2 * n);
  accel.nodes.emplace_back();

  std::vector<BuildEntry> stack{{0, 0, uint32_t(n)}};
  while (!stack.empty()) {
    const BuildEntry e = stack.back();
    stack.pop_back();

    AABB bounds, cbounds;
    for (uint32_t i = e.begin; i < e.end; ++i) {
      bounds.extend(tri_bounds[accel.tri_order[i]]);
      cbounds.extend(centroids[accel.tri_order[i]]);
    }
    SceneAccel::Node& node = accel.nodes[e.node];
    node.bounds = bounds;

    const uint32_t count = e.end - e.begin;
    if (count <= kLeafSize) {
      node.begin = e.begin;
      node.count = count;
      continue;
    }

    const int axis = cbounds.longest_axis();
    const uint32_t mid = e.begin + count / 2;
    std::nth_element(accel.tri_order.begin() + e.begin, accel.tri_order.begin() + mid,
                     accel.tri_order.begin() + e.end, [&](uint32_t a, uint32_t b) {
                       return centroids[a][axis] < centroids[b][axis];
                     });

    const uint32_t left = uint32_t(accel.nodes.size());
    accel.nodes.emplace_back();
    accel.nodes.emplace_back();
    accel.nodes[e.node].left = left;
    accel.nodes[e.node].right = left + 1;
    stack.push_back({left, e.begin, mid});
    stack.push_back({left + 1, mid, e.end});
  }

  accel.scene_bounds = accel.nodes[0].bounds;
  accel.shadow_eps = 1e-4 * accel.scene_bounds.diagonal();
  return accel;
}

std::optional<Hit> intersect(const SceneAccel& accel, const Ray& ray) {
  const Vec3 inv_dir{1.0 / ray.dir.x, 1.0 / ray.dir.y, 1.0 / ray.dir.z};
  double closest = ray.t_max;
  int32_t hit_tri = -1;

  uint32_t stack[64];
  int sp = 0;
  stack[sp++] = 0;
  while (sp > 0) {
    const SceneAccel::Node& node = accel.nodes[stack[--sp]];
    if (!intersect_aabb(node.bounds, ray.origin, inv_dir, ray.t_min, closest)) continue;
    if (node.count > 0) {
      for (uint32_t i = node.begin; i < node.begin + node.count; ++i) {
        const uint32_t tri_id = accel.tri_order[i];
        double t;
        if (intersect_triangle(accel.scene->triangles[tri_id], ray, closest, &t)) {
          closest = t;
          hit_tri = int32_t(tri_id);
        }
      }
    } else {
      stack[sp++] = node.left;
      stack[sp++] = node.right;
    }
  }

  if (hit_tri < 0) return std::nullopt;
  Hit hit;
  hit.t = closest;
  hit.triangle_id = uint32_t(hit_tri);
  hit.position = ray.origin + ray.dir * closest;
  hit.geometric_normal = triangle_normal(accel.scene->triangles[hit_tri]);
  return hit;
}

bool occluded(const SceneAccel& accel, const Vec3& a, const Vec3& b) {
  const Vec3 d = b - a;
  const double len = length(d);
  if (len <= 2 * accel.shadow_eps) return false;
  Ray ray;
  ray.origin = a;
  ray.dir = d / len;
  ray.t_min = accel.shadow_eps;
  const double t_max = len - accel.shadow_eps;

  const Vec3 inv_dir{1.0 / ray.dir.x, 1.0 / ray.dir.y, 1.0 / ray.dir.z};
  uint32_t stack[64];
  int sp = 0;
  stack[sp++] = 0;
  while (sp > 0) {
    const SceneAccel::Node& node = accel.nodes[stack[--sp]];
    if (!intersect_aabb(node.bounds, ray.origin, inv_dir, ray.t_min, t_max)) continue;
    if (node.count > 0) {
      for (uint32_t i = node.begin; i < node.begin + node.count; ++i) {
        double t;
        if (intersect_triangle(accel.scene->triangles[accel.tri_order[i]], ray, t_max, &t))
          return true;
      }
    } else {
      stack[sp++] = node.left;
      stack[sp++] = node.right;
    }
  }
  return false;
}

}  // namespace rlcuts
