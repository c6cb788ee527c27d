// Copyright (c) 2026, the rlcuts authors.
// SPDX-License-Identifier: Apache-2.0

#include "rlcuts/scene.hpp"

#include <stdexcept>

namespace rlcuts {

Ray camera_ray(const Camera& cam, double px, double py, double t_min) {
  const Vec3 w = normalize(cam.origin - cam.look_at);  // backward
  const Vec3 u = normalize(cross(cam.up, w));
  const Vec3 v = cross(w, u);
  const double tan_half = std::tan(0.5 * cam.vfov_degrees * kPi / 180.0);
  const double aspect = double(cam.width) / double(cam.height);
  const double sx = (2.0 * px / cam.width - 1.0) * tan_half * aspect;
  const double sy = (1.0 - 2.0 * py / cam.height) * tan_half;
  Ray ray;
  ray.origin = cam.origin;
  ray.dir = normalize(u * sx + v * sy - w);
  ray.t_min = t_min;
  return ray;
}

double pixel_solid_angle(const Camera& cam) {
  const double tan_half = std::tan(0.5 * cam.vfov_degrees * kPi / 180.0);
  const double aspect = double(cam.width) / double(cam.height);
  const double plane_h = 2.0 * tan_half;
  const double plane_w = plane_h * aspect;
  return (plane_w / cam.width) * (plane_h / cam.height);
}

void Scene::derive_emitters() {
  emitter_ids.clear();
  for (uint32_t i = 0; i < triangles.size(); ++i)
    if (materials[triangles[i].material_id].is_emitter()) emitter_ids.push_back(i);
}

AABB Scene::bounds() const {
  AABB box;
  for (const Triangle& t : triangles) {
    box.extend(t.p0);
    box.extend(t.p1);
    box.extend(t.p2);
  }
  return box;
}

TrianglePointSample sample_triangle_point(const Triangle& tri, double u1, double u2) {
  const double area = triangle_area(tri);
  if (area <= 0) throw std::invalid_argument("sample_triangle_point: degenerate triangle");
  const double su = std::sqrt(u1);
  const double b0 = 1.0 - su;
  const double b1 = u2 * su;
  TrianglePointSample s;
  s.point = tri.p0 * b0 + tri.p1 * b1 + tri.p2 * (1.0 - b0 - b1);
  s.pdf = 1.0 / area;
  return s;
}

}  // namespace rlcuts
