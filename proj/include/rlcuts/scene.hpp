// Copyright (c) 2026, the rlcuts authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "rlcuts/math.hpp"

namespace rlcuts {

struct Material {
  Vec3 albedo;    // linear RGB in [0,1]
  Vec3 emission;  // linear RGB radiance, >= 0

  bool is_emitter() const { return luminance(emission) > 0; }
};

struct Triangle {
  Vec3 p0, p1, p2;
  uint32_t material_id = 0;
};

inline Vec3 triangle_cross(const Triangle& t) { return cross(t.p1 - t.p0, t.p2 - t.p0); }
inline double triangle_area(const Triangle& t) { return 0.5 * length(triangle_cross(t)); }
inline Vec3 triangle_normal(const Triangle& t) { return normalize(triangle_cross(t)); }
inline Vec3 triangle_centroid(const Triangle& t) { return (t.p0 + t.p1 + t.p2) / 3.0; }

struct Camera {
  Vec3 origin;
  Vec3 look_at;
  Vec3 up{0, 1, 0};
  double vfov_degrees = 45;
  int width = 128;
  int height = 128;
};

struct Ray {
  Vec3 origin;
  Vec3 dir;  // unit length
  double t_min = 0;
  double t_max = kInf;
};

// Pinhole camera ray through continuous pixel coordinates (px, py) in
// [0,width) x [0,height); py grows downward.
Ray camera_ray(const Camera& cam, double px, double py, double t_min = 0);

// Solid angle subtended by one pixel on the image plane at unit distance.
double pixel_solid_angle(const Camera& cam);

struct Scene {
  std::vector<Triangle> triangles;
  std::vector<Material> materials;
  Camera camera;
  std::vector<uint32_t> emitter_ids;  // derived; see derive_emitters()

  const Material& material_of(uint32_t triangle_id) const {
    return materials[triangles[triangle_id].material_id];
  }

  // Rebuilds emitter_ids from the current triangles/materials.
  void derive_emitters();

  AABB bounds() const;
};

struct Hit {
  double t = 0;
  Vec3 position;
  Vec3 geometric_normal;  // unit, winding order orientation (not flipped)
  uint32_t triangle_id = 0;
  // Area pdf of generating this path vertex; filled by the integrator that
  // knows the sampling density of the incoming ray, not by intersection.
  double area_pdf = 0;
};

// Uniform point on a triangle via the square-root warp.
// Returns the point and pdf = 1/area. Throws std::invalid_argument for a
// degenerate (zero area) triangle.
struct TrianglePointSample {
  Vec3 point;
  double pdf = 0;  // per unit area
};
TrianglePointSample sample_triangle_point(const Triangle& tri, double u1, double u2);

}  // namespace rlcuts
