// Copyright (c) 2026, the rlcuts authors.
// SPDX-License-Identifier: Apache-2.0

#include "rlcuts/scene_gen.hpp"

#include <cmath>
#include <stdexcept>

#include "rlcuts/rng.hpp"

namespace rlcuts {

namespace {

void add_quad(Scene& scene, const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d,
              uint32_t mat) {
  scene.triangles.push_back({a, b, c, mat});
  scene.triangles.push_back({a, c, d, mat});
}

struct DomeTri {
  Vec3 a, b, c;
};

}  // namespace

int append_dome(Scene& scene, const Vec3& center, double radius, uint32_t material_id,
                int requested_triangles) {
  // Base: the 4 top faces of an octahedron, each pre-split in two -> 8 faces,
  // then s rounds of 4-way subdivision. Pick s so 8*4^s is closest to the
  // request.
  int subdiv = 0;
  {
    double best = kInf;
    for (int s = 0; s <= 7; ++s) {
      const double count = 8.0 * std::pow(4.0, s);
      if (std::abs(count - requested_triangles) < best) {
        best = std::abs(count - requested_triangles);
        subdiv = s;
      }
    }
  }

  const Vec3 top{0, 1, 0};
  const Vec3 eq[5] = {{1, 0, 0}, {0, 0, 1}, {-1, 0, 0}, {0, 0, -1}, {1, 0, 0}};
  std::vector<DomeTri> tris;
  for (int i = 0; i < 4; ++i) {
    const Vec3 mid = normalize(eq[i] + eq[i + 1]);
    tris.push_back({top, eq[i], mid});
    tris.push_back({top, mid, eq[i + 1]});
  }
  for (int s = 0; s < subdiv; ++s) {
    std::vector<DomeTri> next;
    next.reserve(tris.size() * 4);
    for (const DomeTri& t : tris) {
      const Vec3 ab = normalize(t.a + t.b);
      const Vec3 bc = normalize(t.b + t.c);
      const Vec3 ca = normalize(t.c + t.a);
      next.push_back({t.a, ab, ca});
      next.push_back({ab, t.b, bc});
      next.push_back({ca, bc, t.c});
      next.push_back({ab, bc, ca});
    }
    tris = std::move(next);
  }

  for (const DomeTri& t : tris) {
    Triangle tri{center + t.a * radius, center + t.b * radius, center + t.c * radius,
                 material_id};
    // Emission is one-sided; the shell must face the scene.
    if (dot(triangle_normal(tri), triangle_centroid(tri) - center) > 0)
      std::swap(tri.p1, tri.p2);
    scene.triangles.push_back(tri);
  }
  return int(tris.size());
}

Scene gen_cornell_grid(int k, uint64_t seed, int dome_triangles) {
  if (k < 1) throw std::invalid_argument("gen_cornell_grid: k must be >= 1");

  Scene scene;
  scene.materials.push_back({Vec3{0.73, 0.73, 0.73}, Vec3{0, 0, 0}});  // 0 white
  scene.materials.push_back({Vec3{0.62, 0.06, 0.06}, Vec3{0, 0, 0}});  // 1 red
  scene.materials.push_back({Vec3{0.11, 0.45, 0.09}, Vec3{0, 0, 0}});  // 2 green

  const double pitch = 1.25;
  const double extent = pitch * k - 0.25;

  for (int iz = 0; iz < k; ++iz) {
    for (int ix = 0; ix < k; ++ix) {
      const Vec3 o{pitch * ix, 0, pitch * iz};
      const uint32_t light_mat = uint32_t(scene.materials.size());
      RandomSequence rng(seed, uint64_t(iz) * k + ix);
      const Vec3 light_emission{11.0 + 5.0 * rng.next(), 10.0 + 4.0 * rng.next(),
                                7.0 + 3.0 * rng.next()};
      scene.materials.push_back({Vec3{0, 0, 0}, light_emission});

      // floor
      add_quad(scene, o + Vec3{0, 0, 0}, o + Vec3{1, 0, 0}, o + Vec3{1, 0, 1},
               o + Vec3{0, 0, 1}, 0);
      // left wall (x = 0), red
      add_quad(scene, o + Vec3{0, 0, 0}, o + Vec3{0, 0, 1}, o + Vec3{0, 1, 1},
               o + Vec3{0, 1, 0}, 1);
      // right wall (x = 1), green
      add_quad(scene, o + Vec3{1, 0, 0}, o + Vec3{1, 1, 0}, o + Vec3{1, 1, 1},
               o + Vec3{1, 0, 1}, 2);
      // back wall (z = 1)
      add_quad(scene, o + Vec3{0, 0, 1}, o + Vec3{1, 0, 1}, o + Vec3{1, 1, 1},
               o + Vec3{0, 1, 1}, 0);
      // front wall (z = 0)
      add_quad(scene, o + Vec3{0, 0, 0}, o + Vec3{0, 1, 0}, o + Vec3{1, 1, 0},
               o + Vec3{1, 0, 0}, 0);
      // light quad, slightly below the open top, facing down
      add_quad(scene, o + Vec3{0.3, 0.93, 0.3}, o + Vec3{0.7, 0.93, 0.3},
               o + Vec3{0.7, 0.93, 0.7}, o + Vec3{0.3, 0.93, 0.7}, light_mat);
    }
  }

  scene.camera.origin = {extent * 0.5, 2.6 * extent + 2.0, -(0.55 * extent + 0.6)};
  scene.camera.look_at = {extent * 0.5, 0, extent * 0.45};
  scene.camera.up = {0, 0, 1};
  const double dist = length(scene.camera.origin - scene.camera.look_at);
  // Frame the box grid itself; the point of the scene is the occluded
  // interiors, not the open ground around them.
  const double half_span = 0.52 * extent + 0.1;
  scene.camera.vfov_degrees = 2.0 * std::atan2(half_span, dist) * 180.0 / kPi;
  scene.camera.width = 128;
  scene.camera.height = 128;

  const uint32_t dome_mat = uint32_t(scene.materials.size());
  scene.materials.push_back({Vec3{0, 0, 0}, Vec3{0.035, 0.0425, 0.055}});
  const Vec3 grid_center{extent * 0.5, 0, extent * 0.5};
  // The shell must enclose the camera, or primary rays die on its dark back.
  const double radius = std::max({6.0, 3.0 * extent,
                                  1.3 * length(scene.camera.origin - grid_center)});
  // Ground sits a hair below the box floors so the two never share a plane.
  const double half_ground = 0.95 * radius;
  add_quad(scene,
           grid_center + Vec3{-half_ground, -1e-3, -half_ground},
           grid_center + Vec3{half_ground, -1e-3, -half_ground},
           grid_center + Vec3{half_ground, -1e-3, half_ground},
           grid_center + Vec3{-half_ground, -1e-3, half_ground}, 0);
  append_dome(scene, grid_center, radius, dome_mat, dome_triangles);

  scene.derive_emitters();
  return scene;
}

Scene gen_window_room(int n_windows, uint64_t seed, int dome_triangles) {
  if (n_windows < 1) throw std::invalid_argument("gen_window_room: n_windows must be >= 1");
  (void)seed;  // geometry is fully determined; seed kept for interface parity

  const double W = 4, H = 3, D = 4;
  const double sill = 0.9, header = 2.3;

  Scene scene;
  scene.materials.push_back({Vec3{0.70, 0.70, 0.70}, Vec3{0, 0, 0}});  // 0 walls
  scene.materials.push_back({Vec3{0.55, 0.53, 0.50}, Vec3{0, 0, 0}});  // 1 floor
  // Bright enough that interior pixels land at a normal exposure; the sky is
  // the only light source, seen through the window openings.
  scene.materials.push_back({Vec3{0, 0, 0}, Vec3{18.0, 19.0, 21.0}});  // 2 dome

  // floor and ceiling
  add_quad(scene, {0, 0, 0}, {W, 0, 0}, {W, 0, D}, {0, 0, D}, 1);
  add_quad(scene, {0, H, 0}, {0, H, D}, {W, H, D}, {W, H, 0}, 0);
  // side walls
  add_quad(scene, {0, 0, 0}, {0, 0, D}, {0, H, D}, {0, H, 0}, 0);
  add_quad(scene, {W, 0, 0}, {W, H, 0}, {W, H, D}, {W, 0, D}, 0);
  // back wall (z = D)
  add_quad(scene, {0, 0, D}, {W, 0, D}, {W, H, D}, {0, H, D}, 0);

  // front wall (z = 0) with n window openings
  const double cw = W / n_windows;
  for (int i = 0; i < n_windows; ++i) {
    const double x0 = i * cw;
    const double wx0 = x0 + 0.2 * cw;
    const double wx1 = x0 + 0.8 * cw;
    const double x1 = x0 + cw;
    auto wall_rect = [&](double a, double b, double y0, double y1) {
      if (b - a <= 0 || y1 - y0 <= 0) return;
      add_quad(scene, {a, y0, 0}, {a, y1, 0}, {b, y1, 0}, {b, y0, 0}, 0);
    };
    wall_rect(x0, wx0, 0, H);          // left margin
    wall_rect(wx1, x1, 0, H);          // right margin
    wall_rect(wx0, wx1, 0, sill);      // below opening
    wall_rect(wx0, wx1, header, H);    // above opening
  }

  const Vec3 room_center{W / 2, 0, D / 2};
  append_dome(scene, room_center, 12.0 * std::max(W, D), 2, dome_triangles);

  // Look down from beside the window wall at the floor the sky light lands
  // on. Keeping the openings out of frame keeps pixel error dominated by the
  // light-sampling noise on indirectly lit surfaces rather than by geometric
  // aliasing on the bright opening silhouettes.
  scene.camera.origin = {W / 2, 2.65, 0.3};
  scene.camera.look_at = {W / 2, 0, 2.2};
  scene.camera.up = {0, 1, 0};
  scene.camera.vfov_degrees = 52;
  scene.camera.width = 128;
  scene.camera.height = 128;

  scene.derive_emitters();
  return scene;
}

}  // namespace rlcuts
