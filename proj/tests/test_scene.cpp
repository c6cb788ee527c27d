// Copyright (c) 2026, the rlcuts authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "doctest.h"
#include "rlcuts/bvh.hpp"
#include "rlcuts/rng.hpp"
#include "rlcuts/scene.hpp"
#include "rlcuts/scene_gen.hpp"
#include "rlcuts/scene_io.hpp"

using namespace rlcuts;

namespace {

// Closest hit by exhaustive loop; the oracle the BVH must agree with.
std::optional<Hit> brute_force_intersect(const Scene& scene, const Ray& ray) {
  std::optional<Hit> best;
  double closest = ray.t_max;
  for (uint32_t i = 0; i < scene.triangles.size(); ++i) {
    double t = 0;
    if (intersect_triangle(scene.triangles[i], ray, closest, &t) && t > ray.t_min) {
      closest = t;
      Hit hit;
      hit.t = t;
      hit.position = ray.origin + ray.dir * t;
      hit.geometric_normal = triangle_normal(scene.triangles[i]);
      hit.triangle_id = i;
      best = hit;
    }
  }
  return best;
}

bool brute_force_occluded(const Scene& scene, const Vec3& a, const Vec3& b,
                          double eps) {
  const Vec3 d = b - a;
  const double dist = length(d);
  if (dist <= 2 * eps) return false;
  Ray ray;
  ray.origin = a;
  ray.dir = d / dist;
  ray.t_min = eps;
  for (const Triangle& tri : scene.triangles) {
    double t = 0;
    if (intersect_triangle(tri, ray, dist - eps, &t) && t > ray.t_min) return true;
  }
  return false;
}

Scene random_soup(int count, uint64_t seed, double extent, double tri_size) {
  Scene scene;
  scene.materials.push_back({Vec3{0.5, 0.5, 0.5}, Vec3{0, 0, 0}});
  scene.materials.push_back({Vec3{0, 0, 0}, Vec3{1, 1, 1}});
  RandomSequence rng(seed, 0);
  for (int i = 0; i < count; ++i) {
    const Vec3 base{extent * rng.next(), extent * rng.next(), extent * rng.next()};
    const Vec3 e1{tri_size * (rng.next() - 0.5), tri_size * (rng.next() - 0.5),
                  tri_size * (rng.next() - 0.5)};
    const Vec3 e2{tri_size * (rng.next() - 0.5), tri_size * (rng.next() - 0.5),
                  tri_size * (rng.next() - 0.5)};
    scene.triangles.push_back({base, base + e1, base + e2, i % 2 == 0 ? 0u : 1u});
  }
  scene.derive_emitters();
  return scene;
}

uint32_t dome_material_of(const Scene& scene) {
  return uint32_t(scene.materials.size()) - 1;
}

}  // namespace

TEST_CASE("triangle helper functions") {
  const Triangle tri{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, 0};
  CHECK(triangle_area(tri) == doctest::Approx(0.5));
  CHECK(triangle_normal(tri) == Vec3{0, 0, 1});
  const Vec3 c = triangle_centroid(tri);
  CHECK(c.x == doctest::Approx(1.0 / 3.0));
  CHECK(c.y == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("camera ray through the image center points at look_at") {
  Camera cam;
  cam.origin = {1, 2, 3};
  cam.look_at = {4, 5, 9};
  cam.width = 64;
  cam.height = 32;
  const Ray ray = camera_ray(cam, 32.0, 16.0);
  const Vec3 expect = normalize(cam.look_at - cam.origin);
  CHECK(length(ray.dir - expect) < 1e-12);
  CHECK(ray.origin == cam.origin);
  // py grows downward: a smaller py must tilt the ray toward +up.
  const Ray upper = camera_ray(cam, 32.0, 4.0);
  const Vec3 w = normalize(cam.origin - cam.look_at);
  const Vec3 v = cross(w, normalize(cross(cam.up, w)));
  CHECK(dot(upper.dir, v) > dot(ray.dir, v));
}

TEST_CASE("sample_triangle_point corners, pdf and centroid") {
  const Triangle tri{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, 0};

  SUBCASE("u = (0,0) maps to p0 with pdf 1/area") {
    const TrianglePointSample s = sample_triangle_point(tri, 0, 0);
    CHECK(length(s.point - tri.p0) < 1e-12);
    CHECK(s.pdf == doctest::Approx(2.0));  // area 0.5
  }

  SUBCASE("sample centroid converges to the triangle centroid") {
    RandomSequence rng(5, 0);
    Vec3 mean{};
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
      const TrianglePointSample s = sample_triangle_point(tri, rng.next(), rng.next());
      CHECK(s.point.x >= -1e-12);
      CHECK(s.point.y >= -1e-12);
      CHECK(s.point.x + s.point.y <= 1.0 + 1e-12);
      mean += s.point;
    }
    mean = mean / draws;
    const Vec3 c = triangle_centroid(tri);
    CHECK(length(mean - c) < 0.01 * length(c));
  }

  SUBCASE("degenerate triangle is rejected") {
    const Triangle line{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, 0};
    CHECK_THROWS_AS(sample_triangle_point(line, 0.5, 0.5), std::invalid_argument);
  }
}

TEST_CASE("bvh single triangle and miss") {
  Scene scene;
  scene.materials.push_back({Vec3{0.5, 0.5, 0.5}, Vec3{0, 0, 0}});
  scene.triangles.push_back({{-1, -1, 5}, {1, -1, 5}, {0, 1, 5}, 0});
  scene.derive_emitters();
  const SceneAccel accel = build_scene_bvh(scene);

  Ray ray;
  ray.origin = {0, 0, 0};
  ray.dir = normalize(triangle_centroid(scene.triangles[0]) - ray.origin);
  const auto hit = intersect(accel, ray);
  REQUIRE(hit.has_value());
  CHECK(hit->triangle_id == 0);

  Ray miss;
  miss.origin = {0, 0, 0};
  miss.dir = {0, 0, -1};
  CHECK_FALSE(intersect(accel, miss).has_value());
}

TEST_CASE("bvh axis-aligned quad at z=1 and the t_min epsilon contract") {
  Scene scene;
  scene.materials.push_back({Vec3{0.5, 0.5, 0.5}, Vec3{0, 0, 0}});
  scene.triangles.push_back({{-1, -1, 1}, {1, -1, 1}, {1, 1, 1}, 0});
  scene.triangles.push_back({{-1, -1, 1}, {1, 1, 1}, {-1, 1, 1}, 0});
  scene.derive_emitters();
  const SceneAccel accel = build_scene_bvh(scene);

  Ray ray;
  ray.origin = {0, 0, 0};
  ray.dir = {0, 0, 1};
  const auto hit = intersect(accel, ray);
  REQUIRE(hit.has_value());
  CHECK(hit->t == doctest::Approx(1.0));

  // Origin on the surface: t_min keeps the ray from hitting its own surface.
  Ray leaving;
  leaving.origin = hit->position;
  leaving.dir = {0, 0, 1};
  leaving.t_min = 1e-4;
  CHECK_FALSE(intersect(accel, leaving).has_value());
}

TEST_CASE("bvh agrees with the brute-force loop on a 10k random soup") {
  const Scene scene = random_soup(10000, 31, 10.0, 0.8);
  const SceneAccel accel = build_scene_bvh(scene);
  RandomSequence rng(77, 1);
  int hits = 0;
  for (int i = 0; i < 1000; ++i) {
    Ray ray;
    ray.origin = {10.0 * rng.next(), 10.0 * rng.next(), 10.0 * rng.next()};
    ray.dir = sample_uniform_sphere(rng.next(), rng.next());
    const auto fast = intersect(accel, ray);
    const auto slow = brute_force_intersect(scene, ray);
    REQUIRE(fast.has_value() == slow.has_value());
    if (fast) {
      ++hits;
      CHECK(fast->triangle_id == slow->triangle_id);
      CHECK(fast->t == doctest::Approx(slow->t).epsilon(1e-5));
    }
  }
  CHECK(hits > 500);  // the soup is dense; most rays should hit something
}

TEST_CASE("occluded trivial cases") {
  Scene scene;
  scene.materials.push_back({Vec3{0.5, 0.5, 0.5}, Vec3{0, 0, 0}});
  // A wall spanning x,y in [-2,2] at z=1.
  scene.triangles.push_back({{-2, -2, 1}, {2, -2, 1}, {2, 2, 1}, 0});
  scene.triangles.push_back({{-2, -2, 1}, {2, 2, 1}, {-2, 2, 1}, 0});
  scene.derive_emitters();
  const SceneAccel accel = build_scene_bvh(scene);

  CHECK(occluded(accel, {0, 0, 0}, {0, 0, 2}));        // wall between
  CHECK_FALSE(occluded(accel, {0, 0, 0}, {0, 0, 0.5}));  // stops short
  CHECK_FALSE(occluded(accel, {3, 0, 0}, {3, 0, 2}));    // corridor beside it
}

TEST_CASE("occluded agrees with the brute-force any-hit loop") {
  const Scene scene = random_soup(2000, 13, 6.0, 0.6);
  const SceneAccel accel = build_scene_bvh(scene);
  RandomSequence rng(78, 2);
  int blocked = 0;
  for (int i = 0; i < 2000; ++i) {
    const Vec3 a{6.0 * rng.next(), 6.0 * rng.next(), 6.0 * rng.next()};
    const Vec3 b{6.0 * rng.next(), 6.0 * rng.next(), 6.0 * rng.next()};
    const bool fast = occluded(accel, a, b);
    const bool slow = brute_force_occluded(scene, a, b, accel.shadow_eps);
    CHECK(fast == slow);
    blocked += fast ? 1 : 0;
  }
  CHECK(blocked > 100);
  CHECK(blocked < 2000);
}

TEST_CASE("cornell grid emitter counts") {
  SUBCASE("k=1 has exactly 2 local emitter triangles plus the dome") {
    const Scene scene = gen_cornell_grid(1, 1);
    const uint32_t dome_mat = dome_material_of(scene);
    int local = 0;
    int dome = 0;
    for (uint32_t id : scene.emitter_ids) {
      if (scene.triangles[id].material_id == dome_mat) {
        ++dome;
      } else {
        ++local;
      }
    }
    CHECK(local == 2);
    CHECK(dome == 512);
  }

  SUBCASE("k=4 has 32 local emitter triangles") {
    const Scene scene = gen_cornell_grid(4, 1);
    const uint32_t dome_mat = dome_material_of(scene);
    int local = 0;
    for (uint32_t id : scene.emitter_ids) {
      if (scene.triangles[id].material_id != dome_mat) ++local;
    }
    CHECK(local == 32);
  }

  SUBCASE("k=0 is rejected") {
    CHECK_THROWS_AS(gen_cornell_grid(0, 1), std::invalid_argument);
  }
}

TEST_CASE("cornell grid box lights are mutually occluded") {
  // Light of box (0,0) must contribute zero flux to a probe inside box (3,3):
  // every shadow ray between them is blocked.
  const Scene scene = gen_cornell_grid(4, 1);
  const SceneAccel accel = build_scene_bvh(scene);
  const uint32_t light00_mat = 3;  // first box light in material layout
  std::vector<uint32_t> light_tris;
  for (uint32_t id : scene.emitter_ids) {
    if (scene.triangles[id].material_id == light00_mat) light_tris.push_back(id);
  }
  REQUIRE(light_tris.size() == 2);

  const double pitch = 1.25;
  const Vec3 probe{pitch * 3 + 0.5, 0.4, pitch * 3 + 0.5};
  RandomSequence rng(21, 0);
  for (int i = 0; i < 10000; ++i) {
    const Triangle& tri = scene.triangles[light_tris[i % 2]];
    const TrianglePointSample s = sample_triangle_point(tri, rng.next(), rng.next());
    CHECK(occluded(accel, probe, s.point));
  }
}

TEST_CASE("window room opening fraction") {
  CHECK_THROWS_AS(gen_window_room(0, 1), std::invalid_argument);

  const Scene scene = gen_window_room(3, 1);
  const uint32_t dome_mat = 2;
  const Vec3 probe{2.0, 1.5, 2.0};  // room center; room is 4 x 3 x 4

  // Fraction of uniformly sampled directions whose first hit is the dome.
  const auto dome_fraction = [&](const Scene& s) {
    const SceneAccel accel = build_scene_bvh(s);
    RandomSequence rng(3, 5);
    int dome_hits = 0;
    const int draws = 20000;
    for (int i = 0; i < draws; ++i) {
      Ray ray;
      ray.origin = probe;
      ray.dir = sample_uniform_sphere(rng.next(), rng.next());
      ray.t_min = 1e-4;
      const auto hit = intersect(accel, ray);
      if (hit && s.triangles[hit->triangle_id].material_id == dome_mat) ++dome_hits;
    }
    return dome_hits / double(draws);
  };

  SUBCASE("closed room: sky visible only through the openings") {
    const double fraction = dome_fraction(scene);
    CHECK(fraction < 0.20);
    CHECK(fraction > 0.005);  // but some sky does get in
  }

  SUBCASE("walls removed: sky fills the upper half space") {
    Scene open = scene;
    open.triangles.clear();
    for (const Triangle& tri : scene.triangles) {
      if (tri.material_id != 0) open.triangles.push_back(tri);  // drop the walls
    }
    open.derive_emitters();
    CHECK(dome_fraction(open) == doctest::Approx(0.5).epsilon(0.1));
  }
}

TEST_CASE("scene json io") {
  const std::string dir = "scene_io_tmp";
  std::filesystem::create_directories(dir);

  SUBCASE("minimal valid file loads to two triangles") {
    const std::string path = dir + "/minimal.json";
    std::ofstream out(path);
    out << R"({
      "materials": [{"albedo": [0, 0, 0], "emission": [5, 5, 5]}],
      "triangles": [
        {"p0": [0, 0, 0], "p1": [1, 0, 0], "p2": [1, 1, 0], "material": 0},
        {"p0": [0, 0, 0], "p1": [1, 1, 0], "p2": [0, 1, 0], "material": 0}
      ],
      "camera": {"origin": [0, 0, -3], "look_at": [0.5, 0.5, 0], "up": [0, 1, 0],
                 "vfov_degrees": 40, "width": 32, "height": 32}
    })";
    out.close();
    const Scene scene = load_scene(path);
    CHECK(scene.triangles.size() == 2);
    CHECK(scene.emitter_ids.size() == 2);
    CHECK(scene.camera.width == 32);
  }

  SUBCASE("missing camera block is a schema error") {
    const std::string path = dir + "/no_camera.json";
    std::ofstream out(path);
    out << R"({"materials": [{"albedo": [0,0,0], "emission": [1,1,1]}],
               "triangles": [{"p0": [0,0,0], "p1": [1,0,0], "p2": [0,1,0], "material": 0}]})";
    out.close();
    try {
      load_scene(path);
      FAIL("expected SceneIoError");
    } catch (const SceneIoError& e) {
      CHECK(e.code() == SceneIoErrc::schema_error);
    }
  }

  SUBCASE("invalid json is a parse error") {
    const std::string path = dir + "/broken.json";
    std::ofstream out(path);
    out << "{ not json";
    out.close();
    try {
      load_scene(path);
      FAIL("expected SceneIoError");
    } catch (const SceneIoError& e) {
      CHECK(e.code() == SceneIoErrc::parse_error);
    }
  }

  SUBCASE("missing file is an io error") {
    try {
      load_scene(dir + "/does_not_exist.json");
      FAIL("expected SceneIoError");
    } catch (const SceneIoError& e) {
      CHECK(e.code() == SceneIoErrc::io_error);
    }
  }

  SUBCASE("a scene without emitters is rejected") {
    const std::string path = dir + "/dark.json";
    std::ofstream out(path);
    out << R"({
      "materials": [{"albedo": [0.5, 0.5, 0.5], "emission": [0, 0, 0]}],
      "triangles": [{"p0": [0, 0, 0], "p1": [1, 0, 0], "p2": [0, 1, 0], "material": 0}],
      "camera": {"origin": [0, 0, -3], "look_at": [0, 0, 0], "up": [0, 1, 0],
                 "vfov_degrees": 40, "width": 8, "height": 8}
    })";
    out.close();
    try {
      load_scene(path);
      FAIL("expected SceneIoError");
    } catch (const SceneIoError& e) {
      CHECK(e.code() == SceneIoErrc::no_emitters);
    }
  }

  SUBCASE("generate, save, load round trip") {
    const Scene original = gen_cornell_grid(2, 9);
    const std::string path = dir + "/cornell2.json";
    save_scene(original, path);
    const Scene loaded = load_scene(path);
    REQUIRE(loaded.triangles.size() == original.triangles.size());
    CHECK(loaded.emitter_ids == original.emitter_ids);
    CHECK(loaded.materials.size() == original.materials.size());
    for (size_t i = 0; i < original.triangles.size(); ++i) {
      CHECK(length(loaded.triangles[i].p0 - original.triangles[i].p0) < 1e-12);
      CHECK(loaded.triangles[i].material_id == original.triangles[i].material_id);
    }
    CHECK(length(loaded.camera.origin - original.camera.origin) < 1e-12);
  }
}
