// Copyright (c) 2026, the rlcuts authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "rlcuts/scene.hpp"

namespace rlcuts {

// Occlusion benchmark: a k x k grid of open-top five-walled boxes, each lit by
// its own two-triangle area light hanging near the top, plus one large dim
// emissive sky dome above the whole grid. Walls make every box light invisible
// from every other box interior.
//
// Material layout: 0 = white walls, 1 = red wall, 2 = green wall,
// 3 .. 3+k*k-1 = per-box lights, last = dome.
// dome_triangles is rounded to the nearest 8*4^s (8, 32, 128, 512, 2048, ...).
Scene gen_cornell_grid(int k, uint64_t seed, int dome_triangles = 512);

// Sky-through-openings benchmark: a closed box room whose front wall has
// n_windows rectangular openings; the only light is a uniform emissive dome
// outside, far enough to be approximately equidistant from all interior
// points.
//
// Material layout: 0 = walls/ceiling (includes the windowed wall), 1 = floor,
// 2 = dome. Throws std::invalid_argument when n_windows < 1.
Scene gen_window_room(int n_windows, uint64_t seed, int dome_triangles = 512);

// Upper-hemisphere shell of subdivided triangles with inward-facing normals.
// Returns the actual triangle count appended (8 * 4^s closest to requested).
int append_dome(Scene& scene, const Vec3& center, double radius,
                uint32_t material_id, int requested_triangles);

}  // namespace rlcuts
