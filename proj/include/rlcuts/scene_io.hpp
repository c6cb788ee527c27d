// Copyright (c) 2026, the rlcuts authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

#include "rlcuts/scene.hpp"

namespace rlcuts {

enum class SceneIoErrc {
  io_error,      // file missing / unreadable / unwritable
  parse_error,   // not valid JSON
  schema_error,  // valid JSON, wrong shape
  no_emitters,   // well-formed scene without any emissive triangle
};

class SceneIoError : public std::runtime_error {
 public:
  SceneIoError(SceneIoErrc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  SceneIoErrc code() const { return code_; }

 private:
  SceneIoErrc code_;
};

// JSON scene document: top-level keys "materials" ({albedo, emission}),
// "triangles" ({p0, p1, p2, material}) and "camera" ({origin, look_at, up,
// vfov_degrees, width, height}); all numbers IEEE doubles.
Scene load_scene(const std::string& path);
void save_scene(const Scene& scene, const std::string& path);

}  // namespace rlcuts
