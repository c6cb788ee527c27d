// Copyright (c) 2026, the rlcuts authors.
// SPDX-License-Identifier: Apache-2.0

#include "rlcuts/scene_io.hpp"

#include <fstream>

#include <json.hpp>

namespace rlcuts {

namespace {

using nlohmann::json;

Vec3 parse_vec3(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() ||
      !j[2].is_number())
    throw SceneIoError(SceneIoErrc::schema_error,
                       std::string(what) + ": expected an array of 3 numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json vec3_to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

}  // namespace

Scene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SceneIoError(SceneIoErrc::io_error, "cannot open " + path);

  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SceneIoError(SceneIoErrc::parse_error, path + ": " + e.what());
  }

  if (!doc.is_object() || !doc.contains("materials") || !doc.contains("triangles") ||
      !doc.contains("camera"))
    throw SceneIoError(SceneIoErrc::schema_error,
                       path + ": missing materials/triangles/camera");

  Scene scene;
  const json& mats = doc["materials"];
  if (!mats.is_array() || mats.empty())
    throw SceneIoError(SceneIoErrc::schema_error, "materials must be a non-empty array");
  for (const json& m : mats) {
    if (!m.is_object() || !m.contains("albedo") || !m.contains("emission"))
      throw SceneIoError(SceneIoErrc::schema_error, "material needs albedo and emission");
    scene.materials.push_back({parse_vec3(m["albedo"], "albedo"),
                               parse_vec3(m["emission"], "emission")});
  }

  const json& tris = doc["triangles"];
  if (!tris.is_array() || tris.empty())
    throw SceneIoError(SceneIoErrc::schema_error, "triangles must be a non-empty array");
  for (const json& t : tris) {
    if (!t.is_object() || !t.contains("p0") || !t.contains("p1") || !t.contains("p2") ||
        !t.contains("material") || !t["material"].is_number_unsigned())
      throw SceneIoError(SceneIoErrc::schema_error, "triangle needs p0/p1/p2/material");
    Triangle tri{parse_vec3(t["p0"], "p0"), parse_vec3(t["p1"], "p1"),
                 parse_vec3(t["p2"], "p2"), t["material"].get<uint32_t>()};
    if (tri.material_id >= scene.materials.size())
      throw SceneIoError(SceneIoErrc::schema_error, "triangle material index out of range");
    scene.triangles.push_back(tri);
  }

  const json& cam = doc["camera"];
  for (const char* key : {"origin", "look_at", "up"})
    if (!cam.contains(key))
      throw SceneIoError(SceneIoErrc::schema_error, std::string("camera needs ") + key);
  if (!cam.contains("vfov_degrees") || !cam["vfov_degrees"].is_number() ||
      !cam.contains("width") || !cam["width"].is_number_integer() ||
      !cam.contains("height") || !cam["height"].is_number_integer())
    throw SceneIoError(SceneIoErrc::schema_error, "camera needs vfov_degrees/width/height");
  scene.camera.origin = parse_vec3(cam["origin"], "camera.origin");
  scene.camera.look_at = parse_vec3(cam["look_at"], "camera.look_at");
  scene.camera.up = parse_vec3(cam["up"], "camera.up");
  scene.camera.vfov_degrees = cam["vfov_degrees"].get<double>();
  scene.camera.width = cam["width"].get<int>();
  scene.camera.height = cam["height"].get<int>();
  if (scene.camera.width < 1 || scene.camera.height < 1)
    throw SceneIoError(SceneIoErrc::schema_error, "camera resolution must be positive");

  scene.derive_emitters();
  if (scene.emitter_ids.empty())
    throw SceneIoError(SceneIoErrc::no_emitters, path + ": scene has no emissive triangle");
  return scene;
}

void save_scene(const Scene& scene, const std::string& path) {
  json doc;
  doc["materials"] = json::array();
  for (const Material& m : scene.materials)
    doc["materials"].push_back(
        {{"albedo", vec3_to_json(m.albedo)}, {"emission", vec3_to_json(m.emission)}});
  doc["triangles"] = json::array();
  for (const Triangle& t : scene.triangles)
    doc["triangles"].push_back({{"p0", vec3_to_json(t.p0)},
                                {"p1", vec3_to_json(t.p1)},
                                {"p2", vec3_to_json(t.p2)},
                                {"material", t.material_id}});
  doc["camera"] = {{"origin", vec3_to_json(scene.camera.origin)},
                   {"look_at", vec3_to_json(scene.camera.look_at)},
                   {"up", vec3_to_json(scene.camera.up)},
                   {"vfov_degrees", scene.camera.vfov_degrees},
                   {"width", scene.camera.width},
                   {"height", scene.camera.height}};

  std::ofstream out(path);
  if (!out) throw SceneIoError(SceneIoErrc::io_error, "cannot write " + path);
  out << doc.dump(2) << "\n";
}

}  // namespace rlcuts
