// Copyright (c) 2026, the rlcuts authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "rlcuts/bvh.hpp"
#include "rlcuts/cut.hpp"
#include "rlcuts/light_tree.hpp"
#include "rlcuts/scene.hpp"

namespace rlcuts {

enum class SamplerKind {
  uniform,       // every emitter equally likely
  energy,        // proportional to emitted power (luminance x area)
  rl_lightcuts,  // learned per-cell cut distribution
};

struct LightSample {
  uint32_t triangle_id = 0;
  Vec3 point;
  double pdf_light_selection = 0;  // strictly positive for every emitter
  double pdf_area = 0;             // 1 / triangle area
  int32_t cluster_index = -1;      // learned sampler only
  double pdf_in_cluster = 1;       // p(l | cluster); 1 for the baselines
};

// Inclusive prefix sum of emitter energies.
std::vector<double> build_energy_cdf(const std::vector<EmitterRecord>& emitters);

// Immutable per-scene sampling state shared by all samplers.
struct SamplerContext {
  const Scene* scene = nullptr;
  const std::vector<EmitterRecord>* emitters = nullptr;
  const LightTree* tree = nullptr;
  const std::vector<double>* energy_cdf = nullptr;
};

// Draws one emitter and a point on it. Uniform: 1/N per emitter. Energy:
// proportional to emitter energy. Learned: a cluster from the cell's cut,
// then a light uniformly inside the cluster; u1 is rescaled after the
// cluster search and reused for the intra-cluster pick, so three uniforms
// drive every sampler. cell_cut is required for the learned sampler and
// ignored otherwise.
LightSample sample_light(const SamplerContext& ctx, SamplerKind kind,
                         const Cut* cell_cut, double u1, double u2, double u3);

struct ShadingPoint {
  Vec3 position;
  Vec3 normal;  // unit, on the viewer's side
  Vec3 albedo;  // Lambertian reflectance
};

struct NeeResult {
  Vec3 radiance;  // contribution * V / (pdf_light_selection * pdf_area)
  double v = 0;   // feedback value for the learned sampler
};

// Single next-event estimate: unshadowed contribution f_r * L_e * G with
// G = cos_x * cos_y / d^2, zeroed for back-facing configurations, visibility
// by shadow ray. Degenerate geometry (d near zero) yields zero, not an error.
// The feedback v divides the intra-cluster pick pdf and the area pdf out of
// the sampled luminance, so Q tracks the cluster's total contribution.
NeeResult nee_estimate(const Scene& scene, const SceneAccel& accel,
                       const ShadingPoint& sp, const LightSample& sample);

}  // namespace rlcuts
