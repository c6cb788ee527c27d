// Copyright (c) 2026, the rlcuts authors.
// SPDX-License-Identifier: Apache-2.0

#include "rlcuts/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rlcuts {

std::vector<double> build_energy_cdf(const std::vector<EmitterRecord>& emitters) {
  if (emitters.empty()) {
    throw std::invalid_argument("build_energy_cdf: at least one emitter required");
  }
  std::vector<double> cdf(emitters.size());
  double running = 0;
  for (size_t i = 0; i < emitters.size(); ++i) {
    running += emitters[i].energy;
    cdf[i] = running;
  }
  if (!(cdf.back() > 0)) {
    throw std::invalid_argument("build_energy_cdf: total emitter energy must be positive");
  }
  return cdf;
}

LightSample sample_light(const SamplerContext& ctx, SamplerKind kind,
                         const Cut* cell_cut, double u1, double u2, double u3) {
  const std::vector<EmitterRecord>& emitters = *ctx.emitters;
  const uint32_t n = uint32_t(emitters.size());

  LightSample sample;
  uint32_t emitter_index = 0;
  switch (kind) {
    case SamplerKind::uniform: {
      emitter_index = std::min(n - 1, uint32_t(u1 * double(n)));
      sample.pdf_light_selection = 1.0 / double(n);
      break;
    }
    case SamplerKind::energy: {
      const std::vector<double>& cdf = *ctx.energy_cdf;
      const double target = u1 * cdf.back();
      const auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
      emitter_index =
          it == cdf.end() ? n - 1 : uint32_t(it - cdf.begin());
      sample.pdf_light_selection = emitters[emitter_index].energy / cdf.back();
      break;
    }
    case SamplerKind::rl_lightcuts: {
      if (cell_cut == nullptr) {
        throw std::invalid_argument("sample_light: learned sampler needs a cell cut");
      }
      const Cut& cut = *cell_cut;
      const ClusterSample cs = sample_cluster(cut, u1);
      const uint32_t begin = cut.cluster_begin(cs.index);
      const uint32_t size = cut.cluster_size(cs.index);
      // Rescale u1 inside the cluster's cdf step; conditioned on the cluster
      // it is again uniform, so it doubles as the intra-cluster pick.
      const double lo = cs.index == 0 ? 0.0 : cut.cdf[cs.index - 1];
      const double span = cut.cdf[cs.index] - lo;
      const double frac =
          span > 0 ? std::clamp((u1 * cut.cdf.back() - lo) / span, 0.0, 1.0) : 0.0;
      const uint32_t offset = std::min(size - 1, uint32_t(frac * double(size)));
      emitter_index = ctx.tree->order[begin + offset];
      sample.pdf_in_cluster = 1.0 / double(size);
      sample.pdf_light_selection = cs.p * sample.pdf_in_cluster;
      sample.cluster_index = int32_t(cs.index);
      break;
    }
  }

  const EmitterRecord& emitter = emitters[emitter_index];
  sample.triangle_id = emitter.triangle_id;
  const TrianglePointSample point =
      sample_triangle_point(ctx.scene->triangles[emitter.triangle_id], u2, u3);
  sample.point = point.point;
  sample.pdf_area = point.pdf;
  return sample;
}

NeeResult nee_estimate(const Scene& scene, const SceneAccel& accel,
                       const ShadingPoint& sp, const LightSample& sample) {
  NeeResult result;
  Vec3 to_light = sample.point - sp.position;
  const double d2 = dot(to_light, to_light);
  if (d2 < 1e-24) return result;
  const double d = std::sqrt(d2);
  to_light = to_light / d;

  const double cos_x = dot(sp.normal, to_light);
  if (cos_x <= 0) return result;
  const Triangle& tri = scene.triangles[sample.triangle_id];
  const double cos_y = dot(triangle_normal(tri), -to_light);
  if (cos_y <= 0) return result;  // one-sided emitter
  if (occluded(accel, sp.position, sample.point)) return result;

  const Vec3 emission = scene.material_of(sample.triangle_id).emission;
  const double geometry = cos_x * cos_y / d2;
  const Vec3 contribution = sp.albedo * (1.0 / kPi) * emission * geometry;
  result.radiance =
      contribution / (sample.pdf_light_selection * sample.pdf_area);
  result.v =
      luminance(contribution) / (sample.pdf_in_cluster * sample.pdf_area);
  return result;
}

}  // namespace rlcuts
