// Copyright (c) 2026, the rlcuts authors.
// SPDX-License-Identifier: Apache-2.0

#include "rlcuts/render.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "rlcuts/rng.hpp"

namespace rlcuts {

namespace {

// Runs fn(begin, end) over [0, count) split into one contiguous chunk per
// worker; workers <= 1 runs inline.
void parallel_chunks(uint32_t workers, uint32_t count,
                     const std::function<void(uint32_t, uint32_t)>& fn) {
  if (workers <= 1 || count <= 1) {
    fn(0, count);
    return;
  }
  const uint32_t used = std::min(workers, count);
  std::vector<std::thread> threads;
  threads.reserve(used);
  for (uint32_t w = 0; w < used; ++w) {
    const uint32_t begin = uint32_t(uint64_t(count) * w / used);
    const uint32_t end = uint32_t(uint64_t(count) * (w + 1) / used);
    threads.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (std::thread& t : threads) t.join();
}

struct PassRenderer {
  const RenderContext& ctx;
  const RenderConfig& config;
  HashGrid* grid;
  SamplerContext sampler_ctx;
  HashConfig hash;  // base_tile resolved
  double camera_pdf_omega = 0;

  PassRenderer(const RenderContext& c, const RenderConfig& cfg, HashGrid* g)
      : ctx(c), config(cfg), grid(g) {
    sampler_ctx.scene = ctx.scene;
    sampler_ctx.emitters = &ctx.emitters;
    sampler_ctx.tree = &ctx.tree;
    sampler_ctx.energy_cdf = &ctx.energy_cdf;
    hash = config.hash;
    hash.base_tile = ctx.base_tile;
    camera_pdf_omega = 1.0 / pixel_solid_angle(ctx.scene->camera);
  }

  Vec3 trace(uint32_t px, uint32_t py, uint32_t sample_index) const {
    const Camera& cam = ctx.scene->camera;
    const uint64_t pixel_index = uint64_t(py) * uint64_t(cam.width) + px;
    RandomSequence rng(config.seed, pixel_index, sample_index);

    Vec3 radiance{};
    const double jx = rng.next();
    const double jy = rng.next();
    Ray ray = camera_ray(cam, double(px) + jx, double(py) + jy);
    Vec3 throughput{1, 1, 1};
    double pdf_omega = camera_pdf_omega;  // solid-angle density of the current ray

    for (uint32_t depth = 1; depth <= config.max_depth; ++depth) {
      const std::optional<Hit> hit = intersect(ctx.accel, ray);
      if (!hit) break;
      const Vec3 wo = -ray.dir;
      const double cos_facing = dot(hit->geometric_normal, wo);
      const Material& mat = ctx.scene->material_of(hit->triangle_id);
      // Emitters are one-sided; their own glow is credited on primary hits
      // only, so next-event estimation never double-counts it.
      if (depth == 1 && mat.is_emitter() && cos_facing > 0) {
        radiance += mat.emission;
      }

      const Vec3 ns = faceforward(hit->geometric_normal, wo);
      const bool reflective = luminance(mat.albedo) > 0;
      if (reflective) {
        const double cos_in = std::abs(cos_facing);
        const double area_pdf =
            std::max(pdf_omega * cos_in / std::max(hit->t * hit->t, 1e-24), 1e-12);
        const ShadingPoint sp{hit->position, ns, mat.albedo};
        const double u1 = rng.next();
        const double u2 = rng.next();
        const double u3 = rng.next();
        if (config.sampler == SamplerKind::rl_lightcuts) {
          const double ju1 = rng.next();
          const double ju2 = rng.next();
          const uint32_t level = level_for_footprint(area_pdf, hash.base_tile);
          const CellKey key = make_key(hit->position, ns, level, ju1, ju2, hash);
          const CellHandle handle = grid->lookup_or_insert(key);
          Cut& cut = grid->cut(handle);
          SpinLock& lock = grid->cell_lock(handle);
          LightSample sample;
          {
            std::lock_guard<SpinLock> guard(lock);
            sample = sample_light(sampler_ctx, SamplerKind::rl_lightcuts, &cut, u1,
                                  u2, u3);
          }
          // Shadow ray outside the cell lock.
          const NeeResult nee =
              nee_estimate(*ctx.scene, ctx.accel, sp, sample);
          radiance += throughput * nee.radiance;
          if (!handle.is_fallback()) {
            {
              std::lock_guard<SpinLock> guard(lock);
              update_q(cut, uint32_t(sample.cluster_index), nee.v, config.cut);
            }
            grid->mark_touched(handle);
          }
        } else {
          const LightSample sample =
              sample_light(sampler_ctx, config.sampler, nullptr, u1, u2, u3);
          const NeeResult nee =
              nee_estimate(*ctx.scene, ctx.accel, sp, sample);
          radiance += throughput * nee.radiance;
        }
      }

      if (depth == config.max_depth || !reflective) break;
      const double b1 = rng.next();
      const double b2 = rng.next();
      const Vec3 dir = sample_cosine_hemisphere(ns, b1, b2);
      const double cos_theta = dot(ns, dir);
      if (cos_theta <= 0) break;
      throughput = throughput * mat.albedo;  // Lambertian under cosine sampling
      pdf_omega = cos_theta / kPi;
      ray = Ray{hit->position, dir, ctx.accel.shadow_eps, kInf};
    }
    return radiance;
  }
};

}  // namespace

RenderContext build_context(const Scene& scene, const RenderConfig& config) {
  RenderContext ctx;
  ctx.scene = &scene;
  ctx.accel = build_scene_bvh(scene);
  ctx.emitters = collect_emitters(scene);
  if (ctx.emitters.empty()) {
    throw std::invalid_argument("build_context: scene has no emitters");
  }
  ctx.tree = build_light_tree(ctx.emitters, emitter_centroid_bounds(ctx.emitters));
  ctx.energy_cdf = build_energy_cdf(ctx.emitters);
  ctx.base_tile = config.hash.base_tile > 0
                      ? config.hash.base_tile
                      : ctx.accel.scene_bounds.diagonal() / 256.0;
  return ctx;
}

void render_pass(const RenderContext& ctx, const RenderConfig& config,
                 uint32_t pass_index, HashGrid* grid, Framebuffer& framebuffer) {
  if (config.passes == 0 || config.spp % config.passes != 0) {
    throw std::invalid_argument("render_pass: spp must be divisible by passes");
  }
  if (config.sampler == SamplerKind::rl_lightcuts && grid == nullptr) {
    throw std::invalid_argument("render_pass: learned sampler needs a hash grid");
  }
  const uint32_t spp_per_pass = config.spp / config.passes;
  const PassRenderer renderer(ctx, config, grid);
  const uint32_t height = uint32_t(ctx.scene->camera.height);
  const uint32_t width = uint32_t(ctx.scene->camera.width);

  parallel_chunks(config.workers, height, [&](uint32_t row_begin, uint32_t row_end) {
    for (uint32_t py = row_begin; py < row_end; ++py) {
      for (uint32_t px = 0; px < width; ++px) {
        for (uint32_t s = 0; s < spp_per_pass; ++s) {
          const uint32_t sample_index = pass_index * spp_per_pass + s;
          framebuffer.add_sample(int(px), int(py),
                                 renderer.trace(px, py, sample_index));
        }
      }
    }
  });
}

uint32_t end_of_pass_update(HashGrid& grid, const LightTree& tree,
                            const CutConfig& config, uint32_t workers) {
  const std::vector<uint32_t> touched = grid.touched_slots();
  std::atomic<uint32_t> changes{0};
  parallel_chunks(workers, uint32_t(touched.size()), [&](uint32_t begin, uint32_t end) {
    for (uint32_t i = begin; i < end; ++i) {
      Cut& cut = grid.cut(CellHandle{touched[i]});
      changes.fetch_add(
          split_collapse(cut, tree, config.split_threshold, config.iterations),
          std::memory_order_relaxed);
      rebuild_cdf(cut);
    }
  });
  grid.clear_touched();
  return changes.load();
}

RenderResult render_frame(const RenderContext& ctx, const RenderConfig& config,
                          const Image* reference) {
  if (config.passes == 0 || config.spp == 0 || config.spp % config.passes != 0) {
    throw std::invalid_argument("render_frame: spp must be divisible by passes");
  }
  const auto t0 = std::chrono::steady_clock::now();
  Framebuffer framebuffer(ctx.scene->camera.width, ctx.scene->camera.height);

  std::unique_ptr<HashGrid> grid;
  if (config.sampler == SamplerKind::rl_lightcuts) {
    HashConfig hash = config.hash;
    hash.base_tile = ctx.base_tile;
    grid = std::make_unique<HashGrid>(
        hash, init_cut(ctx.tree, config.cut.cut_size, config.cut.eps_q));
  }

  RenderResult result;
  for (uint32_t pass = 0; pass < config.passes; ++pass) {
    render_pass(ctx, config, pass, grid.get(), framebuffer);
    uint32_t changes = 0;
    if (grid) {
      changes = end_of_pass_update(*grid, ctx.tree, config.cut, config.workers);
    }
    result.sc_changes.push_back(changes);
    if (reference != nullptr) {
      result.pass_mse.push_back(mse(framebuffer.resolve(), *reference));
    }
  }
  result.image = framebuffer.resolve();
  result.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  if (grid) {
    result.occupied_cells = grid->occupied_count();
    result.lookups = grid->lookup_count();
    result.fallback_hits = grid->fallback_hits();
  }
  return result;
}

}  // namespace rlcuts
