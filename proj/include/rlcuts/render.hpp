// Copyright (c) 2026, the rlcuts authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "rlcuts/bvh.hpp"
#include "rlcuts/estimators.hpp"
#include "rlcuts/hash_grid.hpp"
#include "rlcuts/image.hpp"

namespace rlcuts {

struct RenderConfig {
  uint32_t spp = 16;    // total samples per pixel across all passes
  uint32_t passes = 4;  // spp must be divisible by passes
  uint32_t max_depth = 1;
  SamplerKind sampler = SamplerKind::uniform;
  CutConfig cut;
  HashConfig hash;
  uint64_t seed = 1;
  uint32_t workers = 1;
};

// Immutable per-scene render state. Holds a pointer to the scene, which must
// outlive the context.
struct RenderContext {
  const Scene* scene = nullptr;
  SceneAccel accel;
  std::vector<EmitterRecord> emitters;
  LightTree tree;
  std::vector<double> energy_cdf;
  double base_tile = 0;  // resolved: config value, or scene diagonal / 256
};

RenderContext build_context(const Scene& scene, const RenderConfig& config);

// One rendering pass: (spp / passes) camera paths per pixel, one next-event
// estimate per path vertex. The learned sampler resolves a hash cell per
// vertex, samples under the cell lock, applies update_q online, and marks
// the cell touched. grid may be null for the baseline samplers. Pixels are
// striped across workers; per-pixel counter-based streams keep the sample
// sequence independent of scheduling.
void render_pass(const RenderContext& ctx, const RenderConfig& config,
                 uint32_t pass_index, HashGrid* grid, Framebuffer& framebuffer);

// Pass-barrier learning step: split_collapse then rebuild_cdf on every
// touched cell, touched flags cleared. Returns the number of applied
// split-collapse pairs.
uint32_t end_of_pass_update(HashGrid& grid, const LightTree& tree,
                            const CutConfig& config, uint32_t workers = 1);

struct RenderResult {
  Image image;
  double wall_ms = 0;
  uint32_t occupied_cells = 0;
  uint64_t lookups = 0;
  uint64_t fallback_hits = 0;
  std::vector<double> pass_mse;       // vs the reference; empty without one
  std::vector<uint32_t> sc_changes;   // split-collapse pairs applied per pass
};

// Full multi-pass frame under the configured sampler. When a reference image
// is given, the accumulated image is scored against it after every pass.
RenderResult render_frame(const RenderContext& ctx, const RenderConfig& config,
                          const Image* reference = nullptr);

}  // namespace rlcuts
