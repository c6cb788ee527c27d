// Copyright (c) 2026, the rlcuts authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "rlcuts/light_tree.hpp"

namespace rlcuts {

enum class AlphaSchedule {
  fixed,     // constant learning rate
  harmonic,  // 1/(1 + visit count); Q becomes the running sample mean
};

struct CutConfig {
  uint32_t cut_size = 128;       // M; clamped to the light count
  double alpha = 0.2;            // learning rate in (0, 1]
  double split_threshold = 4.0;  // T
  double eps_q = -1;             // probability floor; < 0 resolves to 1e-4 / M
  uint32_t iterations = 1;       // split-collapse repeats per pass
  AlphaSchedule alpha_schedule = AlphaSchedule::fixed;
};

// A fixed-size cut through the reference light tree. The cut leaves partition
// the sorted light array into contiguous clusters; q is the learned value
// table and cdf its inclusive prefix sum.
struct Cut {
  std::vector<uint32_t> node_ids;  // left-to-right leaf order
  std::vector<uint32_t> ends;      // strictly increasing cluster end indices
  std::vector<double> q;
  std::vector<double> cdf;
  std::vector<uint32_t> visits;  // per-cluster update counts (harmonic schedule)
  double eps_q = 0;

  uint32_t size() const { return uint32_t(node_ids.size()); }
  uint32_t cluster_begin(uint32_t i) const { return i == 0 ? 0 : ends[i - 1]; }
  uint32_t cluster_end(uint32_t i) const { return ends[i]; }
  uint32_t cluster_size(uint32_t i) const { return cluster_end(i) - cluster_begin(i); }
};

// Breadth-first frontier of min(M, N) nodes; q seeded from node energies
// normalized to unit total, floored by eps_q; cdf rebuilt.
Cut init_cut(const LightTree& tree, uint32_t M, double eps_q = -1);

// Exponential moving average toward the observed value v, floored by
// cut.eps_q. Deliberately leaves cdf untouched; the cdf is rebuilt at the
// rendering pass barrier.
void update_q(Cut& cut, uint32_t s, double v, const CutConfig& config);

// cdf[s] = inclusive prefix sum of q.
void rebuild_cdf(Cut& cut);

struct ClusterSample {
  uint32_t index = 0;
  double p = 0;  // q[index] / cdf total
};

// Binary search of target = u * cdf total; picks the smallest s with
// target < cdf[s].
ClusterSample sample_cluster(const Cut& cut, double u);

// Mass of every proper ancestor of any cut leaf: the sum of q over the cut
// leaves inside its subtree. Root mass equals the q total for cuts of
// size >= 2.
std::unordered_map<uint32_t, double> parent_masses(const Cut& cut, const LightTree& tree);

// One split-collapse adaptation round per iteration: split the highest-q
// splittable leaf, collapse the lowest-mass collapsible parent outside the
// split leaf's ancestor chain, when q[l_max] > T * mass(p_min). Keeps the
// leaf count and the total q mass; rebuilds ends and cdf. Returns the number
// of applied split-collapse pairs.
uint32_t split_collapse(Cut& cut, const LightTree& tree, double threshold,
                        uint32_t iterations);

// Checks the structural Cut invariants; cdf-vs-q consistency is only checked
// when check_cdf_current is set (update_q legitimately leaves cdf stale).
bool validate_cut(const Cut& cut, const LightTree& tree, bool check_cdf_current,
                  std::string* why = nullptr);

// One line per leaf: `node_id end q cdf`.
void dump_cut(const Cut& cut, std::ostream& out);

}  // namespace rlcuts
