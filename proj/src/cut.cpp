// Copyright (c) 2026, the rlcuts authors.
// SPDX-License-Identifier: Apache-2.0

#include "rlcuts/cut.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace rlcuts {

namespace {

void rebuild_ends(Cut& cut, const LightTree& tree) {
  cut.ends.resize(cut.node_ids.size());
  for (size_t i = 0; i < cut.node_ids.size(); ++i) {
    cut.ends[i] = tree.nodes[cut.node_ids[i]].range_end;
  }
}

}  // namespace

Cut init_cut(const LightTree& tree, uint32_t M, double eps_q) {
  if (M == 0) throw std::invalid_argument("init_cut: cut size must be positive");
  const uint32_t n = tree.light_count();
  const uint32_t target = std::min(M, n);

  // Breadth-first expansion from the root; leaves retire from the queue,
  // internal nodes trade themselves for their two children until the
  // frontier holds exactly `target` nodes.
  std::deque<uint32_t> queue{uint32_t(tree.root)};
  std::vector<uint32_t> frontier;
  uint32_t count = 1;
  while (count < target && !queue.empty()) {
    const uint32_t id = queue.front();
    queue.pop_front();
    const LightTreeNode& node = tree.nodes[id];
    if (tree.is_leaf(id)) {
      frontier.push_back(id);
    } else {
      queue.push_back(uint32_t(node.left));
      queue.push_back(uint32_t(node.right));
      ++count;
    }
  }
  frontier.insert(frontier.end(), queue.begin(), queue.end());
  std::sort(frontier.begin(), frontier.end(), [&](uint32_t a, uint32_t b) {
    return tree.nodes[a].range_begin < tree.nodes[b].range_begin;
  });

  Cut cut;
  cut.node_ids = std::move(frontier);
  cut.eps_q = eps_q < 0 ? 1e-4 / double(cut.node_ids.size()) : eps_q;
  rebuild_ends(cut, tree);

  double total = 0;
  for (uint32_t id : cut.node_ids) total += tree.nodes[id].energy;
  cut.q.resize(cut.node_ids.size());
  for (size_t i = 0; i < cut.node_ids.size(); ++i) {
    const double e = tree.nodes[cut.node_ids[i]].energy;
    const double share = total > 0 ? e / total : 1.0 / double(cut.node_ids.size());
    cut.q[i] = std::max(share, cut.eps_q);
  }
  // The energy-derived init counts as one observation; starting visits at 1
  // makes the first harmonic update a blend (a = 1/2) instead of a wholesale
  // replacement, so a single occluded draw cannot erase the prior.
  cut.visits.assign(cut.node_ids.size(), 1);
  rebuild_cdf(cut);
  return cut;
}

void update_q(Cut& cut, uint32_t s, double v, const CutConfig& config) {
  if (s >= cut.size()) throw std::out_of_range("update_q: cluster index out of range");
  if (!(v >= 0) || !std::isfinite(v)) {
    throw std::invalid_argument("update_q: value must be finite and non-negative");
  }
  const double a = config.alpha_schedule == AlphaSchedule::harmonic
                       ? 1.0 / (1.0 + double(cut.visits[s]))
                       : config.alpha;
  cut.q[s] = std::max((1.0 - a) * cut.q[s] + a * v, cut.eps_q);
  ++cut.visits[s];
}

void rebuild_cdf(Cut& cut) {
  cut.cdf.resize(cut.q.size());
  double running = 0;
  for (size_t i = 0; i < cut.q.size(); ++i) {
    running += cut.q[i];
    cut.cdf[i] = running;
  }
}

ClusterSample sample_cluster(const Cut& cut, double u) {
  const double total = cut.cdf.back();
  const double target = u * total;
  // Smallest s with target < cdf[s]; the q floor keeps every step positive,
  // so each cluster owns a non-empty interval.
  const auto it = std::upper_bound(cut.cdf.begin(), cut.cdf.end(), target);
  const uint32_t s =
      it == cut.cdf.end() ? uint32_t(cut.cdf.size() - 1) : uint32_t(it - cut.cdf.begin());
  return ClusterSample{s, cut.q[s] / total};
}

std::unordered_map<uint32_t, double> parent_masses(const Cut& cut, const LightTree& tree) {
  std::unordered_map<uint32_t, double> masses;
  for (size_t i = 0; i < cut.node_ids.size(); ++i) {
    for (int32_t p = tree.nodes[cut.node_ids[i]].parent; p >= 0;
         p = tree.nodes[p].parent) {
      masses[uint32_t(p)] += cut.q[i];
    }
  }
  return masses;
}

uint32_t split_collapse(Cut& cut, const LightTree& tree, double threshold,
                        uint32_t iterations) {
  uint32_t changes = 0;
  for (uint32_t round = 0; round < iterations; ++round) {
    // Highest-q leaf that is splittable: internal in the tree, and with
    // enough mass that both halves stay above the probability floor.
    int split_at = -1;
    for (size_t i = 0; i < cut.node_ids.size(); ++i) {
      if (tree.is_leaf(cut.node_ids[i])) continue;
      if (cut.q[i] * 0.5 < cut.eps_q) continue;
      if (split_at < 0 || cut.q[i] > cut.q[size_t(split_at)]) split_at = int(i);
    }
    if (split_at < 0) break;

    std::unordered_set<uint32_t> split_ancestors;
    for (int32_t p = tree.nodes[cut.node_ids[size_t(split_at)]].parent; p >= 0;
         p = tree.nodes[p].parent) {
      split_ancestors.insert(uint32_t(p));
    }

    // Lowest-mass collapsible pair: adjacent cut leaves sharing a tree
    // parent, with the parent outside the split leaf's ancestor chain.
    int collapse_at = -1;
    double collapse_mass = 0;
    for (size_t i = 0; i + 1 < cut.node_ids.size(); ++i) {
      const int32_t pa = tree.nodes[cut.node_ids[i]].parent;
      if (pa < 0 || pa != tree.nodes[cut.node_ids[i + 1]].parent) continue;
      if (split_ancestors.count(uint32_t(pa))) continue;
      const double mass = cut.q[i] + cut.q[i + 1];
      if (collapse_at < 0 || mass < collapse_mass) {
        collapse_at = int(i);
        collapse_mass = mass;
      }
    }
    if (collapse_at < 0) break;
    if (!(cut.q[size_t(split_at)] > threshold * collapse_mass)) break;

    std::vector<uint32_t> node_ids;
    std::vector<double> q;
    std::vector<uint32_t> visits;
    node_ids.reserve(cut.node_ids.size());
    q.reserve(cut.q.size());
    visits.reserve(cut.visits.size());
    for (size_t i = 0; i < cut.node_ids.size(); ++i) {
      if (int(i) == split_at) {
        const LightTreeNode& node = tree.nodes[cut.node_ids[i]];
        node_ids.push_back(uint32_t(node.left));
        node_ids.push_back(uint32_t(node.right));
        q.push_back(cut.q[i] * 0.5);
        q.push_back(cut.q[i] * 0.5);
        visits.push_back(cut.visits[i]);
        visits.push_back(cut.visits[i]);
      } else if (int(i) == collapse_at) {
        node_ids.push_back(uint32_t(tree.nodes[cut.node_ids[i]].parent));
        q.push_back(cut.q[i] + cut.q[i + 1]);
        visits.push_back(cut.visits[i] + cut.visits[i + 1]);
        ++i;
      } else {
        node_ids.push_back(cut.node_ids[i]);
        q.push_back(cut.q[i]);
        visits.push_back(cut.visits[i]);
      }
    }
    cut.node_ids = std::move(node_ids);
    cut.q = std::move(q);
    cut.visits = std::move(visits);
    rebuild_ends(cut, tree);
    rebuild_cdf(cut);
    ++changes;
  }
  return changes;
}

bool validate_cut(const Cut& cut, const LightTree& tree, bool check_cdf_current,
                  std::string* why) {
  const auto fail = [&](const std::string& reason) {
    if (why) *why = reason;
    return false;
  };
  const size_t m = cut.node_ids.size();
  if (m == 0) return fail("empty cut");
  if (cut.ends.size() != m || cut.q.size() != m || cut.cdf.size() != m ||
      cut.visits.size() != m) {
    return fail("array sizes disagree");
  }
  uint32_t prev_end = 0;
  for (size_t i = 0; i < m; ++i) {
    if (cut.node_ids[i] >= tree.nodes.size()) return fail("node id out of range");
    const LightTreeNode& node = tree.nodes[cut.node_ids[i]];
    if (node.range_begin != prev_end) {
      std::ostringstream os;
      os << "cluster " << i << " begins at " << node.range_begin << ", expected "
         << prev_end;
      return fail(os.str());
    }
    if (node.range_end != cut.ends[i]) return fail("ends disagree with tree ranges");
    if (node.range_end <= node.range_begin) return fail("empty cluster");
    prev_end = node.range_end;
  }
  if (prev_end != tree.light_count()) return fail("cut does not cover all lights");
  for (size_t i = 0; i < m; ++i) {
    if (!(cut.q[i] >= cut.eps_q) || !std::isfinite(cut.q[i])) {
      return fail("q below floor or not finite");
    }
  }
  double prev_cdf = 0;
  for (size_t i = 0; i < m; ++i) {
    if (!(cut.cdf[i] >= prev_cdf)) return fail("cdf not non-decreasing");
    prev_cdf = cut.cdf[i];
  }
  if (!(cut.cdf.back() > 0)) return fail("cdf total not positive");
  if (check_cdf_current) {
    double running = 0;
    for (size_t i = 0; i < m; ++i) {
      running += cut.q[i];
      const double tol = 1e-12 * std::max(1.0, std::abs(running));
      if (std::abs(cut.cdf[i] - running) > tol) return fail("cdf out of date");
    }
  }
  if (why) why->clear();
  return true;
}

void dump_cut(const Cut& cut, std::ostream& out) {
  for (size_t i = 0; i < cut.node_ids.size(); ++i) {
    out << cut.node_ids[i] << ' ' << cut.ends[i] << ' ' << cut.q[i] << ' '
        << cut.cdf[i] << '\n';
  }
}

}  // namespace rlcuts
