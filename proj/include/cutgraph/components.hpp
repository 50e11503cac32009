#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "cutgraph/graphgen.hpp"
#include "cutgraph/rng.hpp"

namespace cutgraph {

// Exact component statistics of a sampled graph. N_k maps component order
// k to the number of vertices in components of that order, split into
// tree and cyclic components (parallel edges collapse for the tree test).
struct ComponentStats {
  std::uint64_t n = 0;
  std::uint64_t c1 = 0;  // largest component order
  std::uint64_t c2 = 0;  // second largest (0 if fewer than 2 components)
  std::uint64_t component_count = 0;
  std::map<std::uint64_t, std::uint64_t> nk;
  std::map<std::uint64_t, std::uint64_t> nk_tree;
  std::map<std::uint64_t, std::uint64_t> nk_cyc;
};

// Union-find with union by size and path compression; one post-pass
// collects the histogram.
ComponentStats analyze(const SparseGraph& g);

// N_{>= omega} = sum_{k >= omega} N_k.
std::uint64_t n_at_least(const ComponentStats& stats, std::uint64_t omega);

enum class PerturbMode { Random, AdversarialGreedy };

struct PerturbResult {
  SparseGraph graph;
  std::uint64_t vertices_deleted = 0;
  std::uint64_t edges_deleted = 0;
  std::uint64_t edges_added = 0;
  // Set when fewer edges existed than were requested for deletion; all
  // were removed.
  bool edges_exhausted = false;
};

// Deletes del_vertices vertices (with incident edges; survivors are
// relabelled in order), then deletes del_edges, then adds add_edges.
// AdversarialGreedy removes highest-degree vertices and spanning-tree
// edges of the current largest component first -- a cheap attack
// heuristic, not an optimum over all perturbations.
PerturbResult perturb(const SparseGraph& g, std::uint64_t del_vertices,
                      std::uint64_t del_edges, std::uint64_t add_edges,
                      PerturbMode mode, RngStream& rng);

using GraphSampler = std::function<SparseGraph(RngStream&)>;

struct TailFrequencies {
  std::uint64_t reps = 0;
  double below_lo = 0.0;   // freq of C1 < lo * n
  double above_hi = 0.0;   // freq of C1 > hi * n
  double second_big = 0.0; // freq of C2 >= lo * n
};

// Empirical tail frequencies of the giant component over independent
// replicas; replicas run on derived streams and may execute concurrently.
TailFrequencies ensemble_tail(const GraphSampler& sampler, std::uint64_t reps,
                              double threshold_lo, double threshold_hi,
                              RngStream& rng, unsigned threads = 1);

}  // namespace cutgraph
