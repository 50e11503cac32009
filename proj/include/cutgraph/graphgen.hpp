#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cutgraph/kernel.hpp"
#include "cutgraph/rng.hpp"

namespace cutgraph {

// Sampled graph: vertex count plus an edge list. For simple graphs the
// list is canonical: u < v per edge, sorted ascending, no duplicates.
// Multigraphs keep duplicates (still u < v per edge, sorted).
struct SparseGraph {
  std::uint32_t n = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  bool multigraph = false;

  std::size_t edge_count() const { return edges.size(); }
};

// Normalizes (sorts pairs, orders the list, and for simple graphs drops
// duplicates); throws std::invalid_argument on out-of-range endpoints or
// loops.
SparseGraph make_graph(std::uint32_t n,
                       std::vector<std::pair<std::uint32_t, std::uint32_t>> edges,
                       bool multigraph = false);

// G(A): pair ij present independently with probability min(a_ij/n, 1).
// Typed matrices are sampled block-by-block with geometric skipping, so a
// constant kernel costs O(n + edges) rather than O(n^2).
SparseGraph sample_bernoulli(const WeightMatrix& a, RngStream& rng);

// Poisson simple variant: p_ij = 1 - exp(-a_ij/n).
SparseGraph sample_poisson_simple(const WeightMatrix& a, RngStream& rng);

// Poisson multigraph variant: multiplicity of ij ~ Poisson(a_ij/n).
SparseGraph sample_poisson_multi(const WeightMatrix& a, RngStream& rng);

// a'_ij = -n log(1 - a_ij/n), so that G(A) and the Poisson simple graph of
// the converted matrix agree in distribution. Throws std::invalid_argument
// if any entry reaches n.
WeightMatrix convert_matrix(const WeightMatrix& a);

// Draw n vertex types iid from the kernel's masses; a_ij = k(t_i, t_j) off
// the diagonal, a_ii = 0. Returns the typed-mode matrix.
WeightMatrix sample_iid_types(const StepKernel& k, std::size_t n,
                              RngStream& rng);

// Polarity graph on the points of PG(2, q), q prime: x ~ y iff
// x0 y0 + x1 y1 + x2 y2 = 0 in GF(q), loops discarded. n = q^2 + q + 1.
SparseGraph polarity_graph(std::uint64_t q);

// Keep each edge independently with probability keep_prob.
SparseGraph percolate(const SparseGraph& g, double keep_prob, RngStream& rng);

}  // namespace cutgraph
