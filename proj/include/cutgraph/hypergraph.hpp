#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "cutgraph/branching.hpp"
#include "cutgraph/graphgen.hpp"
#include "cutgraph/kernel.hpp"
#include "cutgraph/rng.hpp"

namespace cutgraph {

// One arity slice of a hyperkernel: a fully symmetric r-dimensional value
// array over type indices, stored dense row-major (m^r entries). Values
// may be signed when used as a difference inside the cut-norm routines.
struct ArityKernel {
  std::uint32_t arity = 2;
  std::vector<double> values;
};

// Finite-type hyperkernel (kappa_r)_{r>=2}: shared type masses plus one
// symmetric array per present arity. The integral i = sum_r r * int
// kappa_r must be finite, which is automatic at finite type.
class HyperStepKernel {
 public:
  HyperStepKernel(std::vector<double> masses, std::vector<ArityKernel> layers);

  // Single-type kernel, one arity, constant value.
  static HyperStepKernel constant(double value, std::uint32_t arity);

  std::size_t type_count() const { return masses_.size(); }
  const std::vector<double>& masses() const { return masses_; }
  const std::vector<ArityKernel>& layers() const { return layers_; }
  double integral() const;

 private:
  std::vector<double> masses_;
  std::vector<ArityKernel> layers_;  // ascending arity, each >= 2
};

// Sampled hypergraph: hyperedges are sorted tuples of distinct vertices,
// sizes 2..R; the list may contain duplicates (Poisson multi variant).
struct Hypergraph {
  std::uint32_t n = 0;
  std::vector<std::vector<std::uint32_t>> edges;

  std::size_t edge_count() const { return edges.size(); }
};

// Per-arity weight entries on canonical index tuples (strictly ascending;
// the symmetric array with all r! permutations is implicit, diagonal
// entries are unrepresentable and play no role in sampling).
class SparseHypermatrix {
 public:
  SparseHypermatrix(std::uint32_t n, std::uint32_t max_arity);

  std::uint32_t size() const { return n_; }
  std::uint32_t max_arity() const { return max_arity_; }

  // tuple must have 2..R distinct in-range indices (any order).
  void set(std::vector<std::uint32_t> tuple, double value);
  // Any permutation of a stored tuple; repeated indices or absent tuples
  // give 0.
  double value(std::vector<std::uint32_t> tuple) const;

  const std::map<std::vector<std::uint32_t>, double>& entries() const {
    return entries_;
  }

 private:
  std::uint32_t n_;
  std::uint32_t max_arity_;
  std::map<std::vector<std::uint32_t>, double> entries_;
};

enum class HyperVariant { Bernoulli, PoissonMulti };

// H(H_n): each stored r-tuple becomes a hyperedge with probability
// min(r! h / n^{r-1}, 1), or with Poisson(r! h / n^{r-1}) multiplicity.
Hypergraph sample_hypergraph(const SparseHypermatrix& h, RngStream& rng,
                             HyperVariant variant);

struct TypedHypergraphSample {
  std::vector<std::uint32_t> types;
  Hypergraph graph;
};

// Kernel-driven sampler: draws n vertex types iid from the masses and
// samples hyperedges block-by-block over type multisets with geometric
// skipping, so constant hyperkernels cost O(n + edges). The implied
// hypermatrix entry is kappa_r evaluated at the endpoint types.
TypedHypergraphSample sample_hypergraph_kernel(const HyperStepKernel& k,
                                               std::uint32_t n, RngStream& rng,
                                               HyperVariant variant);

// Replace every r-hyperedge by its binom(r,2) pairs; duplicates collapse.
SparseGraph clique_projection(const Hypergraph& h);

// Replace every hyperedge by exactly one of its pairs, chosen uniformly;
// the result is a multigraph with edge count equal to the hyperedge count.
SparseGraph one_edge_projection(const Hypergraph& h, RngStream& rng);

// Marginal matrix A with a_ij = sum_r r(r-1) n^{-(r-2)} sum_{i3..ir}
// h_{i j i3..ir}, accumulated sparsely over stored tuples. The kernel of
// this matrix is the edge kernel of the hypermatrix's hyperkernel.
WeightMatrix marginal_matrix(const SparseHypermatrix& h);

// Edge kernel kappa_e(x,y) = sum_r r(r-1) * the (r-2)-fold mu-integral of
// kappa_r(x, y, ...). Irreducibility of a hyperkernel is by definition
// irreducibility of this kernel.
StepKernel edge_kernel(const HyperStepKernel& k);

// lambda(x) = sum_r r * lambda_{kappa_r}(x): expected number of
// hyperedges containing a vertex of type x.
Marginal hyper_marginal(const HyperStepKernel& k);

// The hyperkernel of a hypermatrix: n types of mass 1/n. Dense in m^r, so
// small n only.
HyperStepKernel hyperkernel_of(const SparseHypermatrix& h);

// Compound Poisson branching process: a particle of type x is contained
// in Poisson(r * lambda_{kappa_r}(x)) fresh r-hyperedges per arity, each
// contributing r-1 children whose types follow the conditional law
// kappa_r(x, .) / lambda_{kappa_r}(x). Root type drawn from the masses.
GwOutcome simulate_hyper_gw(const HyperStepKernel& k, std::uint64_t pop_cap,
                            std::uint64_t gen_cap, RngStream& rng);

// mu-weighted integral over the last coordinate; arity drops by one.
ArityKernel marginalize_last(std::span<const double> masses,
                             const ArityKernel& a);

// Exact set-version cut norm of an r-kernel (signed allowed): sup over
// r-tuples of type subsets of the weighted box sum. Nested subset
// enumeration with the innermost subset closed per sign; budget r <= 3,
// m <= 10.
double hyper_cutnorm_exact(std::span<const double> masses,
                           const ArityKernel& a);

// sum_r r * ||W_r|| over the family, set-version norms.
double hyper_cutnorm_weighted(std::span<const double> masses,
                              std::span<const ArityKernel> layers);

}  // namespace cutgraph
