#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cutgraph/kernel.hpp"
#include "cutgraph/rng.hpp"

namespace cutgraph {

// Result of a cut-norm computation. The witness is a pair of type-index
// subsets for the set version / heuristic, or a pair of +-1 sign vectors
// for the functional version; the unused witness kind stays empty.
struct CutNormResult {
  double value = 0.0;
  std::vector<std::size_t> set_s, set_t;
  std::vector<std::int8_t> f, g;
  bool exact = false;
};

// Objective evaluators; tests use them to confirm value == objective at
// the reported witness.
double rectangle_sum(const StepKernel& k, const std::vector<std::size_t>& s,
                     const std::vector<std::size_t>& t);
double pm_objective(const StepKernel& k, const std::vector<std::int8_t>& f,
                    const std::vector<std::int8_t>& g);

// Set version: sup over pairs of type subsets of |sum_{S x T} mu_i mu_j
// k_ij|. Enumerates S (2^m) and closes the optimal T per sign branch in
// closed form. Throws BudgetError for m > 24.
CutNormResult cutnorm_sets_exact(const StepKernel& k);

// Functional version restricted to +-1 test functions: max over f of
// sum_j mu_j |sum_i f_i mu_i k_ij|, inner g by sign matching. m <= 24.
CutNormResult cutnorm_pm_exact(const StepKernel& k);

// Alternating coordinate ascent from random subset pairs; best over
// restarts. Always a valid lower bound on the set-version norm.
CutNormResult cutnorm_heuristic(const StepKernel& k, std::size_t restarts,
                                RngStream& rng);

struct CutDistanceBudget {
  enum class Kind { Exhaustive, Anneal };
  Kind kind = Kind::Exhaustive;
  std::size_t anneal_steps = 100000;

  static CutDistanceBudget exhaustive() { return {Kind::Exhaustive, 0}; }
  static CutDistanceBudget anneal(std::size_t steps) {
    return {Kind::Anneal, steps};
  }
};

// Upper bound on d_cut(kappa_A, kappa_B) over vertex permutations:
// exhaustive for n <= 8, otherwise simulated annealing over transpositions
// (geometric cooling 1.0 -> 1e-4). Inner norm is the exact set version for
// n <= 24, else the heuristic. Exact only when both searches are exact.
double cut_distance(const WeightMatrix& a, const WeightMatrix& b,
                    CutDistanceBudget budget, RngStream& rng);

}  // namespace cutgraph
