#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "cutgraph/kernel.hpp"
#include "cutgraph/rng.hpp"

namespace cutgraph {

// Survival probabilities of the multi-type Poisson Galton-Watson process:
// the maximal solution of f = 1 - exp(-T_kappa f).
struct FixedPointResult {
  std::vector<double> rho_by_type;  // rho_kappa(x_i) in [0, 1]
  double rho = 0.0;                 // sum_i mu_i rho_i
  std::size_t iterations = 0;
  double residual = 0.0;            // sup-norm of the last update
};

// Iterates f^0 = 1, f^{t+1} = 1 - exp(-(T f^t)); the sequence decreases
// pointwise to the maximal fixed point. Converged values that are
// uniformly below the 1e-6 criticality slack collapse to the zero
// solution (the survival probability of a subcritical process). Throws
// ConvergenceError with the last iterate when max_iter is exhausted,
// which near-critical kernels will do; no extrapolation is attempted.
FixedPointResult survival_fixed_point(const StepKernel& k, double tol = 1e-10,
                                      std::size_t max_iter = 100000);

// rho(kappa) >= (||T_kappa|| - 1) / sup kappa, clamped at zero.
double survival_lower_bound(const StepKernel& k);

struct GwOutcome {
  bool cap_reached = false;  // survival proxy
  std::uint64_t total = 0;   // total progeny when extinct
  std::uint64_t generations = 0;
};

// Simulates the branching process generation by generation. A particle of
// type i begets Poisson(k_ij mu_j) children of each type j; per-type
// counts are drawn in one Poisson each (superposition), so runtime scales
// with generations, not particles. root_type std::nullopt draws the root
// from mu.
GwOutcome simulate_gw(const StepKernel& k, std::optional<std::size_t> root_type,
                      std::uint64_t pop_cap, std::uint64_t gen_cap,
                      RngStream& rng);

enum class LawMethod { MonteCarlo, TreeSum };

// Total-population law: rho_k = P(|B_kappa| = k) for k <= k_max plus the
// tail mass (everything larger, including survival).
struct PopulationLaw {
  std::vector<double> rho;  // rho[k-1] = rho_k, k = 1..k_max
  double tail = 0.0;
  LawMethod method = LawMethod::MonteCarlo;
};

PopulationLaw population_law_mc(const StepKernel& k, std::uint64_t k_max,
                                std::uint64_t reps, RngStream& rng);

// A tree on vertices 0..k-1 with its automorphism count (brute-force
// permutation check at construction).
struct LabelledTree {
  std::uint32_t order = 1;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  std::uint64_t aut = 1;

  LabelledTree(std::uint32_t order,
               std::vector<std::pair<std::uint32_t, std::uint32_t>> edges);
};

// All isomorphism classes of trees on k vertices (k <= 8: 1, 1, 1, 2, 3,
// 6, 11, 23 classes), generated from Pruefer sequences and deduplicated by
// canonical form.
std::vector<LabelledTree> trees_of_order(std::uint32_t k);

// Tree integral: sum over type assignments of
//   prod_{ij in E(T)} k(x_i, x_j) * prod_v mu(x_v) e^{-lambda(x_v)},
// evaluated by dynamic programming over the tree in O(k m^2). The
// one-vertex tree integrates to sum_i mu_i e^{-lambda_i}.
double t_isol(const LabelledTree& t, const StepKernel& k);

// rho_k = k * sum_T t_isol(T, kappa) / aut(T), summed over isomorphism
// classes of trees on k vertices. k_max <= 8 (enumeration budget).
PopulationLaw population_law_treesum(const StepKernel& k, std::uint64_t k_max);

struct ContinuityRow {
  double epsilon = 0.0;
  double perturbation_cutnorm = 0.0;  // set-version norm of eps * P
  double rho_delta = 0.0;             // |rho(k + eps P) - rho(k)|
};

// Probes continuity of rho in the cut norm: for each scale eps computes
// the cut norm of the scaled perturbation and the survival shift. Throws
// std::invalid_argument naming the first eps that makes k + eps P
// negative somewhere.
std::vector<ContinuityRow> rho_continuity_probe(const StepKernel& k,
                                                const StepKernel& perturbation,
                                                const std::vector<double>& scales);

}  // namespace cutgraph
