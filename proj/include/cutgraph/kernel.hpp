#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cutgraph {

// Finite-type symmetric kernel: type masses mu_1..mu_m summing to 1 and an
// m-by-m symmetric value matrix. All continuous kernels enter the library
// through a discretization of this form. A "signed" kernel (a difference of
// two kernels on a common partition) relaxes the nonnegativity requirement
// and is accepted by the cut-norm routines only.
class StepKernel {
 public:
  enum class Sign { NonNegative, Signed };

  StepKernel(std::vector<double> masses, std::vector<double> values,
             Sign sign = Sign::NonNegative);

  static StepKernel constant(double c, std::size_t types = 1);
  // values interpreted row-major, m*m entries, equal masses 1/m.
  static StepKernel uniform_masses(std::size_t types,
                                   std::vector<double> values,
                                   Sign sign = Sign::NonNegative);
  // a - b on a common partition; result is marked signed.
  static StepKernel difference(const StepKernel& a, const StepKernel& b);

  std::size_t type_count() const { return masses_.size(); }
  double mass(std::size_t i) const { return masses_[i]; }
  const std::vector<double>& masses() const { return masses_; }
  double value(std::size_t i, std::size_t j) const {
    return values_[i * type_count() + j];
  }
  const std::vector<double>& values() const { return values_; }
  bool is_signed() const { return sign_ == Sign::Signed; }

  double max_value() const;
  // \int kappa = sum_ij mu_i mu_j k_ij
  double integral() const;

 private:
  std::vector<double> masses_;
  std::vector<double> values_;  // row-major m*m
  Sign sign_;
};

// Per-type marginal lambda_i = sum_j mu_j k_ij (expected-degree units).
struct Marginal {
  std::vector<double> per_type;
};

// Partition of the type set into irreducible blocks. Types in different
// blocks carry kernel value 0 between them; each block's restricted kernel
// has a connected positive-support graph. Blocks are ordered by descending
// total mass, ties broken by smallest contained type index.
struct IrreducibleDecomposition {
  struct Block {
    std::vector<std::size_t> types;  // ascending original type indices
    StepKernel restriction;          // masses renormalized to sum to 1
    double mass;                     // total mu-mass of the block
  };
  std::vector<Block> blocks;
  // Cross-block entries are exactly zero; recorded for the record, the
  // construction guarantees it.
  bool cross_block_zero = true;
};

// Symmetric nonnegative n-by-n matrix of scaled edge probabilities. Two
// storage modes: an explicit dense matrix, or a per-vertex type assignment
// plus an m-by-m table (the form produced by sampling vertex types from a
// StepKernel, with zero diagonal). The typed mode is what makes n ~ 1e6
// experiments possible; samplers exploit it for type-block edge generation.
class WeightMatrix {
 public:
  static WeightMatrix dense(std::size_t n, std::vector<double> entries);
  static WeightMatrix from_types(std::vector<std::uint32_t> types,
                                 StepKernel table);

  std::size_t size() const { return n_; }
  bool typed() const { return typed_; }

  double entry(std::size_t i, std::size_t j) const {
    if (typed_) {
      if (i == j) return 0.0;
      return table_.value(types_[i], types_[j]);
    }
    return entries_[i * n_ + j];
  }

  const std::vector<std::uint32_t>& types() const { return types_; }
  const StepKernel& table() const { return table_; }
  const std::vector<double>& entries() const { return entries_; }

  // The kernel kappa_{A_n}: m = n types of mass 1/n each. Materializes a
  // dense table, so intended for small n only (cut-norm work).
  StepKernel as_kernel() const;

  double max_entry() const;

 private:
  WeightMatrix();

  std::size_t n_ = 0;
  bool typed_ = false;
  std::vector<double> entries_;        // dense mode
  std::vector<std::uint32_t> types_;   // typed mode
  StepKernel table_;                   // typed mode
};

Marginal marginal(const StepKernel& k);

// (Tf)_i = sum_j k_ij f_j mu_j. Throws std::invalid_argument on dimension
// mismatch.
std::vector<double> apply_T(const StepKernel& k, std::span<const double> f);

// ||T_kappa||: top eigenvalue of M_ij = k_ij mu_j (the L2(mu) operator
// norm of the symmetric kernel). Power iteration from the all-ones vector;
// a positive spectral shift keeps the iteration convergent when the top
// eigenvalue pair is +/-lambda (bipartite-type kernels). Throws
// ConvergenceError carrying the last iterate if max_iter is exhausted.
double operator_norm(const StepKernel& k, double tol = 1e-10,
                     std::size_t max_iter = 100000);

// Pointwise minimum with M.
StepKernel truncate(const StepKernel& k, double M);

StepKernel scale(const StepKernel& k, double c);

IrreducibleDecomposition decompose_irreducible(const StepKernel& k);

struct EliminationResult {
  WeightMatrix matrix;
  std::uint64_t removed_count = 0;  // entries of the full n*n grid zeroed
  double removed_sum = 0.0;
};

// Zero all diagonal entries and every entry exceeding M; reports how much
// mass was removed. Preprocessing step mirroring the well-behaved-sequence
// reduction used ahead of the small-component analysis.
EliminationResult eliminate_large_entries(const WeightMatrix& a, double M);

WeightMatrix scale(const WeightMatrix& a, double c);

}  // namespace cutgraph
