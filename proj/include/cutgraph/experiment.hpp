#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cutgraph/hypergraph.hpp"
#include "cutgraph/kernel.hpp"

namespace cutgraph {

enum class ExperimentKind {
  GiantConvergence,
  ThresholdSweep,
  PercolatePolarity,
  Stability,
  RhoCrosscheck,
  HyperThreshold,
};

enum class GraphModel { Bernoulli, PoissonSimple, PoissonMulti };

// One experiment per run file. All randomness descends from the root seed
// through (task index, replica index) stream derivation, so reruns and
// thread counts cannot change the numbers.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::GiantConvergence;
  std::string name;  // used in the CSV kind column; defaults per kind
  std::optional<StepKernel> kernel;
  std::optional<HyperStepKernel> hyperkernel;
  std::uint64_t polarity_q = 0;
  std::vector<std::uint64_t> n_list;
  std::vector<double> c_grid;
  std::vector<double> delta_grid;
  std::uint64_t replicas = 1;
  std::uint64_t gw_runs = 100000;
  std::uint64_t pop_cap = 10000;
  std::uint64_t seed = 0;
  GraphModel model = GraphModel::Bernoulli;
  std::string out_csv;
  std::string out_svg;
  // Optional assertion thresholds, evaluated by run_checks when --check
  // is passed. Missing keys are simply not checked.
  std::map<std::string, double> checks;
};

struct RunRecord {
  std::string kind;
  std::uint64_t n = 0;
  double c = 0.0;  // scale, keep-probability numerator, or delta
  std::uint64_t replica = 0;
  double c1_frac = 0.0;
  double c2_frac = 0.0;
  double rho_ref = 0.0;      // fixed-point / branching overlay value
  double alpha_lower = 0.0;  // (c||T|| - 1)/(c sup kappa), clamped at 0
  std::string nk_digest;     // "k:count" pairs for small k
  std::string note;
  double wall_ms = 0.0;  // excluded from the deterministic CSV
  std::uint64_t seed_used = 0;
};

// Parses and validates a run file (JSON). Throws ConfigError on any
// problem: unknown kind, missing kernels, unsorted c grid, n < 2,
// replicas < 1, missing referenced files.
ExperimentConfig load_experiment_config(const std::string& path);

std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg,
                                      unsigned threads = 1);

// Stable column order; wall time stays out so identical config + seed
// gives a byte-identical file. Empty record sets are an error.
void emit_csv(const std::vector<RunRecord>& records, std::ostream& out);
void emit_csv_file(const std::vector<RunRecord>& records,
                   const std::string& path);

// Standalone SVG scatter of C1/n against the c column with the rho_ref
// overlay, no display dependencies.
void emit_svg_file(const std::vector<RunRecord>& records,
                   const std::string& path);

struct CheckOutcome {
  bool passed = true;
  std::vector<std::string> failures;
};

// Evaluates the config's "check" thresholds against the records.
CheckOutcome run_checks(const ExperimentConfig& cfg,
                        const std::vector<RunRecord>& records);

}  // namespace cutgraph
