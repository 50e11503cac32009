#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cutgraph/branching.hpp"
#include "cutgraph/components.hpp"
#include "cutgraph/cutnorm.hpp"
#include "cutgraph/errors.hpp"
#include "cutgraph/experiment.hpp"
#include "cutgraph/graphgen.hpp"
#include "cutgraph/hypergraph.hpp"
#include "cutgraph/io.hpp"
#include "cutgraph/kernel.hpp"

namespace {

using namespace cutgraph;

std::string with_dir(const std::string& dir, const std::string& path) {
  if (dir.empty() || path.empty() || path.front() == '/') return path;
  return dir + "/" + path;
}

struct GenOptions {
  std::string model = "bernoulli";
  std::string kernel_file, matrix_file, out_file;
  std::uint64_t polarity_q = 0;
  std::uint64_t n = 0;
  double scale_c = 1.0;
  double percolate_p = -1.0;
};

int cmd_gen(const GenOptions& opt, std::uint64_t seed, const std::string& dir) {
  RngStream rng(seed);
  SparseGraph g;
  if (opt.polarity_q > 0) {
    g = polarity_graph(opt.polarity_q);
  } else {
    WeightMatrix a = [&] {
      if (!opt.kernel_file.empty()) {
        if (opt.n < 2) throw ConfigError("gen: --kernel needs --n >= 2");
        StepKernel k = load_kernel(with_dir(dir, opt.kernel_file));
        if (opt.scale_c != 1.0) k = scale(k, opt.scale_c);
        return sample_iid_types(k, opt.n, rng);
      }
      if (opt.matrix_file.empty())
        throw ConfigError("gen: need --kernel, --matrix, or --polarity");
      WeightMatrix m = load_matrix(with_dir(dir, opt.matrix_file));
      return opt.scale_c == 1.0 ? m : scale(m, opt.scale_c);
    }();
    if (opt.model == "bernoulli")
      g = sample_bernoulli(a, rng);
    else if (opt.model == "poisson")
      g = sample_poisson_simple(a, rng);
    else if (opt.model == "multi")
      g = sample_poisson_multi(a, rng);
    else
      throw ConfigError("gen: unknown model " + opt.model);
  }
  if (opt.percolate_p >= 0.0) g = percolate(g, opt.percolate_p, rng);

  if (opt.out_file.empty())
    write_graph(g, std::cout);
  else
    save_graph(g, with_dir(dir, opt.out_file));
  return 0;
}

int cmd_components(const std::string& graph_file, const std::string& csv_file,
                   const std::string& dir) {
  const SparseGraph g = load_graph(with_dir(dir, graph_file));
  const ComponentStats stats = analyze(g);
  std::cout << "n " << stats.n << "\n"
            << "edges " << g.edges.size() << "\n"
            << "components " << stats.component_count << "\n"
            << "c1 " << stats.c1 << "\n"
            << "c2 " << stats.c2 << "\n"
            << "c1_frac " << (stats.n ? static_cast<double>(stats.c1) / stats.n : 0.0)
            << "\n"
            << "c2_frac " << (stats.n ? static_cast<double>(stats.c2) / stats.n : 0.0)
            << "\n";
  if (!csv_file.empty()) {
    std::FILE* f = std::fopen(with_dir(dir, csv_file).c_str(), "w");
    if (!f) throw ConfigError("cannot write " + csv_file);
    std::fprintf(f, "k,n_k,n_k_tree,n_k_cyc\n");
    for (const auto& [k, nk] : stats.nk) {
      const auto tree = stats.nk_tree.count(k) ? stats.nk_tree.at(k) : 0;
      const auto cyc = stats.nk_cyc.count(k) ? stats.nk_cyc.at(k) : 0;
      std::fprintf(f, "%llu,%llu,%llu,%llu\n",
                   static_cast<unsigned long long>(k),
                   static_cast<unsigned long long>(nk),
                   static_cast<unsigned long long>(tree),
                   static_cast<unsigned long long>(cyc));
    }
    std::fclose(f);
  }
  return 0;
}

void print_witness(const CutNormResult& res) {
  std::cout << "value " << res.value << "\n"
            << "exact " << (res.exact ? "true" : "false") << "\n";
  if (!res.f.empty()) {
    std::cout << "f";
    for (int v : res.f) std::cout << ' ' << (v > 0 ? "+1" : "-1");
    std::cout << "\ng";
    for (int v : res.g) std::cout << ' ' << (v > 0 ? "+1" : "-1");
    std::cout << "\n";
  } else {
    std::cout << "S";
    for (std::size_t i : res.set_s) std::cout << ' ' << i;
    std::cout << "\nT";
    for (std::size_t j : res.set_t) std::cout << ' ' << j;
    std::cout << "\n";
  }
}

int cmd_cutnorm(const std::string& file_a, const std::string& file_b,
                bool exact, const std::string& norm, std::size_t restarts,
                std::uint64_t seed, const std::string& dir) {
  const WeightMatrix a = load_matrix(with_dir(dir, file_a));
  StepKernel k = a.as_kernel();
  if (!file_b.empty()) {
    const WeightMatrix b = load_matrix(with_dir(dir, file_b));
    if (b.size() != a.size())
      throw ConfigError("cutnorm: matrices must have equal size");
    k = StepKernel::difference(k, b.as_kernel());
  }
  CutNormResult res;
  if (exact) {
    res = norm == "pm" ? cutnorm_pm_exact(k) : cutnorm_sets_exact(k);
  } else {
    RngStream rng(seed);
    res = cutnorm_heuristic(k, restarts, rng);
  }
  print_witness(res);
  return 0;
}

int cmd_rho(const std::string& kernel_file, const std::string& method,
            double scale_c, double tol, std::uint64_t kmax, std::uint64_t reps,
            std::uint64_t pop_cap, std::uint64_t seed, const std::string& dir) {
  StepKernel k = load_kernel(with_dir(dir, kernel_file));
  if (scale_c != 1.0) k = scale(k, scale_c);

  if (method == "fixedpoint") {
    const FixedPointResult res = survival_fixed_point(k, tol);
    std::cout << "rho " << res.rho << "\niterations " << res.iterations
              << "\nresidual " << res.residual << "\n";
    std::cout << "type,rho\n";
    for (std::size_t i = 0; i < res.rho_by_type.size(); ++i)
      std::cout << i << ',' << res.rho_by_type[i] << "\n";
  } else if (method == "lowerbound") {
    std::cout << "rho_lower_bound " << survival_lower_bound(k) << "\n";
  } else if (method == "mc") {
    RngStream rng(seed);
    std::uint64_t survived = 0;
    for (std::uint64_t r = 0; r < reps; ++r) {
      RngStream local = rng.derive(r);
      if (simulate_gw(k, std::nullopt, pop_cap, pop_cap, local).cap_reached)
        ++survived;
    }
    std::cout << "rho_mc "
              << static_cast<double>(survived) / static_cast<double>(reps)
              << "\nreps " << reps << "\n";
  } else if (method == "treesum") {
    const PopulationLaw law = population_law_treesum(k, kmax);
    std::cout << "k,rho_k\n";
    for (std::size_t i = 0; i < law.rho.size(); ++i)
      std::cout << i + 1 << ',' << law.rho[i] << "\n";
    std::cout << "tail," << law.tail << "\n";
  } else {
    throw ConfigError("rho: unknown method " + method);
  }
  return 0;
}

int cmd_hyper(const std::string& hyper_file, bool sample,
              const std::string& variant, const std::string& project,
              bool edge_kernel_out, std::uint64_t seed,
              const std::string& out_file, const std::string& dir) {
  const SparseHypermatrix h = load_hypermatrix(with_dir(dir, hyper_file));
  RngStream rng(seed);

  if (edge_kernel_out) {
    const WeightMatrix a = marginal_matrix(h);
    if (out_file.empty()) {
      std::cout << "n " << a.size() << "\n";
      for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a.size(); ++j)
          std::cout << (j ? " " : "") << a.entry(i, j);
        std::cout << "\n";
      }
    } else {
      save_matrix(a, with_dir(dir, out_file));
    }
    return 0;
  }

  if (!sample && project.empty())
    throw ConfigError("hyper: nothing to do; pass --sample, --project, or "
                      "--edge-kernel");

  const Hypergraph hg = sample_hypergraph(
      h, rng,
      variant == "multi" ? HyperVariant::PoissonMulti
                         : HyperVariant::Bernoulli);
  if (!project.empty()) {
    const SparseGraph g = project == "one-edge" ? one_edge_projection(hg, rng)
                                                : clique_projection(hg);
    if (out_file.empty())
      write_graph(g, std::cout);
    else
      save_graph(g, with_dir(dir, out_file));
    return 0;
  }
  // Plain hypergraph dump: header then one line per hyperedge.
  std::cout << hg.n << ' ' << hg.edges.size() << "\n";
  for (const auto& edge : hg.edges) {
    std::cout << edge.size();
    for (std::uint32_t v : edge) std::cout << ' ' << v;
    std::cout << "\n";
  }
  return 0;
}

int cmd_experiment(const std::string& run_file, bool check, unsigned threads,
                   std::optional<std::uint64_t> seed_override,
                   const std::string& dir) {
  ExperimentConfig cfg = load_experiment_config(run_file);
  if (seed_override) cfg.seed = *seed_override;
  const std::vector<RunRecord> records = run_experiment(cfg, threads);

  if (!cfg.out_csv.empty())
    emit_csv_file(records, with_dir(dir, cfg.out_csv));
  else
    emit_csv(records, std::cout);
  if (!cfg.out_svg.empty()) emit_svg_file(records, with_dir(dir, cfg.out_svg));

  if (check) {
    const CheckOutcome outcome = run_checks(cfg, records);
    for (const std::string& f : outcome.failures)
      std::cerr << "check failed: " << f << "\n";
    if (!outcome.passed) return 3;
    std::cerr << "all checks passed\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"inhomogeneous random graph laboratory: kernels, cut norms, "
               "samplers, branching processes, hypergraphs"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out_dir;
  auto* seed_opt = app.add_option("--seed", seed, "root RNG seed");
  app.add_option("--threads", threads, "worker threads for replicas");
  app.add_option("--out-dir", out_dir, "directory prefix for output files");

  auto* gen = app.add_subcommand("gen", "sample a random graph");
  GenOptions gen_opt;
  gen->add_option("--model", gen_opt.model, "bernoulli | poisson | multi");
  gen->add_option("--kernel", gen_opt.kernel_file, "kernel JSON file");
  gen->add_option("--matrix", gen_opt.matrix_file, "matrix JSON file");
  gen->add_option("--polarity", gen_opt.polarity_q, "polarity graph over GF(q)");
  gen->add_option("--n", gen_opt.n, "vertex count for kernel sampling");
  gen->add_option("--scale", gen_opt.scale_c, "multiply the kernel/matrix by c");
  gen->add_option("--percolate", gen_opt.percolate_p,
                  "keep each edge with this probability");
  gen->add_option("--out", gen_opt.out_file, "output graph file");

  auto* comp = app.add_subcommand("components", "component statistics");
  std::string comp_graph, comp_csv;
  comp->add_option("graph", comp_graph, "graph file")->required();
  comp->add_option("--csv", comp_csv, "write the N_k histogram as CSV");

  auto* cut = app.add_subcommand("cutnorm", "cut norm of a matrix kernel "
                                            "or of a difference of two");
  std::string cut_a, cut_b, cut_norm = "sets";
  bool cut_exact = false;
  std::size_t cut_restarts = 16;
  cut->add_option("matrix", cut_a, "matrix file")->required();
  cut->add_option("second", cut_b, "optional second matrix (difference)");
  cut->add_flag("--exact", cut_exact, "exact enumeration (m <= 24)");
  cut->add_option("--norm", cut_norm, "sets | pm");
  cut->add_option("--restarts", cut_restarts, "heuristic restarts");

  auto* rho = app.add_subcommand("rho", "branching-process survival");
  std::string rho_kernel, rho_method = "fixedpoint";
  double rho_scale = 1.0, rho_tol = 1e-10;
  std::uint64_t rho_kmax = 8, rho_reps = 100000, rho_cap = 10000;
  rho->add_option("--kernel", rho_kernel, "kernel JSON file")->required();
  rho->add_option("--method", rho_method,
                  "fixedpoint | mc | treesum | lowerbound");
  rho->add_option("--scale", rho_scale, "multiply the kernel by c");
  rho->add_option("--tol", rho_tol, "fixed-point tolerance");
  rho->add_option("--kmax", rho_kmax, "tree-sum population cutoff (<= 8)");
  rho->add_option("--reps", rho_reps, "Monte Carlo runs");
  rho->add_option("--pop-cap", rho_cap, "survival proxy population cap");

  auto* hyper = app.add_subcommand("hyper", "hypergraph sampling/projection");
  std::string hyper_file, hyper_variant = "bernoulli", hyper_project,
              hyper_out;
  bool hyper_sample = false, hyper_edge_kernel = false;
  hyper->add_option("hypermatrix", hyper_file, "hypermatrix file")->required();
  hyper->add_flag("--sample", hyper_sample, "sample H(H_n)");
  hyper->add_option("--variant", hyper_variant, "bernoulli | multi");
  hyper->add_option("--project", hyper_project, "clique | one-edge");
  hyper->add_flag("--edge-kernel", hyper_edge_kernel,
                  "emit the marginal matrix instead of sampling");
  hyper->add_option("--out", hyper_out, "output file");

  auto* exp = app.add_subcommand("experiment", "run a config-driven experiment");
  std::string run_file;
  bool exp_check = false;
  exp->add_option("runfile", run_file, "experiment config JSON")->required();
  exp->add_flag("--check", exp_check,
                "evaluate the config's assertions; exit 3 on failure");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmd_gen(gen_opt, seed, out_dir);
    if (comp->parsed()) return cmd_components(comp_graph, comp_csv, out_dir);
    if (cut->parsed())
      return cmd_cutnorm(cut_a, cut_b, cut_exact, cut_norm, cut_restarts, seed,
                         out_dir);
    if (rho->parsed())
      return cmd_rho(rho_kernel, rho_method, rho_scale, rho_tol, rho_kmax,
                     rho_reps, rho_cap, seed, out_dir);
    if (hyper->parsed())
      return cmd_hyper(hyper_file, hyper_sample, hyper_variant, hyper_project,
                       hyper_edge_kernel, seed, hyper_out, out_dir);
    if (exp->parsed())
      return cmd_experiment(run_file, exp_check, threads,
                            seed_opt->count() ? std::optional(seed)
                                              : std::nullopt,
                            out_dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
