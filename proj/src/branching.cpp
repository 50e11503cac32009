#include "cutgraph/branching.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

#include "cutgraph/cutnorm.hpp"
#include "cutgraph/errors.hpp"

namespace cutgraph {

namespace {

// Converged iterates below this are the zero fixed point up to stopping
// error; matches the 1e-6 criticality slack (||T|| <= 1 - 1e-6 processes
// stop with sup f well below it at the default tolerance).
constexpr double kZeroCollapse = 1e-6;

}  // namespace

FixedPointResult survival_fixed_point(const StepKernel& k, double tol,
                                      std::size_t max_iter) {
  if (!(tol > 0.0))
    throw std::invalid_argument("survival_fixed_point: tol must be > 0");
  const std::size_t m = k.type_count();
  std::vector<double> f(m, 1.0);

  double residual = 0.0;
  for (std::size_t iter = 1; iter <= max_iter; ++iter) {
    const std::vector<double> tf = apply_T(k, f);
    residual = 0.0;
    bool monotone = true;
    for (std::size_t i = 0; i < m; ++i) {
      const double next = -std::expm1(-tf[i]);
      if (next > f[i] + 1e-12) monotone = false;
      residual = std::max(residual, std::abs(next - f[i]));
      f[i] = next;
    }
    if (!monotone)
      throw std::logic_error(
          "survival_fixed_point: iterate increased; broken kernel state");
    if (residual < tol) {
      FixedPointResult res;
      double sup = 0.0;
      for (double v : f) sup = std::max(sup, v);
      if (sup < kZeroCollapse) std::fill(f.begin(), f.end(), 0.0);
      res.rho_by_type = std::move(f);
      res.rho = 0.0;
      for (std::size_t i = 0; i < m; ++i)
        res.rho += k.mass(i) * res.rho_by_type[i];
      res.iterations = iter;
      res.residual = residual;
      return res;
    }
  }
  throw ConvergenceError(
      "survival_fixed_point: no convergence in " + std::to_string(max_iter) +
          " iterations (near-critical kernels converge slowly)",
      std::move(f), residual, max_iter);
}

double survival_lower_bound(const StepKernel& k) {
  const double norm = operator_norm(k);
  if (norm <= 1.0) return 0.0;
  return (norm - 1.0) / k.max_value();
}

GwOutcome simulate_gw(const StepKernel& k, std::optional<std::size_t> root_type,
                      std::uint64_t pop_cap, std::uint64_t gen_cap,
                      RngStream& rng) {
  if (pop_cap < 1 || gen_cap < 1)
    throw std::invalid_argument("simulate_gw: caps must be >= 1");
  const std::size_t m = k.type_count();

  std::vector<std::uint64_t> generation(m, 0);
  if (root_type) {
    if (*root_type >= m)
      throw std::invalid_argument("simulate_gw: root type out of range");
    generation[*root_type] = 1;
  } else {
    double u = rng.uniform();
    std::size_t t = 0;
    for (; t + 1 < m; ++t) {
      if (u < k.mass(t)) break;
      u -= k.mass(t);
    }
    generation[t] = 1;
  }

  GwOutcome out;
  out.total = 1;
  for (out.generations = 0; out.generations < gen_cap; ++out.generations) {
    // Children of type j from c_i particles of type i: Poisson with mean
    // sum_i c_i k_ij mu_j (independent Poissons superpose).
    std::vector<std::uint64_t> next(m, 0);
    std::uint64_t alive = 0;
    for (std::size_t j = 0; j < m; ++j) {
      double mean = 0.0;
      for (std::size_t i = 0; i < m; ++i)
        if (generation[i] > 0)
          mean += static_cast<double>(generation[i]) * k.value(i, j) *
                  k.mass(j);
      next[j] = rng.poisson(mean);
      alive += next[j];
    }
    if (alive == 0) return out;  // extinct; out.total is the progeny
    out.total += alive;
    if (out.total > pop_cap) {
      out.cap_reached = true;
      return out;
    }
    generation = std::move(next);
  }
  out.cap_reached = true;  // generation cap acts as a survival proxy too
  return out;
}

PopulationLaw population_law_mc(const StepKernel& k, std::uint64_t k_max,
                                std::uint64_t reps, RngStream& rng) {
  if (reps < 1)
    throw std::invalid_argument("population_law_mc: reps must be >= 1");
  if (k_max < 1)
    throw std::invalid_argument("population_law_mc: k_max must be >= 1");
  std::vector<std::uint64_t> counts(k_max, 0);
  std::uint64_t tail = 0;
  for (std::uint64_t r = 0; r < reps; ++r) {
    RngStream local = rng.derive(r);
    // Total progeny grows every surviving generation, so pop_cap = k_max
    // bounds the generation count as well.
    const GwOutcome o =
        simulate_gw(k, std::nullopt, k_max, k_max + 1, local);
    if (!o.cap_reached && o.total <= k_max)
      ++counts[o.total - 1];
    else
      ++tail;
  }
  PopulationLaw law;
  law.method = LawMethod::MonteCarlo;
  law.rho.resize(k_max);
  for (std::uint64_t i = 0; i < k_max; ++i)
    law.rho[i] = static_cast<double>(counts[i]) / static_cast<double>(reps);
  law.tail = static_cast<double>(tail) / static_cast<double>(reps);
  return law;
}

namespace {

std::vector<std::vector<std::uint32_t>> adjacency(
    std::uint32_t order,
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
  std::vector<std::vector<std::uint32_t>> adj(order);
  for (auto [u, v] : edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  return adj;
}

std::uint64_t count_automorphisms(
    std::uint32_t order,
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
  std::vector<std::uint64_t> edge_set;
  for (auto [u, v] : edges)
    edge_set.push_back((std::uint64_t{std::min(u, v)} << 32) | std::max(u, v));
  std::sort(edge_set.begin(), edge_set.end());

  std::vector<std::uint32_t> perm(order);
  std::iota(perm.begin(), perm.end(), 0);
  std::uint64_t count = 0;
  do {
    bool ok = true;
    for (auto [u, v] : edges) {
      const std::uint32_t a = std::min(perm[u], perm[v]);
      const std::uint32_t b = std::max(perm[u], perm[v]);
      if (!std::binary_search(edge_set.begin(), edge_set.end(),
                              (std::uint64_t{a} << 32) | b)) {
        ok = false;
        break;
      }
    }
    if (ok) ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return count;
}

// Canonical string of the tree rooted at its center(s): AHU encoding with
// sorted child labels; bicentral trees take the smaller of the two
// rootings.
std::string ahu_encode(const std::vector<std::vector<std::uint32_t>>& adj,
                       std::uint32_t v, std::uint32_t parent) {
  std::vector<std::string> child;
  for (std::uint32_t w : adj[v])
    if (w != parent) child.push_back(ahu_encode(adj, w, v));
  std::sort(child.begin(), child.end());
  std::string out = "(";
  for (const std::string& c : child) out += c;
  out += ")";
  return out;
}

std::vector<std::uint32_t> tree_centers(
    const std::vector<std::vector<std::uint32_t>>& adj) {
  const std::uint32_t n = static_cast<std::uint32_t>(adj.size());
  if (n == 1) return {0};
  std::vector<std::uint32_t> degree(n), order;
  for (std::uint32_t v = 0; v < n; ++v) {
    degree[v] = static_cast<std::uint32_t>(adj[v].size());
    if (degree[v] == 1) order.push_back(v);
  }
  std::vector<char> removed(n, 0);
  std::uint32_t left = n;
  std::size_t head = 0;
  while (left > 2) {
    const std::size_t layer_end = order.size();
    for (; head < layer_end; ++head) {
      const std::uint32_t v = order[head];
      removed[v] = 1;
      --left;
      for (std::uint32_t w : adj[v])
        if (!removed[w] && --degree[w] == 1) order.push_back(w);
    }
  }
  std::vector<std::uint32_t> centers;
  for (std::uint32_t v = 0; v < n; ++v)
    if (!removed[v]) centers.push_back(v);
  return centers;
}

std::string canonical_form(
    std::uint32_t order,
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
  const auto adj = adjacency(order, edges);
  std::string best;
  for (std::uint32_t c : tree_centers(adj)) {
    std::string s = ahu_encode(adj, c, c);
    if (best.empty() || s < best) best = std::move(s);
  }
  return best;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> pruefer_decode(
    const std::vector<std::uint32_t>& seq, std::uint32_t k) {
  std::vector<std::uint32_t> degree(k, 1);
  for (std::uint32_t v : seq) ++degree[v];
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  std::vector<char> used(k, 0);
  for (std::uint32_t v : seq) {
    for (std::uint32_t leaf = 0; leaf < k; ++leaf)
      if (!used[leaf] && degree[leaf] == 1) {
        edges.emplace_back(leaf, v);
        used[leaf] = 1;
        --degree[v];
        break;
      }
  }
  std::uint32_t a = k, b = k;
  for (std::uint32_t v = 0; v < k; ++v)
    if (!used[v] && degree[v] == 1) (a == k ? a : b) = v;
  edges.emplace_back(a, b);
  return edges;
}

}  // namespace

LabelledTree::LabelledTree(
    std::uint32_t order,
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges_in)
    : order(order), edges(std::move(edges_in)) {
  if (order < 1) throw std::invalid_argument("tree needs >= 1 vertex");
  if (edges.size() + 1 != order)
    throw std::invalid_argument("tree needs exactly order-1 edges");
  for (auto [u, v] : edges)
    if (u >= order || v >= order || u == v)
      throw std::invalid_argument("bad tree edge");
  // Connectivity via one traversal.
  const auto adj = adjacency(order, edges);
  std::vector<char> seen(order, 0);
  std::vector<std::uint32_t> stack{0};
  seen[0] = 1;
  std::uint32_t visited = 1;
  while (!stack.empty()) {
    const std::uint32_t v = stack.back();
    stack.pop_back();
    for (std::uint32_t w : adj[v])
      if (!seen[w]) {
        seen[w] = 1;
        ++visited;
        stack.push_back(w);
      }
  }
  if (visited != order) throw std::invalid_argument("tree not connected");
  aut = count_automorphisms(order, edges);
}

std::vector<LabelledTree> trees_of_order(std::uint32_t k) {
  if (k < 1) throw std::invalid_argument("trees_of_order: k must be >= 1");
  if (k > 8)
    throw BudgetError("trees_of_order: enumeration budget is k <= 8, got " +
                      std::to_string(k));
  if (k == 1) return {LabelledTree(1, {})};
  if (k == 2) return {LabelledTree(2, {{0, 1}})};

  // Dedupe by canonical form before the (expensive) automorphism count.
  std::map<std::string, std::vector<std::pair<std::uint32_t, std::uint32_t>>>
      classes;
  std::vector<std::uint32_t> seq(k - 2, 0);
  while (true) {
    auto edges = pruefer_decode(seq, k);
    std::string form = canonical_form(k, edges);
    classes.try_emplace(std::move(form), std::move(edges));

    // Odometer over [0, k)^(k-2).
    std::size_t pos = 0;
    while (pos < seq.size() && ++seq[pos] == k) seq[pos++] = 0;
    if (pos == seq.size()) break;
  }
  std::vector<LabelledTree> out;
  out.reserve(classes.size());
  for (auto& [form, edges] : classes)
    out.emplace_back(k, std::move(edges));
  return out;
}

double t_isol(const LabelledTree& t, const StepKernel& k) {
  const std::size_t m = k.type_count();
  const Marginal lambda = marginal(k);

  // Leaf weight mu_x e^{-lambda(x)}; message passing toward vertex 0.
  std::vector<double> base(m);
  for (std::size_t x = 0; x < m; ++x)
    base[x] = k.mass(x) * std::exp(-lambda.per_type[x]);

  const auto adj = adjacency(t.order, t.edges);
  // Post-order over the tree rooted at 0.
  std::vector<std::uint32_t> order_stack{0}, post;
  std::vector<std::uint32_t> parent(t.order, t.order);
  while (!order_stack.empty()) {
    const std::uint32_t v = order_stack.back();
    order_stack.pop_back();
    post.push_back(v);
    for (std::uint32_t w : adj[v])
      if (w != parent[v]) {
        parent[w] = v;
        order_stack.push_back(w);
      }
  }
  std::reverse(post.begin(), post.end());

  std::vector<std::vector<double>> msg(t.order);
  for (std::uint32_t v : post) {
    std::vector<double> mv = base;
    for (std::uint32_t w : adj[v]) {
      if (w == parent[v]) continue;
      for (std::size_t x = 0; x < m; ++x) {
        double s = 0.0;
        for (std::size_t y = 0; y < m; ++y) s += k.value(x, y) * msg[w][y];
        mv[x] *= s;
      }
    }
    msg[v] = std::move(mv);
  }
  double total = 0.0;
  for (std::size_t x = 0; x < m; ++x) total += msg[0][x];
  return total;
}

PopulationLaw population_law_treesum(const StepKernel& k,
                                     std::uint64_t k_max) {
  if (k_max < 1 || k_max > 8)
    throw BudgetError("population_law_treesum: k_max must be in [1, 8]");
  PopulationLaw law;
  law.method = LawMethod::TreeSum;
  law.rho.resize(k_max);
  for (std::uint64_t j = 1; j <= k_max; ++j) {
    double sum = 0.0;
    for (const LabelledTree& t : trees_of_order(static_cast<std::uint32_t>(j)))
      sum += t_isol(t, k) / static_cast<double>(t.aut);
    law.rho[j - 1] = static_cast<double>(j) * sum;
  }
  double mass = 0.0;
  for (double r : law.rho) mass += r;
  law.tail = std::max(0.0, 1.0 - mass);
  return law;
}

std::vector<ContinuityRow> rho_continuity_probe(
    const StepKernel& k, const StepKernel& perturbation,
    const std::vector<double>& scales) {
  if (perturbation.type_count() != k.type_count())
    throw std::invalid_argument("rho_continuity_probe: partition mismatch");
  const std::size_t m = k.type_count();

  const double rho0 = survival_fixed_point(k).rho;
  std::vector<ContinuityRow> rows;
  for (double eps : scales) {
    std::vector<double> values(m * m);
    for (std::size_t i = 0; i < m * m; ++i) {
      values[i] = k.values()[i] + eps * perturbation.values()[i];
      if (values[i] < 0.0)
        throw std::invalid_argument(
            "rho_continuity_probe: k + eps*P negative at eps = " +
            std::to_string(eps));
    }
    StepKernel shifted(k.masses(), std::move(values));
    StepKernel scaled_p = scale(perturbation, eps);

    ContinuityRow row;
    row.epsilon = eps;
    row.perturbation_cutnorm = cutnorm_sets_exact(scaled_p).value;
    row.rho_delta = std::abs(survival_fixed_point(shifted).rho - rho0);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace cutgraph
