#include "cutgraph/graphgen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cutgraph {

namespace {

using Edge = std::pair<std::uint32_t, std::uint32_t>;

enum class EdgeModel { Bernoulli, PoissonSimple, PoissonMulti };

double edge_probability(EdgeModel model, double value, double n) {
  switch (model) {
    case EdgeModel::Bernoulli:
      return std::min(value / n, 1.0);
    case EdgeModel::PoissonSimple:
      return -std::expm1(-value / n);
    case EdgeModel::PoissonMulti:
      return 0.0;  // multiplicities handled separately
  }
  return 0.0;
}

// Emit the indices of a Bernoulli(p) subset of [0, domain) via geometric
// skipping; O(1 + hits).
template <typename Emit>
void skip_sample(std::uint64_t domain, double p, RngStream& rng, Emit emit) {
  if (domain == 0 || p <= 0.0) return;
  if (p >= 1.0) {
    for (std::uint64_t i = 0; i < domain; ++i) emit(i);
    return;
  }
  const double log1mp = std::log1p(-p);
  std::uint64_t pos = 0;
  while (true) {
    const double skip =
        std::floor(std::log1p(-rng.uniform()) / log1mp);
    if (skip >= static_cast<double>(domain - pos)) return;
    pos += static_cast<std::uint64_t>(skip);
    emit(pos);
    if (++pos >= domain) return;
  }
}

// Unordered pairs {i < j} of a group of size s, indexed lexicographically.
Edge decode_triangular(std::uint64_t idx, std::uint64_t s) {
  // offset(i) = i*(s-1) - i*(i-1)/2 is the first index of row i.
  auto offset = [s](std::uint64_t i) {
    return i * (s - 1) - i * (i - 1) / 2;
  };
  const double sd = static_cast<double>(s);
  double guess =
      std::floor(((2.0 * sd - 1.0) -
                  std::sqrt((2.0 * sd - 1.0) * (2.0 * sd - 1.0) -
                            8.0 * static_cast<double>(idx))) /
                 2.0);
  std::uint64_t i = guess <= 0.0 ? 0 : static_cast<std::uint64_t>(guess);
  while (i + 1 < s && offset(i + 1) <= idx) ++i;
  while (i > 0 && offset(i) > idx) --i;
  const std::uint64_t j = idx - offset(i) + i + 1;
  return {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)};
}

Edge ordered(std::uint32_t u, std::uint32_t v) {
  return u < v ? Edge{u, v} : Edge{v, u};
}

void sample_typed_block(const std::vector<std::uint32_t>& ga,
                        const std::vector<std::uint32_t>& gb, bool same_group,
                        double value, double n, EdgeModel model,
                        RngStream& rng, std::vector<Edge>& out) {
  const std::uint64_t na = ga.size();
  const std::uint64_t nb = gb.size();
  const std::uint64_t domain = same_group ? na * (na - 1) / 2 : na * nb;
  if (domain == 0) return;

  auto emit_index = [&](std::uint64_t idx) {
    if (same_group) {
      const Edge e = decode_triangular(idx, na);
      out.push_back(ordered(ga[e.first], ga[e.second]));
    } else {
      out.push_back(ordered(ga[idx / nb], gb[idx % nb]));
    }
  };

  if (model == EdgeModel::PoissonMulti) {
    // Superposition: the block's multi-edge count is Poisson with the
    // summed mean, positions uniform.
    const double mean = (value / n) * static_cast<double>(domain);
    const std::uint64_t total = rng.poisson(mean);
    for (std::uint64_t t = 0; t < total; ++t) emit_index(rng.below(domain));
    return;
  }
  skip_sample(domain, edge_probability(model, value, n), rng, emit_index);
}

SparseGraph sample_graph(const WeightMatrix& a, RngStream& rng,
                         EdgeModel model) {
  const std::size_t n = a.size();
  std::vector<Edge> edges;

  if (a.typed()) {
    const StepKernel& table = a.table();
    const std::size_t m = table.type_count();
    std::vector<std::vector<std::uint32_t>> groups(m);
    for (std::uint32_t v = 0; v < n; ++v) groups[a.types()[v]].push_back(v);
    for (std::size_t p = 0; p < m; ++p)
      for (std::size_t q = p; q < m; ++q)
        sample_typed_block(groups[p], groups[q], p == q, table.value(p, q),
                           static_cast<double>(n), model, rng, edges);
  } else {
    // Pair scan; rows with no positive entry are skipped outright.
    std::vector<char> live(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && a.entry(i, j) > 0.0) {
          live[i] = 1;
          break;
        }
    for (std::size_t i = 0; i < n; ++i) {
      if (!live[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        const double v = a.entry(i, j);
        if (v <= 0.0) continue;
        if (model == EdgeModel::PoissonMulti) {
          const std::uint64_t c = rng.poisson(v / static_cast<double>(n));
          for (std::uint64_t t = 0; t < c; ++t)
            edges.emplace_back(static_cast<std::uint32_t>(i),
                               static_cast<std::uint32_t>(j));
        } else if (rng.bernoulli(
                       edge_probability(model, v, static_cast<double>(n)))) {
          edges.emplace_back(static_cast<std::uint32_t>(i),
                             static_cast<std::uint32_t>(j));
        }
      }
    }
  }

  std::sort(edges.begin(), edges.end());
  SparseGraph g;
  g.n = static_cast<std::uint32_t>(n);
  g.multigraph = model == EdgeModel::PoissonMulti;
  g.edges = std::move(edges);
  return g;
}

}  // namespace

SparseGraph make_graph(std::uint32_t n, std::vector<Edge> edges,
                       bool multigraph) {
  for (Edge& e : edges) {
    if (e.first >= n || e.second >= n)
      throw std::invalid_argument("edge endpoint out of range");
    if (e.first == e.second) throw std::invalid_argument("loops not allowed");
    if (e.first > e.second) std::swap(e.first, e.second);
  }
  std::sort(edges.begin(), edges.end());
  if (!multigraph)
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  SparseGraph g;
  g.n = n;
  g.edges = std::move(edges);
  g.multigraph = multigraph;
  return g;
}

SparseGraph sample_bernoulli(const WeightMatrix& a, RngStream& rng) {
  return sample_graph(a, rng, EdgeModel::Bernoulli);
}

SparseGraph sample_poisson_simple(const WeightMatrix& a, RngStream& rng) {
  return sample_graph(a, rng, EdgeModel::PoissonSimple);
}

SparseGraph sample_poisson_multi(const WeightMatrix& a, RngStream& rng) {
  return sample_graph(a, rng, EdgeModel::PoissonMulti);
}

WeightMatrix convert_matrix(const WeightMatrix& a) {
  const double n = static_cast<double>(a.size());
  auto convert = [n](double v) {
    if (v >= n)
      throw std::invalid_argument(
          "convert_matrix: entry " + std::to_string(v) +
          " >= n, the Poisson-equivalent intensity is undefined");
    return -n * std::log1p(-v / n);
  };
  if (a.typed()) {
    std::vector<double> values(a.table().values());
    for (double& v : values) v = convert(v);
    return WeightMatrix::from_types(
        a.types(), StepKernel(a.table().masses(), std::move(values)));
  }
  std::vector<double> entries(a.entries());
  for (double& v : entries) v = convert(v);
  return WeightMatrix::dense(a.size(), std::move(entries));
}

WeightMatrix sample_iid_types(const StepKernel& k, std::size_t n,
                              RngStream& rng) {
  if (n < 1) throw std::invalid_argument("sample_iid_types: n must be >= 1");
  const std::size_t m = k.type_count();
  std::vector<std::uint32_t> types(n);
  for (std::size_t v = 0; v < n; ++v) {
    double u = rng.uniform();
    std::size_t t = 0;
    for (; t + 1 < m; ++t) {
      if (u < k.mass(t)) break;
      u -= k.mass(t);
    }
    types[v] = static_cast<std::uint32_t>(t);
  }
  return WeightMatrix::from_types(std::move(types), k);
}

namespace {

bool is_prime(std::uint64_t q) {
  if (q < 2) return false;
  for (std::uint64_t d = 2; d * d <= q; ++d)
    if (q % d == 0) return false;
  return true;
}

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t q) {
  return a * b % q;
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t q) {
  std::uint64_t r = 1 % q;
  a %= q;
  while (e) {
    if (e & 1) r = mulmod(r, a, q);
    a = mulmod(a, a, q);
    e >>= 1;
  }
  return r;
}

struct Point {
  std::uint64_t x0, x1, x2;
};

// Scale so the first nonzero coordinate is 1.
Point canonical(Point p, std::uint64_t q) {
  std::uint64_t lead = p.x0 ? p.x0 : (p.x1 ? p.x1 : p.x2);
  const std::uint64_t inv = powmod(lead, q - 2, q);
  return {mulmod(p.x0, inv, q), mulmod(p.x1, inv, q), mulmod(p.x2, inv, q)};
}

std::uint32_t point_index(const Point& p, std::uint64_t q) {
  if (p.x0 == 1) return static_cast<std::uint32_t>(p.x1 * q + p.x2);
  if (p.x1 == 1) return static_cast<std::uint32_t>(q * q + p.x2);
  return static_cast<std::uint32_t>(q * q + q);
}

Point point_at(std::uint32_t idx, std::uint64_t q) {
  if (idx < q * q) return {1, idx / q, idx % q};
  if (idx < q * q + q) return {0, 1, idx - q * q};
  return {0, 0, 1};
}

}  // namespace

SparseGraph polarity_graph(std::uint64_t q) {
  if (!is_prime(q))
    throw std::invalid_argument(
        "polarity_graph: q = " + std::to_string(q) +
        " is not prime (prime-power fields are not implemented)");
  const std::uint64_t n = q * q + q + 1;
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>((q + 1) * n / 2));

  for (std::uint32_t idx = 0; idx < n; ++idx) {
    const Point x = point_at(idx, q);
    // Points on the polar line x0 y0 + x1 y1 + x2 y2 = 0: a projective
    // line through two independent solutions u, v, enumerated as
    // u + t v (t in GF(q)) and v itself.
    Point u{}, v{};
    if (x.x0 != 0) {
      const std::uint64_t inv = powmod(x.x0, q - 2, q);
      u = {mulmod(q - x.x1 % q, inv, q), 1, 0};
      v = {mulmod(q - x.x2 % q, inv, q), 0, 1};
    } else if (x.x1 != 0) {
      const std::uint64_t inv = powmod(x.x1, q - 2, q);
      u = {1, 0, 0};
      v = {0, mulmod(q - x.x2 % q, inv, q), 1};
    } else {
      u = {1, 0, 0};
      v = {0, 1, 0};
    }
    auto visit = [&](Point y) {
      y = canonical(y, q);
      const std::uint32_t jdx = point_index(y, q);
      if (jdx > idx) edges.emplace_back(idx, jdx);
    };
    for (std::uint64_t t = 0; t < q; ++t)
      visit({(u.x0 + mulmod(t, v.x0, q)) % q, (u.x1 + mulmod(t, v.x1, q)) % q,
             (u.x2 + mulmod(t, v.x2, q)) % q});
    visit(v);
  }

  std::sort(edges.begin(), edges.end());
  SparseGraph g;
  g.n = static_cast<std::uint32_t>(n);
  g.edges = std::move(edges);
  g.multigraph = false;
  return g;
}

SparseGraph percolate(const SparseGraph& g, double keep_prob, RngStream& rng) {
  if (keep_prob < 0.0 || keep_prob > 1.0)
    throw std::invalid_argument("percolate: keep_prob must be in [0, 1]");
  SparseGraph out;
  out.n = g.n;
  out.multigraph = g.multigraph;
  for (const Edge& e : g.edges)
    if (rng.bernoulli(keep_prob)) out.edges.push_back(e);
  return out;
}

}  // namespace cutgraph
