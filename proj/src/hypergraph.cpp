#include "cutgraph/hypergraph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "cutgraph/cutnorm.hpp"
#include "cutgraph/errors.hpp"

namespace cutgraph {

namespace {

double factorial(std::uint32_t r) {
  double f = 1.0;
  for (std::uint32_t i = 2; i <= r; ++i) f *= i;
  return f;
}

std::size_t pow_size(std::size_t m, std::uint32_t r) {
  std::size_t p = 1;
  for (std::uint32_t i = 0; i < r; ++i) p *= m;
  return p;
}

std::size_t flat_index(std::span<const std::uint32_t> idx, std::size_t m) {
  std::size_t f = 0;
  for (std::uint32_t t : idx) f = f * m + t;
  return f;
}

// Exact binomial coefficient; throws when the value would overflow the
// skip sampler's index space.
std::uint64_t binom_exact(std::uint64_t n, std::uint32_t k) {
  if (k > n) return 0;
  if (k > n - k) k = static_cast<std::uint32_t>(n - k);
  unsigned __int128 r = 1;
  for (std::uint32_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > static_cast<unsigned __int128>(1) << 62)
      throw BudgetError("binomial index space exceeds 2^62");
  }
  return static_cast<std::uint64_t>(r);
}

// rank-th (lexicographic) k-subset of [0, n).
std::vector<std::uint32_t> unrank_combination(std::uint64_t rank,
                                              std::uint64_t n,
                                              std::uint32_t k) {
  std::vector<std::uint32_t> out;
  out.reserve(k);
  std::uint64_t base = 0;
  std::uint64_t avail = n;
  for (std::uint32_t rem = k; rem > 0; --rem) {
    // Offset d of the next element among the remaining values: combos
    // with offset < d number C(avail, rem) - C(avail - d, rem).
    const std::uint64_t total = binom_exact(avail, rem);
    std::uint64_t lo = 0, hi = avail - rem;  // largest feasible offset
    while (lo < hi) {
      const std::uint64_t mid = lo + (hi - lo + 1) / 2;
      if (total - binom_exact(avail - mid, rem) <= rank)
        lo = mid;
      else
        hi = mid - 1;
    }
    rank -= total - binom_exact(avail - lo, rem);
    out.push_back(static_cast<std::uint32_t>(base + lo));
    base += lo + 1;
    avail -= lo + 1;
  }
  return out;
}

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
    const double skip = std::floor(std::log1p(-rng.uniform()) / log1mp);
    if (skip >= static_cast<double>(domain - pos)) return;
    pos += static_cast<std::uint64_t>(skip);
    emit(pos);
    if (++pos >= domain) return;
  }
}

void check_symmetry(const std::vector<double>& masses, const ArityKernel& a) {
  const std::size_t m = masses.size();
  const std::size_t total = pow_size(m, a.arity);
  if (a.values.size() != total)
    throw std::invalid_argument("arity-" + std::to_string(a.arity) +
                                " kernel needs m^r values");
  auto value_at = [&](std::span<const std::uint32_t> idx) {
    return a.values[flat_index(idx, m)];
  };
  auto check_tuple = [&](std::vector<std::uint32_t> idx) {
    std::vector<std::uint32_t> sorted = idx;
    std::sort(sorted.begin(), sorted.end());
    if (value_at(idx) != value_at(sorted))
      throw std::invalid_argument("hyperkernel values must be symmetric "
                                  "under coordinate permutations");
  };
  if (total <= 20000) {
    std::vector<std::uint32_t> idx(a.arity, 0);
    for (std::size_t f = 0; f < total; ++f) {
      std::size_t rest = f;
      for (std::uint32_t pos = a.arity; pos-- > 0;) {
        idx[pos] = static_cast<std::uint32_t>(rest % m);
        rest /= m;
      }
      check_tuple(idx);
    }
  } else {
    // Spot checks on a fixed derived stream.
    RngStream probe(0x73796d6d, a.arity);
    for (int t = 0; t < 2000; ++t) {
      std::vector<std::uint32_t> idx(a.arity);
      for (auto& x : idx) x = static_cast<std::uint32_t>(probe.below(m));
      check_tuple(idx);
    }
  }
}

}  // namespace

HyperStepKernel::HyperStepKernel(std::vector<double> masses,
                                 std::vector<ArityKernel> layers)
    : masses_(std::move(masses)), layers_(std::move(layers)) {
  double sum = 0.0;
  for (double mu : masses_) {
    if (!(mu > 0.0)) throw std::invalid_argument("type masses must be > 0");
    sum += mu;
  }
  if (masses_.empty() || std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("type masses must sum to 1");
  std::sort(layers_.begin(), layers_.end(),
            [](const ArityKernel& a, const ArityKernel& b) {
              return a.arity < b.arity;
            });
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (layers_[i].arity < 2)
      throw std::invalid_argument("hyperkernel arities start at 2");
    if (i > 0 && layers_[i].arity == layers_[i - 1].arity)
      throw std::invalid_argument("duplicate arity layer");
    for (double v : layers_[i].values)
      if (v < 0.0)
        throw std::invalid_argument("hyperkernel values must be nonnegative");
    check_symmetry(masses_, layers_[i]);
  }
}

HyperStepKernel HyperStepKernel::constant(double value, std::uint32_t arity) {
  return HyperStepKernel({1.0}, {ArityKernel{arity, {value}}});
}

double HyperStepKernel::integral() const {
  double total = 0.0;
  for (const ArityKernel& a : layers_) {
    ArityKernel cur = a;
    while (cur.arity > 0) cur = marginalize_last(masses_, cur);
    total += static_cast<double>(a.arity) * cur.values[0];
  }
  return total;
}

SparseHypermatrix::SparseHypermatrix(std::uint32_t n, std::uint32_t max_arity)
    : n_(n), max_arity_(max_arity) {
  if (n < 1) throw std::invalid_argument("hypermatrix needs n >= 1");
  if (max_arity < 2) throw std::invalid_argument("hypermatrix needs R >= 2");
}

void SparseHypermatrix::set(std::vector<std::uint32_t> tuple, double value) {
  if (tuple.size() < 2 || tuple.size() > max_arity_)
    throw std::invalid_argument("hypermatrix tuple arity out of range");
  std::sort(tuple.begin(), tuple.end());
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    if (tuple[i] >= n_)
      throw std::invalid_argument("hypermatrix index out of range");
    if (i > 0 && tuple[i] == tuple[i - 1])
      throw std::invalid_argument(
          "hypermatrix tuples must have distinct indices");
  }
  if (value < 0.0)
    throw std::invalid_argument("hypermatrix values must be nonnegative");
  if (value == 0.0)
    entries_.erase(tuple);
  else
    entries_[std::move(tuple)] = value;
}

double SparseHypermatrix::value(std::vector<std::uint32_t> tuple) const {
  std::sort(tuple.begin(), tuple.end());
  for (std::size_t i = 1; i < tuple.size(); ++i)
    if (tuple[i] == tuple[i - 1]) return 0.0;  // diagonal entries are 0
  const auto it = entries_.find(tuple);
  return it == entries_.end() ? 0.0 : it->second;
}

Hypergraph sample_hypergraph(const SparseHypermatrix& h, RngStream& rng,
                             HyperVariant variant) {
  Hypergraph out;
  out.n = h.size();
  const double n = static_cast<double>(h.size());
  for (const auto& [tuple, value] : h.entries()) {
    const std::uint32_t r = static_cast<std::uint32_t>(tuple.size());
    const double mean = factorial(r) * value / std::pow(n, r - 1);
    if (variant == HyperVariant::Bernoulli) {
      if (rng.bernoulli(std::min(mean, 1.0))) out.edges.push_back(tuple);
    } else {
      const std::uint64_t copies = rng.poisson(mean);
      for (std::uint64_t c = 0; c < copies; ++c) out.edges.push_back(tuple);
    }
  }
  std::sort(out.edges.begin(), out.edges.end());
  return out;
}

TypedHypergraphSample sample_hypergraph_kernel(const HyperStepKernel& k,
                                               std::uint32_t n, RngStream& rng,
                                               HyperVariant variant) {
  if (n < 2) throw std::invalid_argument("sample_hypergraph_kernel: n >= 2");
  const std::size_t m = k.type_count();

  std::vector<std::uint32_t> types(n);
  for (auto& t : types) {
    double u = rng.uniform();
    std::size_t x = 0;
    for (; x + 1 < m; ++x) {
      if (u < k.masses()[x]) break;
      u -= k.masses()[x];
    }
    t = static_cast<std::uint32_t>(x);
  }

  std::vector<std::vector<std::uint32_t>> groups(m);
  for (std::uint32_t v = 0; v < n; ++v) groups[types[v]].push_back(v);

  Hypergraph out;
  out.n = n;

  for (const ArityKernel& layer : k.layers()) {
    const std::uint32_t r = layer.arity;
    const double norm = factorial(r) / std::pow(static_cast<double>(n), r - 1);

    // Iterate multisets of types (c_0..c_{m-1}), sum c = r, as the
    // nondecreasing type tuple they induce.
    std::vector<std::uint32_t> counts(m, 0);
    std::vector<std::uint32_t> tuple_types;
    auto sample_block = [&] {
      // Kernel value at the sorted type tuple of this block.
      tuple_types.clear();
      for (std::size_t a = 0; a < m; ++a)
        for (std::uint32_t c = 0; c < counts[a]; ++c)
          tuple_types.push_back(static_cast<std::uint32_t>(a));
      const double v = layer.values[flat_index(tuple_types, m)];
      if (v <= 0.0) return;

      std::uint64_t domain = 1;
      for (std::size_t a = 0; a < m; ++a) {
        if (counts[a] == 0) continue;
        domain *= binom_exact(groups[a].size(), counts[a]);
        if (domain == 0) return;
      }

      auto emit_index = [&](std::uint64_t idx) {
        std::vector<std::uint32_t> edge;
        edge.reserve(r);
        // Mixed-radix split over per-type combination spaces.
        for (std::size_t a = m; a-- > 0;) {
          if (counts[a] == 0) continue;
          const std::uint64_t block = binom_exact(groups[a].size(), counts[a]);
          const std::uint64_t sub = idx % block;
          idx /= block;
          for (std::uint32_t pos :
               unrank_combination(sub, groups[a].size(), counts[a]))
            edge.push_back(groups[a][pos]);
        }
        std::sort(edge.begin(), edge.end());
        out.edges.push_back(std::move(edge));
      };

      const double mean = norm * v;
      if (variant == HyperVariant::Bernoulli) {
        skip_sample(domain, std::min(mean, 1.0), rng, emit_index);
      } else {
        const std::uint64_t total =
            rng.poisson(mean * static_cast<double>(domain));
        for (std::uint64_t t = 0; t < total; ++t)
          emit_index(rng.below(domain));
      }
    };

    // Enumerate compositions c of r over m types (nondecreasing tuples).
    std::vector<std::uint32_t> stackv;
    auto recurse = [&](auto&& self, std::size_t type, std::uint32_t left) -> void {
      if (type + 1 == m) {
        counts[type] = left;
        sample_block();
        counts[type] = 0;
        return;
      }
      for (std::uint32_t c = 0; c <= left; ++c) {
        counts[type] = c;
        self(self, type + 1, left - c);
      }
      counts[type] = 0;
    };
    recurse(recurse, 0, r);
  }

  std::sort(out.edges.begin(), out.edges.end());
  return {std::move(types), std::move(out)};
}

SparseGraph clique_projection(const Hypergraph& h) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (const auto& edge : h.edges)
    for (std::size_t i = 0; i < edge.size(); ++i)
      for (std::size_t j = i + 1; j < edge.size(); ++j)
        pairs.emplace_back(edge[i], edge[j]);
  return make_graph(h.n, std::move(pairs), false);
}

SparseGraph one_edge_projection(const Hypergraph& h, RngStream& rng) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  pairs.reserve(h.edges.size());
  for (const auto& edge : h.edges) {
    const std::uint64_t r = edge.size();
    std::uint64_t pick = rng.below(r * (r - 1) / 2);
    // Row-by-row walk; r <= a handful so this is cheap.
    std::uint64_t i = 0;
    while (pick >= r - 1 - i) {
      pick -= r - 1 - i;
      ++i;
    }
    const std::uint64_t j = i + 1 + pick;
    pairs.emplace_back(edge[i], edge[j]);
  }
  std::sort(pairs.begin(), pairs.end());
  SparseGraph g;
  g.n = h.n;
  g.multigraph = true;
  g.edges = std::move(pairs);
  return g;
}

WeightMatrix marginal_matrix(const SparseHypermatrix& h) {
  const std::uint32_t n = h.size();
  std::vector<double> entries(static_cast<std::size_t>(n) * n, 0.0);
  const double dn = static_cast<double>(n);
  for (const auto& [tuple, value] : h.entries()) {
    const std::uint32_t r = static_cast<std::uint32_t>(tuple.size());
    // Each ordered pair of tuple members receives r(r-1) * (r-2)! * h /
    // n^{r-2} = r! h / n^{r-2}: the (r-2)! orderings of the remaining
    // coordinates, summed with weight n^{-(r-2)} and scaled by r(r-1).
    const double w = factorial(r) * value / std::pow(dn, r - 2);
    for (std::size_t i = 0; i < tuple.size(); ++i)
      for (std::size_t j = i + 1; j < tuple.size(); ++j) {
        entries[static_cast<std::size_t>(tuple[i]) * n + tuple[j]] += w;
        entries[static_cast<std::size_t>(tuple[j]) * n + tuple[i]] += w;
      }
  }
  return WeightMatrix::dense(n, std::move(entries));
}

ArityKernel marginalize_last(std::span<const double> masses,
                             const ArityKernel& a) {
  const std::size_t m = masses.size();
  if (a.arity < 1) throw std::invalid_argument("cannot marginalize arity 0");
  const std::size_t out_size = pow_size(m, a.arity - 1);
  ArityKernel out{a.arity - 1, std::vector<double>(out_size, 0.0)};
  for (std::size_t p = 0; p < out_size; ++p) {
    double s = 0.0;
    for (std::size_t t = 0; t < m; ++t) s += a.values[p * m + t] * masses[t];
    out.values[p] = s;
  }
  return out;
}

StepKernel edge_kernel(const HyperStepKernel& k) {
  const std::size_t m = k.type_count();
  std::vector<double> values(m * m, 0.0);
  for (const ArityKernel& layer : k.layers()) {
    ArityKernel cur = layer;
    while (cur.arity > 2) cur = marginalize_last(k.masses(), cur);
    const double f = static_cast<double>(layer.arity) *
                     static_cast<double>(layer.arity - 1);
    for (std::size_t i = 0; i < m * m; ++i) values[i] += f * cur.values[i];
  }
  return StepKernel(k.masses(), std::move(values));
}

Marginal hyper_marginal(const HyperStepKernel& k) {
  const std::size_t m = k.type_count();
  Marginal out;
  out.per_type.assign(m, 0.0);
  for (const ArityKernel& layer : k.layers()) {
    ArityKernel cur = layer;
    while (cur.arity > 1) cur = marginalize_last(k.masses(), cur);
    for (std::size_t i = 0; i < m; ++i)
      out.per_type[i] += static_cast<double>(layer.arity) * cur.values[i];
  }
  return out;
}

HyperStepKernel hyperkernel_of(const SparseHypermatrix& h) {
  const std::size_t n = h.size();
  std::vector<double> masses(n, 1.0 / static_cast<double>(n));
  std::vector<ArityKernel> layers;
  for (std::uint32_t r = 2; r <= h.max_arity(); ++r) {
    ArityKernel layer{r, std::vector<double>(pow_size(n, r), 0.0)};
    layers.push_back(std::move(layer));
  }
  for (const auto& [tuple, value] : h.entries()) {
    const std::uint32_t r = static_cast<std::uint32_t>(tuple.size());
    ArityKernel& layer = layers[r - 2];
    std::vector<std::uint32_t> perm = tuple;
    std::sort(perm.begin(), perm.end());
    do {
      layer.values[flat_index(perm, n)] = value;
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return HyperStepKernel(std::move(masses), std::move(layers));
}

GwOutcome simulate_hyper_gw(const HyperStepKernel& k, std::uint64_t pop_cap,
                            std::uint64_t gen_cap, RngStream& rng) {
  if (pop_cap < 1 || gen_cap < 1)
    throw std::invalid_argument("simulate_hyper_gw: caps must be >= 1");
  const std::size_t m = k.type_count();

  // Prefix tables per layer: tables[s] has m^s entries, the mu-integral
  // of the trailing arity-s..r coordinates; tables[1][x] = lambda_r(x).
  struct Layer {
    std::uint32_t arity;
    std::vector<std::vector<double>> prefix;  // prefix[s], s = 1..arity
  };
  std::vector<Layer> layers;
  for (const ArityKernel& a : k.layers()) {
    Layer layer;
    layer.arity = a.arity;
    layer.prefix.assign(a.arity + 1, {});
    ArityKernel cur = a;
    layer.prefix[a.arity] = cur.values;
    for (std::uint32_t s = a.arity; s > 1; --s) {
      cur = marginalize_last(k.masses(), cur);
      layer.prefix[s - 1] = cur.values;
    }
    layers.push_back(std::move(layer));
  }

  std::vector<std::uint64_t> generation(m, 0);
  {
    double u = rng.uniform();
    std::size_t t = 0;
    for (; t + 1 < m; ++t) {
      if (u < k.masses()[t]) break;
      u -= k.masses()[t];
    }
    generation[t] = 1;
  }

  GwOutcome out;
  out.total = 1;
  for (out.generations = 0; out.generations < gen_cap; ++out.generations) {
    std::vector<std::uint64_t> next(m, 0);
    std::uint64_t alive = 0;
    for (std::size_t x = 0; x < m && !out.cap_reached; ++x) {
      if (generation[x] == 0) continue;
      for (const Layer& layer : layers) {
        const double lambda = layer.prefix[1][x];
        if (lambda <= 0.0) continue;
        const double mean = static_cast<double>(generation[x]) *
                            static_cast<double>(layer.arity) * lambda;
        const std::uint64_t edges = rng.poisson(mean);
        for (std::uint64_t e = 0; e < edges; ++e) {
          // Draw the r-1 remaining endpoint types sequentially from the
          // conditional chain.
          std::vector<std::uint32_t> prefix{static_cast<std::uint32_t>(x)};
          for (std::uint32_t s = 1; s < layer.arity; ++s) {
            const double denom =
                layer.prefix[s][flat_index(prefix, m)];
            double u = rng.uniform() * denom;
            std::size_t t = 0;
            for (; t + 1 < m; ++t) {
              prefix.push_back(static_cast<std::uint32_t>(t));
              const double w =
                  k.masses()[t] * layer.prefix[s + 1][flat_index(prefix, m)];
              prefix.pop_back();
              if (u < w) break;
              u -= w;
            }
            prefix.push_back(static_cast<std::uint32_t>(t));
            ++next[t];
            ++alive;
          }
          if (out.total + alive > pop_cap) {
            out.cap_reached = true;
            break;
          }
        }
        if (out.cap_reached) break;
      }
    }
    out.total += alive;
    if (out.cap_reached) return out;
    if (alive == 0) return out;
    generation = std::move(next);
  }
  out.cap_reached = true;
  return out;
}

namespace {

void require_hyper_budget(std::size_t m, std::uint32_t arity) {
  if (arity > 3 || arity < 2)
    throw BudgetError("hyper_cutnorm_exact: arity budget is r in {2, 3}");
  if (m > 10)
    throw BudgetError("hyper_cutnorm_exact: type budget is m <= 10, got " +
                      std::to_string(m));
}

}  // namespace

double hyper_cutnorm_exact(std::span<const double> masses,
                           const ArityKernel& a) {
  const std::size_t m = masses.size();
  require_hyper_budget(m, a.arity);
  if (a.values.size() != pow_size(m, a.arity))
    throw std::invalid_argument("hyper_cutnorm_exact: value size mismatch");

  if (a.arity == 2) {
    std::vector<double> mvec(masses.begin(), masses.end());
    StepKernel k(std::move(mvec), a.values, StepKernel::Sign::Signed);
    return cutnorm_sets_exact(k).value;
  }

  // r = 3: enumerate S1 and S2, close S3 per sign. B[j*m+t] tracks the
  // S1-partial sums, c[t] the S2-partials of B.
  const std::uint32_t total = 1u << m;
  std::vector<double> b(m * m, 0.0), c(m, 0.0);
  double best = 0.0;

  std::uint32_t mask1 = 0;
  for (std::uint32_t g1 = 1; g1 < total; ++g1) {
    const std::uint32_t gray1 = g1 ^ (g1 >> 1);
    const std::uint32_t flip1 = gray1 ^ mask1;
    const std::size_t i = static_cast<std::size_t>(std::countr_zero(flip1));
    const double s1 = (gray1 & flip1) ? 1.0 : -1.0;
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t t = 0; t < m; ++t)
        b[j * m + t] +=
            s1 * masses[i] * a.values[(i * m + j) * m + t];
    mask1 = gray1;

    std::fill(c.begin(), c.end(), 0.0);
    std::uint32_t mask2 = 0;
    for (std::uint32_t g2 = 1; g2 < total; ++g2) {
      const std::uint32_t gray2 = g2 ^ (g2 >> 1);
      const std::uint32_t flip2 = gray2 ^ mask2;
      const std::size_t j =
          static_cast<std::size_t>(std::countr_zero(flip2));
      const double s2 = (gray2 & flip2) ? 1.0 : -1.0;
      for (std::size_t t = 0; t < m; ++t)
        c[t] += s2 * masses[j] * b[j * m + t];
      mask2 = gray2;

      double pos = 0.0, neg = 0.0;
      for (std::size_t t = 0; t < m; ++t) {
        const double w = masses[t] * c[t];
        if (w > 0.0)
          pos += w;
        else
          neg -= w;
      }
      best = std::max({best, pos, neg});
    }
  }
  return best;
}

double hyper_cutnorm_weighted(std::span<const double> masses,
                              std::span<const ArityKernel> layers) {
  double total = 0.0;
  for (const ArityKernel& a : layers)
    total += static_cast<double>(a.arity) * hyper_cutnorm_exact(masses, a);
  return total;
}

}  // namespace cutgraph
