#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "cutgraph/graphgen.hpp"
#include "oracles.hpp"

using namespace cutgraph;

namespace {

// Encode a 3-vertex simple graph as a 3-bit mask over pairs 01, 02, 12.
unsigned graph3_code(const SparseGraph& g) {
  unsigned code = 0;
  for (auto [u, v] : g.edges) {
    if (u == 0 && v == 1) code |= 1;
    if (u == 0 && v == 2) code |= 2;
    if (u == 1 && v == 2) code |= 4;
  }
  return code;
}

}  // namespace

TEST_CASE("make_graph canonicalizes") {
  auto g = make_graph(4, {{2, 1}, {1, 2}, {0, 3}}, false);
  CHECK(g.edges == std::vector<std::pair<std::uint32_t, std::uint32_t>>{
                       {0, 3}, {1, 2}});
  auto multi = make_graph(4, {{2, 1}, {1, 2}}, true);
  CHECK(multi.edges.size() == 2);
  CHECK_THROWS_AS(make_graph(2, {{0, 2}}, false), std::invalid_argument);
  CHECK_THROWS_AS(make_graph(2, {{1, 1}}, false), std::invalid_argument);
}

TEST_CASE("degenerate matrices") {
  RngStream rng(1);
  const WeightMatrix zeros = WeightMatrix::dense(5, std::vector<double>(25, 0.0));
  CHECK(sample_bernoulli(zeros, rng).edges.empty());
  CHECK(sample_poisson_simple(zeros, rng).edges.empty());
  CHECK(sample_poisson_multi(zeros, rng).edges.empty());

  // Entries >= n clamp to probability one: complete graph.
  const std::size_t n = 6;
  std::vector<double> big(n * n, 100.0);
  const WeightMatrix full = WeightMatrix::dense(n, std::move(big));
  CHECK(sample_bernoulli(full, rng).edges.size() == n * (n - 1) / 2);
}

TEST_CASE("determinism: same seed, same graph") {
  const StepKernel k = StepKernel::constant(2.0);
  RngStream a(99), b(99);
  const WeightMatrix ma = sample_iid_types(k, 5000, a);
  const WeightMatrix mb = sample_iid_types(k, 5000, b);
  const SparseGraph ga = sample_bernoulli(ma, a);
  const SparseGraph gb = sample_bernoulli(mb, b);
  CHECK(ga.edges == gb.edges);

  RngStream c(100);
  const WeightMatrix mc = sample_iid_types(k, 5000, c);
  const SparseGraph gc = sample_bernoulli(mc, c);
  CHECK(ga.edges != gc.edges);
}

TEST_CASE("typed block sampler agrees with the dense pair scan") {
  // Same stream consumed differently, so compare counts statistically:
  // identical matrices, both representations, many small samples.
  const StepKernel table = StepKernel::uniform_masses(2, {3.0, 1.0, 1.0, 2.0});
  const std::vector<std::uint32_t> types{0, 1, 0, 1, 0, 1, 0, 1};
  const WeightMatrix typed = WeightMatrix::from_types(types, table);
  const WeightMatrix dense =
      WeightMatrix::dense(8, typed.as_kernel().values());

  RngStream rng(7);
  double typed_edges = 0, dense_edges = 0;
  const int reps = 30000;
  for (int r = 0; r < reps; ++r) {
    RngStream ra = rng.derive(2 * r), rb = rng.derive(2 * r + 1);
    typed_edges += sample_bernoulli(typed, ra).edges.size();
    dense_edges += sample_bernoulli(dense, rb).edges.size();
  }
  // Expected edge count ~ 4.3; agreement within a few standard errors.
  CHECK(typed_edges / reps ==
        doctest::Approx(dense_edges / reps).epsilon(0.03));
}

TEST_CASE("edge frequencies match the three models at 4 sigma") {
  const std::size_t n = 3;
  const std::vector<double> entries{0, 1.2, 0.4, 1.2, 0, 2.0, 0.4, 2.0, 0};
  const WeightMatrix a = WeightMatrix::dense(n, entries);
  const int reps = 1000000;

  std::map<std::pair<int, int>, int> bern, pois;
  std::map<std::pair<int, int>, long long> multi_count;
  RngStream rng(42);
  for (int r = 0; r < reps; ++r) {
    RngStream lr = rng.derive(r);
    for (auto [u, v] : sample_bernoulli(a, lr).edges) ++bern[{u, v}];
    for (auto [u, v] : sample_poisson_simple(a, lr).edges) ++pois[{u, v}];
    for (auto [u, v] : sample_poisson_multi(a, lr).edges)
      ++multi_count[{u, v}];
  }
  for (auto [u, v] : std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 2}}) {
    const double w = entries[u * n + v] / static_cast<double>(n);
    const double p_bern = std::min(w, 1.0);
    const double p_pois = -std::expm1(-w);
    const double se_b = std::sqrt(p_bern * (1 - p_bern) / reps);
    const double se_p = std::sqrt(p_pois * (1 - p_pois) / reps);
    CHECK(std::abs(bern[{u, v}] / double(reps) - p_bern) <= 4 * se_b);
    CHECK(std::abs(pois[{u, v}] / double(reps) - p_pois) <= 4 * se_p);
    // Poisson multiplicity mean w with variance w.
    const double se_m = std::sqrt(w / reps);
    CHECK(std::abs(multi_count[{u, v}] / double(reps) - w) <= 4 * se_m);
  }
}

TEST_CASE("poisson simple hits p = 1/2 at a = n ln 2") {
  const std::size_t n = 3;
  const double a = n * std::log(2.0);
  std::vector<double> entries(9, a);
  for (std::size_t i = 0; i < n; ++i) entries[i * n + i] = 0.0;
  const WeightMatrix m = WeightMatrix::dense(n, std::move(entries));
  RngStream rng(23);
  const int reps = 200000;
  long long edges = 0;
  for (int r = 0; r < reps; ++r) {
    RngStream lr = rng.derive(r);
    edges += sample_poisson_simple(m, lr).edges.size();
  }
  // 3 pairs at p = 1/2 each.
  const double mean = edges / double(reps);
  const double se = std::sqrt(3 * 0.25 / reps);
  CHECK(std::abs(mean - 1.5) <= 4 * se);
}

TEST_CASE("multigraph support is distributed as the Poisson simple graph") {
  const std::vector<double> entries{0, 1.2, 0.4, 1.2, 0, 2.0, 0.4, 2.0, 0};
  const WeightMatrix a = WeightMatrix::dense(3, entries);
  const int reps = 200000;
  std::map<unsigned, int> freq_multi, freq_simple;
  RngStream rng(24);
  for (int r = 0; r < reps; ++r) {
    RngStream lr = rng.derive(r);
    const SparseGraph multi = sample_poisson_multi(a, lr);
    ++freq_multi[graph3_code(make_graph(3, multi.edges, false))];
    ++freq_simple[graph3_code(sample_poisson_simple(a, lr))];
  }
  double tv = 0.0;
  for (unsigned code = 0; code < 8; ++code)
    tv += std::abs(freq_multi[code] - freq_simple[code]) / double(reps);
  CHECK(tv / 2 <= 0.012);
}

TEST_CASE("convert_matrix") {
  const WeightMatrix zero = WeightMatrix::dense(3, std::vector<double>(9, 0.0));
  CHECK(convert_matrix(zero).entries() == std::vector<double>(9, 0.0));

  // a = n/2 converts to n ln 2.
  const std::size_t n = 4;
  std::vector<double> half(n * n, 2.0);
  for (std::size_t i = 0; i < n; ++i) half[i * n + i] = 0.0;
  const WeightMatrix hm = WeightMatrix::dense(n, std::move(half));
  CHECK(convert_matrix(hm).entry(0, 1) ==
        doctest::Approx(4.0 * std::log(2.0)).epsilon(1e-14));

  // Small-entry series bound |a' - a| <= a^2/n (1 + a/n) for a/n <= 1/2.
  RngStream rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const double a = rng.uniform() * 2.0;  // n = 4, so a/n <= 1/2
    std::vector<double> e(16, a);
    for (int i = 0; i < 4; ++i) e[i * 4 + i] = 0.0;
    const WeightMatrix m = WeightMatrix::dense(4, std::move(e));
    const double converted = convert_matrix(m).entry(0, 1);
    CHECK(std::abs(converted - a) <= a * a / 4.0 * (1 + a / 4.0) + 1e-12);
    CHECK(converted >= a);  // -log(1-x) >= x
  }

  // Typed mode converts its table in place of the realized entries.
  const WeightMatrix typed =
      WeightMatrix::from_types({0, 0, 0, 0}, StepKernel::constant(2.0));
  const WeightMatrix tc = convert_matrix(typed);
  CHECK(tc.typed());
  CHECK(tc.entry(0, 1) ==
        doctest::Approx(-4.0 * std::log1p(-0.5)).epsilon(1e-14));
  CHECK(tc.entry(2, 2) == 0.0);

  std::vector<double> too_big(9, 5.0);
  CHECK_THROWS_AS(convert_matrix(WeightMatrix::dense(3, std::move(too_big))),
                  std::invalid_argument);
}

TEST_CASE("converted Bernoulli matches Poisson simple in distribution") {
  const std::vector<double> entries{0, 1.2, 0.4, 1.2, 0, 2.0, 0.4, 2.0, 0};
  const WeightMatrix a = WeightMatrix::dense(3, entries);
  const WeightMatrix converted = convert_matrix(a);
  const int reps = 200000;
  std::map<unsigned, int> freq_g, freq_p;
  RngStream rng(77);
  for (int r = 0; r < reps; ++r) {
    RngStream lr = rng.derive(r);
    ++freq_g[graph3_code(sample_bernoulli(a, lr))];
    ++freq_p[graph3_code(sample_poisson_simple(converted, lr))];
  }
  double tv = 0.0;
  for (unsigned code = 0; code < 8; ++code)
    tv += std::abs(freq_g[code] - freq_p[code]) / double(reps);
  CHECK(tv / 2 <= 0.012);
}

TEST_CASE("sample_iid_types") {
  RngStream rng(3);
  const WeightMatrix single = sample_iid_types(StepKernel::constant(1.5), 20, rng);
  CHECK(single.typed());
  CHECK(single.entry(0, 0) == 0.0);
  CHECK(single.entry(0, 1) == 1.5);

  const WeightMatrix zero = sample_iid_types(StepKernel::constant(0.0), 10, rng);
  CHECK(zero.max_entry() == 0.0);

  // Type frequencies match the masses at 3 sigma, n = 10^4.
  const StepKernel half = StepKernel::constant(1.0, 2);
  const WeightMatrix m = sample_iid_types(half, 10000, rng);
  std::size_t zeros_count = 0;
  for (std::uint32_t t : m.types()) zeros_count += t == 0;
  const double se = std::sqrt(0.25 / 10000);
  CHECK(std::abs(zeros_count / 10000.0 - 0.5) <= 3 * se + 1e-9);
}

TEST_CASE("polarity graph structure") {
  CHECK_THROWS_AS(polarity_graph(4), std::invalid_argument);
  CHECK_THROWS_AS(polarity_graph(9), std::invalid_argument);

  const SparseGraph g2 = polarity_graph(2);
  CHECK(g2.n == 7);

  const SparseGraph g3 = polarity_graph(3);
  CHECK(g3.n == 13);
  std::vector<int> degree(g3.n, 0);
  for (auto [u, v] : g3.edges) {
    ++degree[u];
    ++degree[v];
  }
  int deg_q = 0;
  for (int d : degree) {
    const bool ok = d == 3 || d == 4;
    CHECK(ok);
    deg_q += d == 3;
  }
  CHECK(deg_q == 4);  // q + 1 absolute points

  // Edge count from the degree census: (q+1)(n-1)/2 for odd prime q.
  const SparseGraph g13 = polarity_graph(13);
  CHECK(g13.n == 183);
  CHECK(g13.edges.size() == 14 * 182 / 2);

  // No loops, no duplicates.
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen(g13.edges.begin(),
                                                         g13.edges.end());
  CHECK(seen.size() == g13.edges.size());
  for (auto [u, v] : g13.edges) CHECK(u < v);
}

TEST_CASE("polarity graph is DISC-quasi-random at q = 101") {
  const SparseGraph g = polarity_graph(101);
  CHECK(g.n == 10303);
  CHECK(g.edges.size() == 525402);  // (q+1)(n-1)/2: q+1 absolute points
  const double n = g.n;
  const double p = 102.0 / n;
  std::vector<std::vector<std::uint32_t>> adj(g.n);
  for (auto [u, v] : g.edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  RngStream rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    // Random half of the vertices.
    std::vector<char> in(g.n, 0);
    std::uint32_t size = 0;
    for (std::uint32_t v = 0; v < g.n; ++v)
      if (rng.bernoulli(0.5)) {
        in[v] = 1;
        ++size;
      }
    double internal = 0;
    for (std::uint32_t v = 0; v < g.n; ++v)
      if (in[v])
        for (std::uint32_t w : adj[v]) internal += in[w];
    internal /= 2;
    const double expect = p * size * size / 2.0;
    CHECK(std::abs(internal - expect) / (p * n * n) <= 0.05);
  }
}

TEST_CASE("percolate") {
  RngStream rng(9);
  const SparseGraph g = oracles::random_graph(60, 0.5, rng);
  const SparseGraph kept = percolate(g, 1.0, rng);
  CHECK(kept.edges == g.edges);
  CHECK(percolate(g, 0.0, rng).edges.empty());

  // Binomial retention at keep = 1/2.
  const SparseGraph big = oracles::random_graph(150, 0.2, rng);
  const double mean = big.edges.size() / 2.0;
  const double sd = std::sqrt(big.edges.size() * 0.25);
  double total = 0;
  const int reps = 400;
  for (int r = 0; r < reps; ++r) {
    RngStream lr = rng.derive(r);
    total += percolate(big, 0.5, lr).edges.size();
  }
  CHECK(std::abs(total / reps - mean) <= 4 * sd / std::sqrt(reps));

  CHECK_THROWS_AS(percolate(g, 1.5, rng), std::invalid_argument);
}

TEST_CASE("constant-kernel sampling has the right edge count") {
  // binom(n, 2) pairs at probability c/n: mean (n-1) c / 2.
  const std::size_t n = 10000;
  const double c = 2.0;
  RngStream rng(10);
  const WeightMatrix a = sample_iid_types(StepKernel::constant(c), n, rng);
  double total = 0;
  const int reps = 40;
  for (int r = 0; r < reps; ++r) {
    RngStream lr = rng.derive(r);
    total += sample_bernoulli(a, lr).edges.size();
  }
  const double mean_edges = (n - 1) * c / 2.0;
  const double se = std::sqrt(mean_edges) / std::sqrt(double(reps));
  CHECK(std::abs(total / reps - mean_edges) <= 4 * se);
}
