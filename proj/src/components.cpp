#include "cutgraph/components.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <thread>

namespace cutgraph {

namespace {

struct UnionFind {
  std::vector<std::uint32_t> parent;
  std::vector<std::uint32_t> size;

  explicit UnionFind(std::uint32_t n) : parent(n), size(n, 1) {
    std::iota(parent.begin(), parent.end(), 0);
  }

  std::uint32_t find(std::uint32_t x) {
    std::uint32_t root = x;
    while (parent[root] != root) root = parent[root];
    while (parent[x] != root) {
      std::uint32_t next = parent[x];
      parent[x] = root;
      x = next;
    }
    return root;
  }

  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size[a] < size[b]) std::swap(a, b);
    parent[b] = a;
    size[a] += size[b];
  }
};

}  // namespace

ComponentStats analyze(const SparseGraph& g) {
  ComponentStats stats;
  stats.n = g.n;
  if (g.n == 0) return stats;

  UnionFind uf(g.n);
  for (const auto& [u, v] : g.edges) uf.unite(u, v);

  // Distinct edges per component root: parallel edges collapse so the
  // tree test sees the simple underlying graph.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> distinct(g.edges);
  for (auto& e : distinct)
    if (e.first > e.second) std::swap(e.first, e.second);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()),
                 distinct.end());

  std::vector<std::uint64_t> edge_count(g.n, 0);
  for (const auto& [u, v] : distinct) ++edge_count[uf.find(u)];

  std::vector<std::uint64_t> sizes;
  for (std::uint32_t v = 0; v < g.n; ++v) {
    if (uf.find(v) != v) continue;
    const std::uint64_t k = uf.size[v];
    sizes.push_back(k);
    stats.nk[k] += k;
    if (edge_count[v] == k - 1)
      stats.nk_tree[k] += k;
    else
      stats.nk_cyc[k] += k;
  }
  stats.component_count = sizes.size();
  std::sort(sizes.rbegin(), sizes.rend());
  stats.c1 = sizes.empty() ? 0 : sizes[0];
  stats.c2 = sizes.size() < 2 ? 0 : sizes[1];
  return stats;
}

std::uint64_t n_at_least(const ComponentStats& stats, std::uint64_t omega) {
  if (omega < 1) throw std::invalid_argument("n_at_least: omega must be >= 1");
  std::uint64_t total = 0;
  for (auto it = stats.nk.lower_bound(omega); it != stats.nk.end(); ++it)
    total += it->second;
  return total;
}

namespace {

// Highest-degree-first vertex selection with lazy heap updates.
std::vector<std::uint32_t> greedy_vertex_targets(const SparseGraph& g,
                                                 std::uint64_t count) {
  std::vector<std::vector<std::uint32_t>> adj(g.n);
  for (const auto& [u, v] : g.edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  std::vector<std::uint64_t> degree(g.n);
  for (std::uint32_t v = 0; v < g.n; ++v) degree[v] = adj[v].size();

  using Entry = std::pair<std::uint64_t, std::uint32_t>;
  std::priority_queue<Entry> heap;
  for (std::uint32_t v = 0; v < g.n; ++v) heap.emplace(degree[v], v);

  std::vector<char> deleted(g.n, 0);
  std::vector<std::uint32_t> picked;
  while (picked.size() < count && !heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (deleted[v]) continue;
    if (d != degree[v]) {
      heap.emplace(degree[v], v);  // stale entry
      continue;
    }
    deleted[v] = 1;
    picked.push_back(v);
    for (std::uint32_t w : adj[v])
      if (!deleted[w] && degree[w] > 0) {
        --degree[w];
        heap.emplace(degree[w], w);
      }
  }
  return picked;
}

// BFS spanning-tree edge indices of the largest component of g.
std::vector<std::size_t> spanning_tree_of_largest(const SparseGraph& g) {
  if (g.n == 0) return {};
  std::vector<std::vector<std::pair<std::uint32_t, std::size_t>>> adj(g.n);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    adj[g.edges[e].first].emplace_back(g.edges[e].second, e);
    adj[g.edges[e].second].emplace_back(g.edges[e].first, e);
  }
  UnionFind uf(g.n);
  for (const auto& [u, v] : g.edges) uf.unite(u, v);
  std::uint32_t root = 0;
  for (std::uint32_t v = 0; v < g.n; ++v)
    if (uf.size[uf.find(v)] > uf.size[uf.find(root)]) root = v;

  std::vector<char> seen(g.n, 0);
  std::vector<std::size_t> tree;
  std::queue<std::uint32_t> bfs;
  bfs.push(root);
  seen[root] = 1;
  while (!bfs.empty()) {
    const std::uint32_t v = bfs.front();
    bfs.pop();
    for (auto [w, e] : adj[v])
      if (!seen[w]) {
        seen[w] = 1;
        tree.push_back(e);
        bfs.push(w);
      }
  }
  return tree;
}

}  // namespace

PerturbResult perturb(const SparseGraph& g, std::uint64_t del_vertices,
                      std::uint64_t del_edges, std::uint64_t add_edges,
                      PerturbMode mode, RngStream& rng) {
  if (del_vertices > g.n)
    throw std::invalid_argument("perturb: cannot delete more vertices than n");

  // Vertex deletion.
  std::vector<char> drop(g.n, 0);
  if (del_vertices > 0) {
    if (mode == PerturbMode::AdversarialGreedy) {
      for (std::uint32_t v : greedy_vertex_targets(g, del_vertices))
        drop[v] = 1;
    } else {
      // Partial Fisher-Yates over vertex ids.
      std::vector<std::uint32_t> ids(g.n);
      std::iota(ids.begin(), ids.end(), 0);
      for (std::uint64_t i = 0; i < del_vertices; ++i) {
        const std::uint64_t j = i + rng.below(g.n - i);
        std::swap(ids[i], ids[j]);
        drop[ids[i]] = 1;
      }
    }
  }
  std::vector<std::uint32_t> relabel(g.n, 0);
  std::uint32_t next = 0;
  for (std::uint32_t v = 0; v < g.n; ++v) relabel[v] = drop[v] ? 0 : next++;
  const std::uint32_t new_n = next;

  SparseGraph h;
  h.n = new_n;
  h.multigraph = g.multigraph;
  for (const auto& [u, v] : g.edges)
    if (!drop[u] && !drop[v]) h.edges.emplace_back(relabel[u], relabel[v]);

  PerturbResult res{SparseGraph{}, del_vertices, 0, 0, false};

  // Edge deletion.
  std::uint64_t want = del_edges;
  if (want >= h.edges.size()) {
    res.edges_exhausted = want > h.edges.size();
    res.edges_deleted = h.edges.size();
    h.edges.clear();
    want = 0;
  } else if (want > 0) {
    std::vector<char> kill(h.edges.size(), 0);
    if (mode == PerturbMode::AdversarialGreedy) {
      // Cut the largest component's spanning tree, recomputing between
      // rounds; any leftover budget is spent on random edges.
      std::uint64_t remaining = want;
      while (remaining > 0) {
        SparseGraph view;
        view.n = h.n;
        view.multigraph = h.multigraph;
        std::vector<std::size_t> back;
        for (std::size_t e = 0; e < h.edges.size(); ++e)
          if (!kill[e]) {
            view.edges.push_back(h.edges[e]);
            back.push_back(e);
          }
        const std::vector<std::size_t> tree = spanning_tree_of_largest(view);
        if (tree.empty()) break;
        for (std::size_t e : tree) {
          if (remaining == 0) break;
          kill[back[e]] = 1;
          --remaining;
        }
      }
      std::uint64_t killed = want - remaining;
      while (killed < want) {
        const std::size_t e = rng.below(h.edges.size());
        if (!kill[e]) {
          kill[e] = 1;
          ++killed;
        }
      }
    } else {
      std::uint64_t killed = 0;
      while (killed < want) {
        const std::size_t e = rng.below(h.edges.size());
        if (!kill[e]) {
          kill[e] = 1;
          ++killed;
        }
      }
    }
    std::vector<std::pair<std::uint32_t, std::uint32_t>> kept;
    kept.reserve(h.edges.size() - want);
    for (std::size_t e = 0; e < h.edges.size(); ++e)
      if (!kill[e]) kept.push_back(h.edges[e]);
    h.edges = std::move(kept);
    res.edges_deleted = want;
  }

  // Edge addition: uniform random non-loop pairs; simple graphs reject
  // duplicates.
  if (add_edges > 0 && new_n >= 2) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> existing(h.edges);
    std::sort(existing.begin(), existing.end());
    std::uint64_t added = 0;
    std::uint64_t attempts = 0;
    const std::uint64_t max_attempts = 100 * add_edges + 1000;
    while (added < add_edges && attempts < max_attempts) {
      ++attempts;
      std::uint32_t u = static_cast<std::uint32_t>(rng.below(new_n));
      std::uint32_t v = static_cast<std::uint32_t>(rng.below(new_n));
      if (u == v) continue;
      if (u > v) std::swap(u, v);
      if (!h.multigraph &&
          std::binary_search(existing.begin(), existing.end(),
                             std::make_pair(u, v)))
        continue;
      h.edges.emplace_back(u, v);
      if (!h.multigraph) {
        existing.emplace_back(u, v);
        std::sort(existing.begin(), existing.end());
      }
      ++added;
    }
    res.edges_added = added;
  }

  std::sort(h.edges.begin(), h.edges.end());
  res.graph = std::move(h);
  return res;
}

TailFrequencies ensemble_tail(const GraphSampler& sampler, std::uint64_t reps,
                              double threshold_lo, double threshold_hi,
                              RngStream& rng, unsigned threads) {
  if (reps < 1) throw std::invalid_argument("ensemble_tail: reps must be >= 1");
  std::atomic<std::uint64_t> below{0}, above{0}, second{0};
  std::atomic<std::uint64_t> cursor{0};

  auto worker = [&] {
    while (true) {
      const std::uint64_t r = cursor.fetch_add(1);
      if (r >= reps) return;
      RngStream local = rng.derive(r);
      const SparseGraph g = sampler(local);
      const ComponentStats s = analyze(g);
      const double n = static_cast<double>(g.n);
      if (static_cast<double>(s.c1) < threshold_lo * n) ++below;
      if (static_cast<double>(s.c1) > threshold_hi * n) ++above;
      if (static_cast<double>(s.c2) >= threshold_lo * n) ++second;
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  TailFrequencies out;
  out.reps = reps;
  out.below_lo = static_cast<double>(below) / static_cast<double>(reps);
  out.above_hi = static_cast<double>(above) / static_cast<double>(reps);
  out.second_big = static_cast<double>(second) / static_cast<double>(reps);
  return out;
}

}  // namespace cutgraph
