#include "supplygraph/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace supplygraph::kernels {

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
  omp_set_num_threads(std::max(1, n));
#else
  (void)n;
#endif
}

namespace {

// Reusable BFS state; `stamp` avoids clearing a visited array per origin.
struct BfsScratch {
  std::vector<std::uint32_t> stamp;
  std::uint32_t epoch = 0;
  std::vector<NodeIndex> frontier;
  std::vector<NodeIndex> next;

  explicit BfsScratch(std::size_t n) : stamp(n, 0) {}
};

ReachStats bfs_stats(const SupplyChainGraph& g, NodeIndex origin, Direction d, BfsScratch& s) {
  if (++s.epoch == 0) {
    std::fill(s.stamp.begin(), s.stamp.end(), 0);
    s.epoch = 1;
  }
  ReachStats r;
  s.frontier.assign(1, origin);
  s.stamp[origin] = s.epoch;
  std::uint32_t depth = 0;
  while (!s.frontier.empty()) {
    s.next.clear();
    for (NodeIndex u : s.frontier)
      for (const Adjacent& a : g.edges(u, d))
        if (s.stamp[a.node] != s.epoch) {
          s.stamp[a.node] = s.epoch;
          s.next.push_back(a.node);
        }
    if (s.next.empty()) break;
    ++depth;
    for (NodeIndex v : s.next) {
      NodeKind k = g.node(v).kind;
      ++r.per_kind[index_of(k)];
      if (is_model(k)) r.model_level = depth;
    }
    r.total += static_cast<std::uint32_t>(s.next.size());
    s.frontier.swap(s.next);
  }
  r.level = depth;
  return r;
}

NodeIndex find_root(std::vector<NodeIndex>& parent, NodeIndex x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

namespace serial {

std::vector<ReachStats> reach_stats(const SupplyChainGraph& g, std::span<const NodeIndex> origins,
                                    Direction d) {
  std::vector<ReachStats> out(origins.size());
  BfsScratch scratch(g.node_count());
  for (std::size_t i = 0; i < origins.size(); ++i) out[i] = bfs_stats(g, origins[i], d, scratch);
  return out;
}

std::vector<std::uint32_t> degrees(const SupplyChainGraph& g, DegreeDirection d) {
  std::vector<std::uint32_t> out(g.node_count());
  for (NodeIndex u = 0; u < g.node_count(); ++u)
    out[u] = static_cast<std::uint32_t>(d == DegreeDirection::Out ? g.out_edges(u).size()
                                                                  : g.in_edges(u).size());
  return out;
}

std::vector<NodeIndex> weak_labels(const SupplyChainGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<NodeIndex> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  for (NodeIndex u = 0; u < n; ++u)
    for (const Adjacent& a : g.out_edges(u)) {
      NodeIndex ru = find_root(parent, u);
      NodeIndex rv = find_root(parent, a.node);
      if (ru == rv) continue;
      // Smaller index becomes the root so labels are component minima.
      if (ru < rv) parent[rv] = ru;
      else parent[ru] = rv;
    }
  for (NodeIndex u = 0; u < n; ++u) parent[u] = find_root(parent, u);
  return parent;
}

}  // namespace serial

namespace parallel {

std::vector<ReachStats> reach_stats(const SupplyChainGraph& g, std::span<const NodeIndex> origins,
                                    Direction d) {
  std::vector<ReachStats> out(origins.size());
  const auto count = static_cast<std::int64_t>(origins.size());
#pragma omp parallel
  {
    BfsScratch scratch(g.node_count());
#pragma omp for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < count; ++i) out[i] = bfs_stats(g, origins[i], d, scratch);
  }
  return out;
}

std::vector<std::uint32_t> degrees(const SupplyChainGraph& g, DegreeDirection d) {
  const auto n = static_cast<std::int64_t>(g.node_count());
  std::vector<std::uint32_t> out(g.node_count());
#pragma omp parallel for schedule(static)
  for (std::int64_t u = 0; u < n; ++u)
    out[u] = static_cast<std::uint32_t>(d == DegreeDirection::Out ? g.out_edges(u).size()
                                                                  : g.in_edges(u).size());
  return out;
}

std::vector<NodeIndex> weak_labels(const SupplyChainGraph& g) {
  const auto n = static_cast<std::int64_t>(g.node_count());
  std::vector<NodeIndex> label(g.node_count());
  std::iota(label.begin(), label.end(), 0);
  // Min-label propagation with pointer jumping; labels only ever decrease,
  // so stale reads delay convergence but never break it.
  bool changed = true;
  while (changed) {
    changed = false;
#pragma omp parallel for schedule(dynamic, 1024) reduction(|| : changed)
    for (std::int64_t u = 0; u < n; ++u) {
      std::atomic_ref<NodeIndex> lu(label[u]);
      NodeIndex best = lu.load(std::memory_order_relaxed);
      for (const Adjacent& a : g.out_edges(static_cast<NodeIndex>(u)))
        best = std::min(best, std::atomic_ref<NodeIndex>(label[a.node]).load(std::memory_order_relaxed));
      for (const Adjacent& a : g.in_edges(static_cast<NodeIndex>(u)))
        best = std::min(best, std::atomic_ref<NodeIndex>(label[a.node]).load(std::memory_order_relaxed));
      best = std::min(best, std::atomic_ref<NodeIndex>(label[best]).load(std::memory_order_relaxed));
      if (best < lu.load(std::memory_order_relaxed)) {
        lu.store(best, std::memory_order_relaxed);
        changed = true;
      }
    }
#pragma omp parallel for schedule(static)
    for (std::int64_t u = 0; u < n; ++u) {
      std::atomic_ref<NodeIndex> lu(label[u]);
      NodeIndex l = lu.load(std::memory_order_relaxed);
      NodeIndex ll = std::atomic_ref<NodeIndex>(label[l]).load(std::memory_order_relaxed);
      while (ll < l) {
        l = ll;
        ll = std::atomic_ref<NodeIndex>(label[l]).load(std::memory_order_relaxed);
      }
      lu.store(l, std::memory_order_relaxed);
    }
  }
  return label;
}

}  // namespace parallel

}  // namespace supplygraph::kernels
