#pragma once

// Shared fixtures and brute-force oracles. Nothing here calls into the
// traversal, component or community code it is used to check.

#include <cstdint>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "supplygraph/graph.hpp"
#include "supplygraph/ingest.hpp"

namespace testsupport {

using namespace supplygraph;

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(SUPPLYGRAPH_FIXTURE_DIR) / name;
}

inline std::string node_name(std::size_t i) {
  return "n" + std::string(i < 10 ? "0" : "") + std::to_string(i);
}

/// Random graph respecting endpoint rules; cycles allowed among models and
/// among datasets.
inline SupplyChainGraph random_graph(std::mt19937_64& rng, std::size_t max_nodes = 12,
                                     double edge_prob = 0.18) {
  std::uniform_int_distribution<std::size_t> size_dist(1, max_nodes);
  std::uniform_int_distribution<int> kind_dist(0, 5);
  std::bernoulli_distribution has_edge(edge_prob);
  const std::size_t n = size_dist(rng);
  GraphBuilder b;
  std::vector<NodeKind> kinds;
  for (std::size_t i = 0; i < n; ++i) {
    kinds.push_back(static_cast<NodeKind>(kind_dist(rng)));
    b.add_node(Node{NodeId(node_name(i)), kinds.back(), std::nullopt, true});
  }
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v) {
      if (u == v || !has_edge(rng)) continue;
      const bool du = kinds[u] == NodeKind::Dataset;
      const bool dv = kinds[v] == NodeKind::Dataset;
      EdgeKind k;
      if (du && dv) k = static_cast<EdgeKind>(5 + rng() % 3);
      else if (du) k = EdgeKind::TrainedOn;
      else if (!dv) k = static_cast<EdgeKind>(rng() % 4);
      else continue;
      b.add_edge(Edge{NodeId(node_name(u)), NodeId(node_name(v)), k});
    }
  return b.freeze();
}

/// reach[u][v] == true iff v is reachable from u by a non-empty path,
/// computed by relaxing every edge until nothing changes.
inline std::vector<std::vector<bool>> transitive_closure(const SupplyChainGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  std::vector<Edge> edges = g.edge_list();
  for (const Edge& e : edges) reach[*g.find(e.src.str())][*g.find(e.dst.str())] = true;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Edge& e : edges) {
      const std::size_t s = *g.find(e.src.str());
      const std::size_t d = *g.find(e.dst.str());
      for (std::size_t u = 0; u < n; ++u)
        if ((u == s || reach[u][s]) && !reach[u][d]) {
          reach[u][d] = true;
          changed = true;
        }
    }
  }
  return reach;
}

/// Shortest-path distances by repeated relaxation (unit weights).
inline std::vector<std::vector<std::size_t>> distances(const SupplyChainGraph& g) {
  const std::size_t n = g.node_count();
  const std::size_t inf = n + 1;
  std::vector<std::vector<std::size_t>> dist(n, std::vector<std::size_t>(n, inf));
  for (std::size_t u = 0; u < n; ++u) dist[u][u] = 0;
  std::vector<Edge> edges = g.edge_list();
  for (std::size_t round = 0; round < n; ++round)
    for (const Edge& e : edges) {
      const std::size_t s = *g.find(e.src.str());
      const std::size_t d = *g.find(e.dst.str());
      for (std::size_t u = 0; u < n; ++u)
        if (dist[u][s] < inf && dist[u][s] + 1 < dist[u][d]) dist[u][d] = dist[u][s] + 1;
    }
  return dist;
}

/// Equivalence classes of mutual reachability, as sets of node indices.
inline std::set<std::set<NodeIndex>> scc_classes_brute_force(const SupplyChainGraph& g) {
  auto reach = transitive_closure(g);
  std::set<std::set<NodeIndex>> out;
  for (NodeIndex u = 0; u < g.node_count(); ++u) {
    std::set<NodeIndex> cls{u};
    for (NodeIndex v = 0; v < g.node_count(); ++v)
      if (reach[u][v] && reach[v][u]) cls.insert(v);
    out.insert(cls);
  }
  return out;
}

/// Undirected reachability classes.
inline std::set<std::set<NodeIndex>> wcc_classes_brute_force(const SupplyChainGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::vector<bool>> conn(n, std::vector<bool>(n, false));
  for (std::size_t u = 0; u < n; ++u) conn[u][u] = true;
  for (const Edge& e : g.edge_list()) {
    auto s = *g.find(e.src.str());
    auto d = *g.find(e.dst.str());
    conn[s][d] = conn[d][s] = true;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (conn[i][k] && conn[k][j]) conn[i][j] = true;
  std::set<std::set<NodeIndex>> out;
  for (NodeIndex u = 0; u < n; ++u) {
    std::set<NodeIndex> cls;
    for (NodeIndex v = 0; v < n; ++v)
      if (conn[u][v]) cls.insert(v);
    out.insert(cls);
  }
  return out;
}

/// Modularity straight from the definition over the undirected simple
/// projection: Q = 1/2m * sum_ij [A_ij - k_i k_j / 2m] delta(c_i, c_j).
inline double modularity_by_definition(const SupplyChainGraph& g, const std::vector<std::int64_t>& c) {
  const std::size_t n = g.node_count();
  std::vector<std::vector<int>> a(n, std::vector<int>(n, 0));
  for (const Edge& e : g.edge_list()) {
    auto s = *g.find(e.src.str());
    auto d = *g.find(e.dst.str());
    a[s][d] = a[d][s] = 1;
  }
  std::vector<double> k(n, 0.0);
  double two_m = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      k[i] += a[i][j];
      two_m += a[i][j];
    }
  if (two_m == 0.0) return 0.0;
  double q = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (c[i] == c[j]) q += a[i][j] - k[i] * k[j] / two_m;
  return q / two_m;
}

/// Best modularity over every set partition (restricted growth strings).
inline std::pair<double, std::vector<std::int64_t>> exhaustive_best_partition(const SupplyChainGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::int64_t> rgs(n, 0), best = rgs;
  double best_q = modularity_by_definition(g, rgs);
  if (n == 0) return {0.0, {}};
  std::vector<std::int64_t> maxp(n, 0);
  for (;;) {
    // next restricted growth string
    std::size_t i = n - 1;
    while (i > 0 && rgs[i] > maxp[i - 1]) --i;
    if (i == 0) break;
    ++rgs[i];
    for (std::size_t j = i; j < n; ++j) {
      if (j > i) rgs[j] = 0;
      maxp[j] = std::max(j ? maxp[j - 1] : 0, rgs[j]);
    }
    double q = modularity_by_definition(g, rgs);
    if (q > best_q) {
      best_q = q;
      best = rgs;
    }
  }
  return {best_q, best};
}

/// Builds an undirected-looking model graph from index pairs (u -> v finetune).
inline SupplyChainGraph model_graph(std::size_t n, const std::vector<std::pair<int, int>>& edges) {
  GraphBuilder b;
  for (std::size_t i = 0; i < n; ++i) b.add_node(Node{NodeId(node_name(i)), NodeKind::FineTune, std::nullopt, true});
  for (auto [u, v] : edges)
    b.add_edge(Edge{NodeId(node_name(u)), NodeId(node_name(v)), EdgeKind::FineTune});
  return b.freeze();
}

/// Random snapshot over a fixed pool of ids, exercising every evidence
/// source: structured fields, cross-reference URLs, text mentions and
/// references to records that do not exist.
inline SnapshotRecord random_record(std::mt19937_64& rng, const std::string& id, bool dataset) {
  auto pick = [&](const char* prefix, int n) { return std::string(prefix) + std::to_string(rng() % n); };
  auto chance = [&](int pct) { return static_cast<int>(rng() % 100) < pct; };
  SnapshotRecord r;
  r.id = NodeId(id);
  r.type = dataset ? RecordType::Dataset : RecordType::Model;
  if (chance(60)) r.first_seen = Date(2025, 1 + rng() % 12, 1 + rng() % 28);
  if (!dataset) {
    const int bases = static_cast<int>(rng() % 3);
    for (int i = 0; i < bases; ++i) r.base_model.emplace_back(chance(80) ? pick("org/m", 16) : pick("ghost/m", 3));
    if (chance(50)) r.relation = static_cast<EdgeKind>(rng() % 4);
    if (chance(40)) r.datasets.emplace_back(chance(80) ? pick("data/d", 8) : pick("ghost/d", 3));
    if (chance(25))
      r.xref_urls.push_back("https://hub.example/models?other=base_model:" +
                            std::string(token(static_cast<EdgeKind>(rng() % 4))) + ":" + pick("org/m", 16));
    if (chance(30)) r.description = "Model fine-tuned from " + std::string(display_name(pick("org/m", 16))) + ".";
    if (chance(15)) r.description += " Trained on " + pick("data/d", 8) + ".";
  } else {
    if (chance(30)) r.subset_of.emplace_back(pick("data/d", 8));
    if (chance(20)) r.modified_from.emplace_back(pick("data/d", 8));
    if (chance(20)) r.derived_from.emplace_back(chance(80) ? pick("data/d", 8) : pick("ghost/d", 3));
    if (chance(30)) r.trained_models.emplace_back(pick("org/m", 16));
    if (chance(15)) r.description = "A subset of " + std::string(display_name(pick("data/d", 8))) + ".";
  }
  return r;
}

inline Snapshot random_snapshot(std::mt19937_64& rng, Date date) {
  Snapshot s;
  s.date = date;
  for (int i = 0; i < 16; ++i)
    if (rng() % 100 < 70) {
      auto r = random_record(rng, "org/m" + std::to_string(i), false);
      s.records.emplace(r.id.str(), r);
    }
  for (int i = 0; i < 8; ++i)
    if (rng() % 100 < 70) {
      auto r = random_record(rng, "data/d" + std::to_string(i), true);
      s.records.emplace(r.id.str(), r);
    }
  return s;
}

/// Next day's snapshot: some records deleted, some added, some edited.
inline Snapshot mutate_snapshot(std::mt19937_64& rng, const Snapshot& s) {
  Snapshot t;
  t.date = s.date.next_day();
  for (const auto& [id, r] : s.records) {
    const int roll = static_cast<int>(rng() % 100);
    if (roll < 20) continue;  // deleted
    if (roll < 40) {
      auto edited = random_record(rng, id, r.type == RecordType::Dataset);
      edited.first_seen = r.first_seen;
      t.records.emplace(id, edited);
    } else {
      t.records.emplace(id, r);
    }
  }
  for (int i = 0; i < 16; ++i) {
    const std::string id = "org/m" + std::to_string(i);
    if (!s.records.contains(id) && rng() % 100 < 40) t.records.emplace(id, random_record(rng, id, false));
  }
  for (int i = 0; i < 8; ++i) {
    const std::string id = "data/d" + std::to_string(i);
    if (!s.records.contains(id) && rng() % 100 < 40) t.records.emplace(id, random_record(rng, id, true));
  }
  return t;
}

}  // namespace testsupport
