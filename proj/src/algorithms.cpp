#include "supplygraph/algorithms.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <unordered_map>

#include "supplygraph/kernels.hpp"

namespace supplygraph {

DegreeHistogram degree_distribution(const SupplyChainGraph& g, DegreeDirection d,
                                    std::optional<NodeKind> kind_filter) {
  DegreeHistogram h;
  h.direction = d;
  h.kind_filter = kind_filter;
  std::vector<std::uint32_t> deg = kernels::parallel::degrees(g, d);
  std::map<std::size_t, std::size_t> counts;
  for (NodeIndex u = 0; u < g.node_count(); ++u) {
    if (kind_filter && g.node(u).kind != *kind_filter) continue;
    ++counts[deg[u]];
  }
  h.buckets.reserve(counts.size());
  for (auto [degree, n] : counts) h.buckets.push_back(DegreeBucket{degree, n});
  return h;
}

// ---------------------------------------------------------------------------
// Components

std::size_t ComponentSet::trivial_count() const {
  return static_cast<std::size_t>(
      std::count_if(components.begin(), components.end(), [](const auto& c) { return c.size() == 1; }));
}

std::vector<std::uint32_t> ComponentSet::membership(std::size_t node_count) const {
  std::vector<std::uint32_t> out(node_count, 0);
  for (std::uint32_t c = 0; c < components.size(); ++c)
    for (NodeIndex u : components[c]) out[u] = c;
  return out;
}

namespace {

ComponentSet group_by_label(std::span<const NodeIndex> label, ComponentMode mode) {
  ComponentSet cs;
  cs.mode = mode;
  std::unordered_map<NodeIndex, std::size_t> slot;
  for (NodeIndex u = 0; u < label.size(); ++u) {
    auto [it, inserted] = slot.try_emplace(label[u], cs.components.size());
    if (inserted) cs.components.emplace_back();
    cs.components[it->second].push_back(u);  // ascending because u ascends
  }
  std::sort(cs.components.begin(), cs.components.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a.front() < b.front();
  });
  return cs;
}

}  // namespace

ComponentSet weakly_connected_components(const SupplyChainGraph& g) {
  std::vector<NodeIndex> label = kernels::parallel::weak_labels(g);
  return group_by_label(label, ComponentMode::Weak);
}

ComponentSet strongly_connected_components(const SupplyChainGraph& g) {
  const std::size_t n = g.node_count();
  constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> index(n, kNone), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<NodeIndex> stack;
  std::vector<NodeIndex> label(n, 0);
  struct Frame {
    NodeIndex node;
    std::uint32_t next_edge;
  };
  std::vector<Frame> call;
  std::uint32_t counter = 0;

  for (NodeIndex root = 0; root < n; ++root) {
    if (index[root] != kNone) continue;
    call.push_back({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      auto out = g.out_edges(f.node);
      if (f.next_edge < out.size()) {
        NodeIndex w = out[f.next_edge++].node;
        if (index[w] == kNone) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.node] = std::min(low[f.node], index[w]);
        }
        continue;
      }
      NodeIndex v = f.node;
      call.pop_back();
      if (!call.empty()) low[call.back().node] = std::min(low[call.back().node], low[v]);
      if (low[v] == index[v]) {
        // Pop the component; label it by its smallest member.
        auto begin = stack.end();
        NodeIndex smallest = v;
        do {
          --begin;
          smallest = std::min(smallest, *begin);
        } while (*begin != v);
        for (auto it = begin; it != stack.end(); ++it) {
          on_stack[*it] = false;
          label[*it] = smallest;
        }
        stack.erase(begin, stack.end());
      }
    }
  }
  return group_by_label(label, ComponentMode::Strong);
}

std::vector<CdfPoint> wcc_cdf(const ComponentSet& components) {
  if (components.mode != ComponentMode::Weak)
    throw Error(ErrorCode::InvalidArgument, "CDF is defined over weak components");
  return component_size_cdf(components);
}

std::vector<CdfPoint> component_size_cdf(const ComponentSet& components) {
  if (components.components.empty()) throw Error(ErrorCode::EmptyInput, "no components");
  std::map<std::size_t, std::size_t> by_size;
  for (const auto& c : components.components) ++by_size[c.size()];
  std::vector<CdfPoint> out;
  const double total = static_cast<double>(components.components.size());
  std::size_t running = 0;
  for (auto [size, n] : by_size) {
    running += n;
    out.push_back(CdfPoint{size, static_cast<double>(running) / total});
  }
  out.back().cum_fraction = 1.0;
  return out;
}

// ---------------------------------------------------------------------------
// Modularity

UndirectedProjection undirected_projection(const SupplyChainGraph& g) {
  UndirectedProjection p;
  const std::size_t n = g.node_count();
  p.offsets.assign(n + 1, 0);
  std::vector<NodeIndex> scratch;
  std::vector<std::vector<NodeIndex>> lists(n);
  for (NodeIndex u = 0; u < n; ++u) {
    scratch.clear();
    for (const Adjacent& a : g.out_edges(u)) scratch.push_back(a.node);
    for (const Adjacent& a : g.in_edges(u)) scratch.push_back(a.node);
    std::sort(scratch.begin(), scratch.end());
    scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
    std::erase(scratch, u);
    lists[u] = scratch;
    p.offsets[u + 1] = p.offsets[u] + static_cast<std::uint32_t>(scratch.size());
  }
  p.neighbors.reserve(p.offsets[n]);
  for (auto& l : lists) p.neighbors.insert(p.neighbors.end(), l.begin(), l.end());
  p.edge_count = p.neighbors.size() / 2;
  return p;
}

double modularity(const UndirectedProjection& p, std::span<const std::int64_t> community_of) {
  const std::size_t n = p.node_count();
  if (community_of.size() != n)
    throw Error(ErrorCode::UnassignedNode, "assignment covers " + std::to_string(community_of.size()) +
                                               " of " + std::to_string(n) + " nodes");
  for (std::size_t u = 0; u < n; ++u)
    if (community_of[u] < 0) throw Error(ErrorCode::UnassignedNode, "node index " + std::to_string(u));
  if (p.edge_count == 0) return 0.0;

  const double two_m = 2.0 * static_cast<double>(p.edge_count);
  std::unordered_map<std::int64_t, double> degree_sum;
  double internal = 0.0;  // each internal edge counted from both ends
  for (NodeIndex u = 0; u < n; ++u) {
    auto nb = p.adj(u);
    degree_sum[community_of[u]] += static_cast<double>(nb.size());
    for (NodeIndex v : nb)
      if (community_of[v] == community_of[u]) internal += 1.0;
  }
  // Summed in value order so the result is bit-identical under any relabeling
  // of communities or nodes.
  std::vector<double> sums;
  sums.reserve(degree_sum.size());
  for (const auto& [c, d] : degree_sum) sums.push_back(d);
  std::sort(sums.begin(), sums.end());
  double expected = 0.0;
  for (double d : sums) expected += (d / two_m) * (d / two_m);
  return internal / two_m - expected;
}

double modularity(const SupplyChainGraph& g, std::span<const std::int64_t> community_of) {
  return modularity(undirected_projection(g), community_of);
}

std::size_t Partition::community_count() const {
  std::int64_t mx = -1;
  for (auto c : community_of) mx = std::max(mx, c);
  return static_cast<std::size_t>(mx + 1);
}

// ---------------------------------------------------------------------------
// Louvain

namespace {

struct WeightedGraph {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;  // no self entries
  std::vector<double> self_weight;  // weight of loops (each undirected loop once)
  std::vector<double> strength;     // sum of incident weights, loops counted twice
  double total = 0.0;               // sum of strengths (= 2m)

  std::size_t size() const { return adj.size(); }
};

WeightedGraph from_projection(const UndirectedProjection& p) {
  WeightedGraph w;
  const std::size_t n = p.node_count();
  w.adj.resize(n);
  w.self_weight.assign(n, 0.0);
  w.strength.assign(n, 0.0);
  for (NodeIndex u = 0; u < n; ++u) {
    for (NodeIndex v : p.adj(u)) w.adj[u].emplace_back(v, 1.0);
    w.strength[u] = static_cast<double>(p.adj(u).size());
    w.total += w.strength[u];
  }
  return w;
}

double level_modularity(const WeightedGraph& w, const std::vector<std::uint32_t>& comm, double gamma) {
  if (w.total == 0.0) return 0.0;
  std::vector<double> in(w.size(), 0.0), tot(w.size(), 0.0);
  for (std::uint32_t u = 0; u < w.size(); ++u) {
    tot[comm[u]] += w.strength[u];
    in[comm[u]] += 2.0 * w.self_weight[u];
    for (auto [v, wt] : w.adj[u])
      if (comm[v] == comm[u]) in[comm[u]] += wt;
  }
  double q = 0.0;
  for (std::uint32_t c = 0; c < w.size(); ++c)
    q += in[c] / w.total - gamma * (tot[c] / w.total) * (tot[c] / w.total);
  return q;
}

/// Greedy local moving; returns whether any node changed community.
bool local_moves(const WeightedGraph& w, std::vector<std::uint32_t>& comm, const LouvainOptions& opt,
                 std::mt19937_64& rng, bool shuffle_order) {
  const std::size_t n = w.size();
  std::vector<double> tot(n, 0.0);
  for (std::uint32_t u = 0; u < n; ++u) tot[comm[u]] += w.strength[u];
  std::vector<double> link(n, 0.0);
  std::vector<std::uint32_t> touched;
  std::vector<std::uint32_t> ties;
  bool any_move = false;
  double q = level_modularity(w, comm, opt.resolution);
  constexpr double kTieEps = 1e-12;

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (shuffle_order) std::shuffle(order.begin(), order.end(), rng);

  for (;;) {
    bool moved = false;
    for (std::uint32_t u : order) {
      const std::uint32_t old_c = comm[u];
      touched.clear();
      for (auto [v, wt] : w.adj[u]) {
        std::uint32_t c = comm[v];
        if (link[c] == 0.0) touched.push_back(c);
        link[c] += wt;
      }
      tot[old_c] -= w.strength[u];
      const double ku = w.strength[u];
      auto gain = [&](std::uint32_t c) { return link[c] - opt.resolution * tot[c] * ku / w.total; };

      std::sort(touched.begin(), touched.end());
      std::uint32_t best = old_c;
      double best_gain = gain(old_c);
      ties.assign(1, old_c);
      for (std::uint32_t c : touched) {
        if (c == old_c) continue;
        double gc = gain(c);
        if (gc > best_gain + kTieEps) {
          best = c;
          best_gain = gc;
          ties.assign(1, c);
        } else if (opt.shuffle_ties && gc >= best_gain - kTieEps) {
          ties.push_back(c);
        }
      }
      if (opt.shuffle_ties && ties.size() > 1) {
        std::uniform_int_distribution<std::size_t> pick(0, ties.size() - 1);
        best = ties[pick(rng)];
      }
      tot[best] += ku;
      comm[u] = best;
      if (best != old_c) moved = true;
      for (std::uint32_t c : touched) link[c] = 0.0;
    }
    if (!moved) break;
    any_move = true;
    double nq = level_modularity(w, comm, opt.resolution);
    if (nq - q <= opt.min_gain) break;
    q = nq;
  }
  return any_move;
}

/// Renumbers communities densely in order of their first (smallest) member.
std::uint32_t renumber(std::vector<std::uint32_t>& comm) {
  const std::uint32_t top = comm.empty() ? 0 : *std::max_element(comm.begin(), comm.end());
  std::vector<std::uint32_t> map(std::size_t{top} + 1, std::numeric_limits<std::uint32_t>::max());
  std::uint32_t next = 0;
  for (auto& c : comm) {
    if (map[c] == std::numeric_limits<std::uint32_t>::max()) map[c] = next++;
    c = map[c];
  }
  return next;
}

WeightedGraph aggregate(const WeightedGraph& w, const std::vector<std::uint32_t>& comm,
                        std::uint32_t count) {
  WeightedGraph a;
  a.adj.resize(count);
  a.self_weight.assign(count, 0.0);
  a.strength.assign(count, 0.0);
  a.total = w.total;
  std::vector<std::map<std::uint32_t, double>> links(count);
  for (std::uint32_t u = 0; u < w.size(); ++u) {
    const std::uint32_t cu = comm[u];
    a.strength[cu] += w.strength[u];
    a.self_weight[cu] += w.self_weight[u];
    for (auto [v, wt] : w.adj[u]) {
      const std::uint32_t cv = comm[v];
      if (cv == cu) a.self_weight[cu] += wt / 2.0;  // seen from both ends
      else links[cu][cv] += wt;
    }
  }
  for (std::uint32_t c = 0; c < count; ++c)
    a.adj[c].assign(links[c].begin(), links[c].end());
  return a;
}

}  // namespace

namespace {

/// Kernighan-Lin style vertex mover on the base graph: repeatedly applies the
/// best single-node move among nodes not yet moved in this pass (including a
/// move into an empty community, and moves that lower Q), then rolls back to
/// the best state seen. Unlike greedy moving this can split communities.
/// Each pass makes at most `max_steps` moves, each costing O(m).
bool vertex_mover(const WeightedGraph& w, std::vector<std::uint32_t>& comm, const LouvainOptions& opt,
                  std::size_t max_steps) {
  const std::size_t n = w.size();
  if (n < 2 || w.total == 0.0) return false;
  const double gamma = opt.resolution;
  bool improved_any = false;

  for (int pass = 0; pass < 32; ++pass) {
    std::vector<double> tot(n, 0.0);
    std::vector<std::uint32_t> members(n, 0);
    for (std::uint32_t u = 0; u < n; ++u) {
      tot[comm[u]] += w.strength[u];
      ++members[comm[u]];
    }
    std::vector<char> moved(n, 0);
    std::vector<double> link(n, 0.0);
    std::vector<std::uint32_t> touched;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> log;  // (node, previous community)
    double delta = 0.0, best_delta = 0.0;
    std::size_t best_len = 0;

    const std::size_t steps = std::min(n, max_steps);
    for (std::size_t step = 0; step < steps; ++step) {
      std::uint32_t empty = static_cast<std::uint32_t>(n);
      for (std::uint32_t c = 0; c < n; ++c)
        if (members[c] == 0) {
          empty = c;
          break;
        }
      double best_gain = -std::numeric_limits<double>::infinity();
      std::uint32_t best_u = 0, best_c = 0;
      for (std::uint32_t u = 0; u < n; ++u) {
        if (moved[u]) continue;
        const std::uint32_t a = comm[u];
        const double k = w.strength[u];
        touched.clear();
        for (auto [v, wt] : w.adj[u]) {
          if (link[comm[v]] == 0.0) touched.push_back(comm[v]);
          link[comm[v]] += wt;
        }
        auto gain = [&](std::uint32_t b) {
          const double lb = b < n ? link[b] : 0.0;
          const double tb = b < n ? tot[b] : 0.0;
          return 2.0 / w.total * ((lb - link[a]) - gamma * k * (tb - tot[a] + k) / w.total);
        };
        std::sort(touched.begin(), touched.end());
        auto consider = [&](std::uint32_t b) {
          if (b == a) return;
          const double gb = gain(b);
          if (gb > best_gain + 1e-12) {
            best_gain = gb;
            best_u = u;
            best_c = b;
          }
        };
        for (std::uint32_t b : touched) consider(b);
        if (members[a] > 1 && empty < n) consider(empty);
        for (std::uint32_t b : touched) link[b] = 0.0;
      }
      if (best_gain == -std::numeric_limits<double>::infinity()) break;
      const std::uint32_t from = comm[best_u];
      log.emplace_back(best_u, from);
      tot[from] -= w.strength[best_u];
      --members[from];
      tot[best_c] += w.strength[best_u];
      ++members[best_c];
      comm[best_u] = best_c;
      moved[best_u] = 1;
      delta += best_gain;
      if (delta > best_delta + 1e-12) {
        best_delta = delta;
        best_len = log.size();
      }
    }
    for (std::size_t i = log.size(); i > best_len; --i) comm[log[i - 1].first] = log[i - 1].second;
    if (best_delta <= opt.min_gain) break;
    improved_any = true;
  }
  return improved_any;
}

constexpr std::size_t kMoverSteps = 64;
// Above this size a mover step costs too much for what it gains; greedy
// moving plus restarts carry the quality there.
constexpr std::size_t kMoverMaxNodes = 4096;

/// One multilevel run. The first run visits nodes in ascending order; later
/// runs use a shuffled visiting order at every level.
std::vector<std::uint32_t> louvain_run(const WeightedGraph& base, std::vector<std::uint32_t> assignment,
                                       const LouvainOptions& options, std::mt19937_64& rng,
                                       bool shuffle_order) {
  const std::size_t n = base.size();
  renumber(assignment);
  double q = level_modularity(base, assignment, options.resolution);

  for (;;) {
    const std::uint32_t start_count = renumber(assignment);
    WeightedGraph level = start_count == n ? base : aggregate(base, assignment, start_count);
    while (level.size() > 0) {
      std::vector<std::uint32_t> comm(level.size());
      std::iota(comm.begin(), comm.end(), 0);
      if (!local_moves(level, comm, options, rng, shuffle_order)) break;
      const std::uint32_t count = renumber(comm);
      const double nq = level_modularity(level, comm, options.resolution);
      for (auto& a : assignment) a = comm[a];
      if (count == level.size() || nq - q <= options.min_gain) {
        q = std::max(q, nq);
        break;
      }
      q = nq;
      level = aggregate(level, comm, count);
    }

    // Single-node moves on the original graph can still pay off once the
    // coarse communities settle; if they do, coarsen again.
    std::vector<std::uint32_t> refined = assignment;
    const bool greedy = local_moves(base, refined, options, rng, shuffle_order);
    const bool mover = n <= kMoverMaxNodes && vertex_mover(base, refined, options, kMoverSteps);
    if (!greedy && !mover) break;
    const double rq = level_modularity(base, refined, options.resolution);
    if (rq - q <= options.min_gain) break;
    assignment = std::move(refined);
    q = rq;
  }
  renumber(assignment);
  return assignment;
}

}  // namespace

Partition louvain(const SupplyChainGraph& g, const LouvainOptions& options) {
  if (options.restarts < 0) throw Error(ErrorCode::InvalidConfig, "louvain restarts must be >= 0");
  const UndirectedProjection proj = undirected_projection(g);
  const WeightedGraph base = from_projection(proj);
  std::mt19937_64 rng(options.seed);

  const std::size_t n = base.size();
  std::vector<std::uint32_t> singletons(n);
  std::iota(singletons.begin(), singletons.end(), 0);

  std::vector<std::uint32_t> best_comm;
  double best_q = 0.0;
  for (int run = 0; run <= options.restarts; ++run) {
    // run 1 starts from one community so the mover works top-down by splitting
    auto comm = louvain_run(base, run == 1 ? std::vector<std::uint32_t>(n, 0) : singletons, options, rng, run > 0);
    const double q = level_modularity(base, comm, options.resolution);
    // strict improvement only, so ties keep the earliest run
    if (run == 0 || q > best_q + 1e-12) {
      best_comm = std::move(comm);
      best_q = q;
    }
  }
  Partition best;
  best.community_of.assign(best_comm.begin(), best_comm.end());
  best.modularity = modularity(proj, best.community_of);
  return best;
}

}  // namespace supplygraph
