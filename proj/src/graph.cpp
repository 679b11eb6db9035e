#include "supplygraph/graph.hpp"

#include <algorithm>
#include <numeric>

namespace supplygraph {

bool edge_export_less(const Edge& a, const Edge& b) {
  if (a.src != b.src) return a.src < b.src;
  if (a.dst != b.dst) return a.dst < b.dst;
  return token(a.kind) < token(b.kind);
}

// ---------------------------------------------------------------------------
// GraphBuilder

bool GraphBuilder::add_node(const Node& node) {
  if (node.id.empty()) throw Error(ErrorCode::InvalidNodeId, "empty id");
  auto it = index_.find(node.id.str());
  if (it != index_.end()) {
    Slot& s = slots_[it->second];
    if (s.node.kind != node.kind)
      throw Error(ErrorCode::KindConflict, node.id.str() + " is " + std::string(token(s.node.kind)) +
                                               ", not " + std::string(token(node.kind)));
    return false;
  }
  auto idx = static_cast<NodeIndex>(slots_.size());
  slots_.push_back(Slot{node});
  index_.emplace(node.id.str(), idx);
  return true;
}

const Node* GraphBuilder::find(const NodeId& id) const {
  auto it = index_.find(id.str());
  return it == index_.end() ? nullptr : &slots_[it->second].node;
}

bool GraphBuilder::is_stub(const NodeId& id) const {
  auto it = index_.find(id.str());
  return it != index_.end() && slots_[it->second].stub;
}

std::size_t GraphBuilder::incident_edge_count(const NodeId& id) const {
  auto it = index_.find(id.str());
  return it == index_.end() ? 0 : slots_[it->second].degree;
}

NodeIndex GraphBuilder::ensure_endpoint(const NodeId& id, EdgeKind kind, bool source_side) {
  const bool want_dataset = requires_dataset(kind, source_side);
  auto it = index_.find(id.str());
  if (it != index_.end()) {
    const Node& n = slots_[it->second].node;
    if ((n.kind == NodeKind::Dataset) != want_dataset)
      throw Error(ErrorCode::EndpointKindMismatch,
                  std::string(token(kind)) + " edge needs a " + (want_dataset ? "dataset" : "model") +
                      (source_side ? " source, " : " target, ") + id.str() + " is " +
                      std::string(token(n.kind)));
    return it->second;
  }
  if (policy_ == StubPolicy::Reject)
    throw Error(ErrorCode::DanglingEndpoint, id.str() + " is not in the graph");
  auto idx = static_cast<NodeIndex>(slots_.size());
  Slot s{Node{id, want_dataset ? NodeKind::Dataset : NodeKind::BaseModel, std::nullopt, false}};
  s.stub = true;
  slots_.push_back(std::move(s));
  index_.emplace(id.str(), idx);
  return idx;
}

bool GraphBuilder::add_edge(const Edge& edge) {
  if (edge.src == edge.dst) throw Error(ErrorCode::SelfLoop, edge.src.str());
  // Validate both sides before creating any stub so a rejected edge leaves no trace.
  for (bool source_side : {true, false}) {
    const NodeId& id = source_side ? edge.src : edge.dst;
    auto it = index_.find(id.str());
    if (it == index_.end()) {
      if (policy_ == StubPolicy::Reject)
        throw Error(ErrorCode::DanglingEndpoint, id.str() + " is not in the graph");
      continue;
    }
    const bool want_dataset = requires_dataset(edge.kind, source_side);
    const Node& n = slots_[it->second].node;
    if ((n.kind == NodeKind::Dataset) != want_dataset)
      throw Error(ErrorCode::EndpointKindMismatch,
                  std::string(token(edge.kind)) + " edge needs a " +
                      (want_dataset ? "dataset" : "model") + (source_side ? " source; " : " target; ") +
                      id.str() + " is " + std::string(token(n.kind)));
  }
  NodeIndex s = ensure_endpoint(edge.src, edge.kind, true);
  NodeIndex d = ensure_endpoint(edge.dst, edge.kind, false);
  if (!edges_.insert(EdgeKey{s, d, edge.kind}).second) return false;
  ++slots_[s].degree;
  ++slots_[d].degree;
  if (is_model_model(edge.kind)) ++slots_[d].in_model_model;
  return true;
}

bool GraphBuilder::remove_edge(const Edge& edge) {
  auto si = index_.find(edge.src.str());
  auto di = index_.find(edge.dst.str());
  if (si == index_.end() || di == index_.end()) return false;
  if (edges_.erase(EdgeKey{si->second, di->second, edge.kind}) == 0) return false;
  --slots_[si->second].degree;
  --slots_[di->second].degree;
  if (is_model_model(edge.kind)) --slots_[di->second].in_model_model;
  return true;
}

void GraphBuilder::remove_node(const NodeId& id) {
  auto it = index_.find(id.str());
  if (it == index_.end()) throw Error(ErrorCode::UnknownNode, id.str());
  Slot& s = slots_[it->second];
  if (s.degree != 0)
    throw Error(ErrorCode::InvalidArgument, id.str() + " still has incident edges");
  s.live = false;
  index_.erase(it);
}

void GraphBuilder::update_node(const Node& node) {
  auto it = index_.find(node.id.str());
  if (it == index_.end()) {
    add_node(node);
    return;
  }
  Slot& s = slots_[it->second];
  if ((s.node.kind == NodeKind::Dataset) != (node.kind == NodeKind::Dataset) && s.degree != 0)
    throw Error(ErrorCode::KindConflict, node.id.str() + " cannot switch between model and dataset");
  s.node = node;
  s.stub = false;
}

void GraphBuilder::degrade_to_stub(const NodeId& id) {
  auto it = index_.find(id.str());
  if (it == index_.end()) throw Error(ErrorCode::UnknownNode, id.str());
  Slot& s = slots_[it->second];
  s.stub = true;
  s.node.metadata_present = false;
  s.node.first_seen.reset();
}

SupplyChainGraph GraphBuilder::freeze() const {
  SupplyChainGraph g;
  g.snapshot_date_ = snapshot_date_;

  std::vector<NodeIndex> live;
  live.reserve(index_.size());
  for (NodeIndex i = 0; i < slots_.size(); ++i)
    if (slots_[i].live) live.push_back(i);
  std::sort(live.begin(), live.end(),
            [&](NodeIndex a, NodeIndex b) { return slots_[a].node.id < slots_[b].node.id; });

  std::vector<NodeIndex> remap(slots_.size(), 0);
  g.nodes_.reserve(live.size());
  for (NodeIndex pos = 0; pos < live.size(); ++pos) {
    const Slot& s = slots_[live[pos]];
    remap[live[pos]] = pos;
    Node n = s.node;
    // Stub models: BaseModel unless something is derived into them.
    if (s.stub && n.kind != NodeKind::Dataset)
      n.kind = s.in_model_model > 0 ? NodeKind::FineTune : NodeKind::BaseModel;
    ++g.node_kind_counts_[index_of(n.kind)];
    g.nodes_.push_back(std::move(n));
  }

  const std::size_t n = live.size();
  std::vector<EdgeKey> sorted;
  sorted.reserve(edges_.size());
  for (const EdgeKey& e : edges_) sorted.push_back(EdgeKey{remap[e.src], remap[e.dst], e.kind});
  auto kind_rank = [](EdgeKind k) { return token(k); };
  std::sort(sorted.begin(), sorted.end(), [&](const EdgeKey& a, const EdgeKey& b) {
    if (a.src != b.src) return a.src < b.src;
    if (a.dst != b.dst) return a.dst < b.dst;
    return kind_rank(a.kind) < kind_rank(b.kind);
  });

  g.out_offsets_.assign(n + 1, 0);
  g.in_offsets_.assign(n + 1, 0);
  for (const EdgeKey& e : sorted) {
    ++g.out_offsets_[e.src + 1];
    ++g.in_offsets_[e.dst + 1];
    ++g.edge_kind_counts_[index_of(e.kind)];
  }
  std::partial_sum(g.out_offsets_.begin(), g.out_offsets_.end(), g.out_offsets_.begin());
  std::partial_sum(g.in_offsets_.begin(), g.in_offsets_.end(), g.in_offsets_.begin());
  g.out_targets_.resize(sorted.size());
  g.in_sources_.resize(sorted.size());
  std::vector<std::uint32_t> in_fill(g.in_offsets_.begin(), g.in_offsets_.end() - 1);
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const EdgeKey& e = sorted[i];
    g.out_targets_[i] = Adjacent{e.dst, e.kind};
    // Sources arrive in ascending order, so each in-list ends up sorted too.
    g.in_sources_[in_fill[e.dst]++] = Adjacent{e.src, e.kind};
  }
  return g;
}

// ---------------------------------------------------------------------------
// SupplyChainGraph

std::optional<NodeIndex> SupplyChainGraph::find(std::string_view id) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id,
                             [](const Node& n, std::string_view v) { return n.id.str() < v; });
  if (it == nodes_.end() || it->id.str() != id) return std::nullopt;
  return static_cast<NodeIndex>(it - nodes_.begin());
}

NodeIndex SupplyChainGraph::index_of(std::string_view id) const {
  auto i = find(id);
  if (!i) throw Error(ErrorCode::UnknownNode, std::string(id));
  return *i;
}

std::vector<Edge> SupplyChainGraph::edge_list() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (NodeIndex u = 0; u < nodes_.size(); ++u)
    for (const Adjacent& a : out_edges(u)) out.push_back(Edge{nodes_[u].id, nodes_[a.node].id, a.kind});
  return out;
}

GraphBuilder SupplyChainGraph::thaw() const {
  GraphBuilder b(StubPolicy::Reject);
  b.set_snapshot_date(snapshot_date_);
  for (const Node& n : nodes_) b.add_node(n);
  for (NodeIndex u = 0; u < nodes_.size(); ++u)
    for (const Adjacent& a : out_edges(u)) b.add_edge(Edge{nodes_[u].id, nodes_[a.node].id, a.kind});
  return b;
}

SupplyChainGraph SupplyChainGraph::reversed() const {
  SupplyChainGraph r = *this;
  std::swap(r.out_offsets_, r.in_offsets_);
  std::swap(r.out_targets_, r.in_sources_);
  return r;
}

// ---------------------------------------------------------------------------
// Traversal

TraversalResult traverse(const SupplyChainGraph& g, std::string_view origin, Direction d) {
  const NodeIndex start = g.index_of(origin);
  TraversalResult r;
  r.origin = g.node(start).id;
  r.direction = d;

  std::vector<bool> seen(g.node_count(), false);
  std::vector<NodeIndex> frontier{start};
  std::vector<NodeIndex> next;
  std::vector<NodeIndex> reached;
  seen[start] = true;
  std::size_t depth = 0;
  while (!frontier.empty()) {
    next.clear();
    for (NodeIndex u : frontier)
      for (const Adjacent& a : g.edges(u, d))
        if (!seen[a.node]) {
          seen[a.node] = true;
          next.push_back(a.node);
        }
    if (next.empty()) break;
    ++depth;
    for (NodeIndex v : next) {
      reached.push_back(v);
      ++r.per_kind_counts[index_of(g.node(v).kind)];
    }
    frontier.swap(next);
  }
  r.level = depth;
  std::sort(reached.begin(), reached.end());
  r.reached.reserve(reached.size());
  for (NodeIndex v : reached) r.reached.push_back(g.node(v).id);
  return r;
}

TraversalResult forward_subgraph(const SupplyChainGraph& g, std::string_view origin) {
  return traverse(g, origin, Direction::Forward);
}

TraversalResult backward_subgraph(const SupplyChainGraph& g, std::string_view origin) {
  return traverse(g, origin, Direction::Backward);
}

std::size_t degree(const SupplyChainGraph& g, std::string_view id, DegreeDirection d) {
  NodeIndex i = g.index_of(id);
  return d == DegreeDirection::Out ? g.out_edges(i).size() : g.in_edges(i).size();
}

}  // namespace supplygraph
