#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "supplygraph/types.hpp"

namespace supplygraph {

using NodeIndex = std::uint32_t;

struct Node {
  NodeId id;
  NodeKind kind = NodeKind::BaseModel;
  std::optional<Date> first_seen;
  bool metadata_present = false;

  friend bool operator==(const Node&, const Node&) = default;
};

/// Typed dependency; `src` is upstream, `dst` is the derived or consuming artifact.
struct Edge {
  NodeId src;
  NodeId dst;
  EdgeKind kind = EdgeKind::FineTune;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Ordering used by every export: (src, dst, kind token).
bool edge_export_less(const Edge& a, const Edge& b);

struct Adjacent {
  NodeIndex node;
  EdgeKind kind;
};

enum class StubPolicy : std::uint8_t {
  Reject,  // missing endpoints raise DanglingEndpoint
  Create,  // missing endpoints become metadata-less stubs
};

class SupplyChainGraph;

/// Single-writer construction phase. Freezing produces an immutable graph
/// whose node indices follow ascending id order.
class GraphBuilder {
 public:
  explicit GraphBuilder(StubPolicy policy = StubPolicy::Reject) : policy_(policy) {}

  /// Returns false when an identical-kind node already existed.
  bool add_node(const Node& node);

  /// Returns false for a duplicate (src, dst, kind) triple.
  bool add_edge(const Edge& edge);
  bool remove_edge(const Edge& edge);

  /// Removes a node; it must have no incident edges.
  void remove_node(const NodeId& id);

  /// Overwrites attributes of an existing node (kind changes are not checked
  /// against incident edges beyond the model/dataset split).
  void update_node(const Node& node);

  /// Turns an existing node into a stub: metadata cleared and kind re-inferred at freeze.
  void degrade_to_stub(const NodeId& id);

  bool contains(const NodeId& id) const { return index_.contains(id.str()); }
  const Node* find(const NodeId& id) const;
  bool is_stub(const NodeId& id) const;
  std::size_t incident_edge_count(const NodeId& id) const;

  std::size_t node_count() const { return index_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  void set_snapshot_date(std::optional<Date> d) { snapshot_date_ = d; }
  void set_stub_policy(StubPolicy p) { policy_ = p; }

  SupplyChainGraph freeze() const;

 private:
  struct Slot {
    Node node;
    bool stub = false;
    bool live = true;
    std::uint32_t in_model_model = 0;
    std::uint32_t degree = 0;
  };

  struct EdgeKey {
    NodeIndex src;
    NodeIndex dst;
    EdgeKind kind;
    friend bool operator==(const EdgeKey&, const EdgeKey&) = default;
  };
  struct EdgeKeyHash {
    std::size_t operator()(const EdgeKey& k) const noexcept {
      std::uint64_t h = (static_cast<std::uint64_t>(k.src) << 32) ^ k.dst;
      h ^= static_cast<std::uint64_t>(k.kind) * 0x9E3779B97F4A7C15ull;
      h ^= h >> 29;
      return static_cast<std::size_t>(h * 0xBF58476D1CE4E5B9ull);
    }
  };

  NodeIndex ensure_endpoint(const NodeId& id, EdgeKind kind, bool source_side);

  StubPolicy policy_;
  std::vector<Slot> slots_;
  std::unordered_map<std::string, NodeIndex> index_;
  std::unordered_set<EdgeKey, EdgeKeyHash> edges_;
  std::optional<Date> snapshot_date_;
};

/// Immutable after construction; safe for concurrent readers.
class SupplyChainGraph {
 public:
  SupplyChainGraph() = default;

  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return out_targets_.size(); }

  std::span<const Node> nodes() const noexcept { return nodes_; }
  const Node& node(NodeIndex i) const { return nodes_[i]; }

  std::optional<NodeIndex> find(std::string_view id) const;
  /// Throws UnknownNode.
  NodeIndex index_of(std::string_view id) const;

  std::span<const Adjacent> out_edges(NodeIndex i) const noexcept {
    return {out_targets_.data() + out_offsets_[i], out_targets_.data() + out_offsets_[i + 1]};
  }
  std::span<const Adjacent> in_edges(NodeIndex i) const noexcept {
    return {in_sources_.data() + in_offsets_[i], in_sources_.data() + in_offsets_[i + 1]};
  }
  std::span<const Adjacent> edges(NodeIndex i, Direction d) const noexcept {
    return d == Direction::Forward ? out_edges(i) : in_edges(i);
  }

  std::size_t count(NodeKind k) const noexcept { return node_kind_counts_[supplygraph::index_of(k)]; }
  std::size_t count(EdgeKind k) const noexcept { return edge_kind_counts_[supplygraph::index_of(k)]; }

  /// All edges in export order.
  std::vector<Edge> edge_list() const;

  std::optional<Date> snapshot_date() const noexcept { return snapshot_date_; }
  void set_snapshot_date(std::optional<Date> d) noexcept { snapshot_date_ = d; }

  /// Mutable copy for the delta module. Node kinds are kept verbatim.
  GraphBuilder thaw() const;

  /// Same graph with every edge reversed.
  SupplyChainGraph reversed() const;

 private:
  friend class GraphBuilder;

  std::vector<Node> nodes_;
  std::vector<std::uint32_t> out_offsets_{0};
  std::vector<Adjacent> out_targets_;
  std::vector<std::uint32_t> in_offsets_{0};
  std::vector<Adjacent> in_sources_;
  std::array<std::size_t, kNodeKindCount> node_kind_counts_{};
  std::array<std::size_t, kEdgeKindCount> edge_kind_counts_{};
  std::optional<Date> snapshot_date_;
};

struct TraversalResult {
  NodeId origin;
  Direction direction = Direction::Forward;
  std::vector<NodeId> reached;  // ascending, origin excluded
  std::array<std::size_t, kNodeKindCount> per_kind_counts{};
  std::size_t level = 0;        // deepest BFS layer among reached nodes
};

TraversalResult forward_subgraph(const SupplyChainGraph& g, std::string_view origin);
TraversalResult backward_subgraph(const SupplyChainGraph& g, std::string_view origin);
TraversalResult traverse(const SupplyChainGraph& g, std::string_view origin, Direction d);

std::size_t degree(const SupplyChainGraph& g, std::string_view id, DegreeDirection d);

}  // namespace supplygraph
