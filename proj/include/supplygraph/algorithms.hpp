#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "supplygraph/graph.hpp"

namespace supplygraph {

struct DegreeBucket {
  std::size_t degree = 0;
  std::size_t node_count = 0;
  friend bool operator==(const DegreeBucket&, const DegreeBucket&) = default;
};

struct DegreeHistogram {
  DegreeDirection direction = DegreeDirection::In;
  std::optional<NodeKind> kind_filter;
  std::vector<DegreeBucket> buckets;  // strictly increasing degree
};

DegreeHistogram degree_distribution(const SupplyChainGraph& g, DegreeDirection d,
                                    std::optional<NodeKind> kind_filter = std::nullopt);

enum class ComponentMode : std::uint8_t { Weak, Strong };

struct ComponentSet {
  ComponentMode mode = ComponentMode::Weak;
  /// Each component's members ascending; components by size descending,
  /// then by smallest member.
  std::vector<std::vector<NodeIndex>> components;

  std::size_t trivial_count() const;
  /// component index for every node
  std::vector<std::uint32_t> membership(std::size_t node_count) const;
};

ComponentSet weakly_connected_components(const SupplyChainGraph& g);
/// Tarjan's algorithm with an explicit stack.
ComponentSet strongly_connected_components(const SupplyChainGraph& g);

struct CdfPoint {
  std::size_t size = 0;
  double cum_fraction = 0.0;
};

/// Fraction of components with size <= s, one point per distinct size.
std::vector<CdfPoint> wcc_cdf(const ComponentSet& components);
/// Same points for components of either mode.
std::vector<CdfPoint> component_size_cdf(const ComponentSet& components);

/// Undirected, unit-weight, parallel-edge-collapsed view used by modularity
/// and Louvain. Neighbour lists are sorted.
struct UndirectedProjection {
  std::vector<std::uint32_t> offsets{0};
  std::vector<NodeIndex> neighbors;
  std::size_t edge_count = 0;

  std::span<const NodeIndex> adj(NodeIndex u) const {
    return {neighbors.data() + offsets[u], neighbors.data() + offsets[u + 1]};
  }
  std::size_t node_count() const { return offsets.size() - 1; }
};

UndirectedProjection undirected_projection(const SupplyChainGraph& g);

inline constexpr std::int64_t kUnassigned = -1;

/// Newman modularity of an assignment (one entry per node, kUnassigned for
/// missing). Returns 0 for graphs without edges; throws UnassignedNode.
double modularity(const SupplyChainGraph& g, std::span<const std::int64_t> community_of);
double modularity(const UndirectedProjection& p, std::span<const std::int64_t> community_of);

struct Partition {
  /// Community ids are dense and numbered by each community's smallest node.
  std::vector<std::int64_t> community_of;
  double modularity = 0.0;

  std::size_t community_count() const;
};

struct LouvainOptions {
  double resolution = 1.0;
  std::uint64_t seed = 0;
  bool shuffle_ties = false;    // seed only matters when enabled
  double min_gain = 1e-7;
  /// Extra runs (shuffled visiting order; run 1 starts from a single
  /// community); the partition with the highest Q is kept.
  int restarts = 8;
};

Partition louvain(const SupplyChainGraph& g, const LouvainOptions& options = {});

}  // namespace supplygraph
