#pragma once

// Data-parallel inner loops. Every kernel has a serial reference in
// `serial::` and an OpenMP variant in `parallel::`; they must agree exactly.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "supplygraph/graph.hpp"

namespace supplygraph::kernels {

/// Per-origin summary of a BFS without materializing the reached ids.
struct ReachStats {
  std::array<std::uint32_t, kNodeKindCount> per_kind{};
  std::uint32_t total = 0;
  std::uint32_t level = 0;        // deepest layer over all reached nodes
  std::uint32_t model_level = 0;  // deepest layer holding a model node

  friend bool operator==(const ReachStats&, const ReachStats&) = default;
};

namespace serial {

std::vector<ReachStats> reach_stats(const SupplyChainGraph& g, std::span<const NodeIndex> origins,
                                    Direction d);
std::vector<std::uint32_t> degrees(const SupplyChainGraph& g, DegreeDirection d);
/// Label of every node = smallest node index in its weakly connected component.
std::vector<NodeIndex> weak_labels(const SupplyChainGraph& g);

}  // namespace serial

namespace parallel {

std::vector<ReachStats> reach_stats(const SupplyChainGraph& g, std::span<const NodeIndex> origins,
                                    Direction d);
std::vector<std::uint32_t> degrees(const SupplyChainGraph& g, DegreeDirection d);
std::vector<NodeIndex> weak_labels(const SupplyChainGraph& g);

}  // namespace parallel

/// Number of OpenMP worker threads (1 when built without OpenMP).
int max_threads();
void set_threads(int n);

}  // namespace supplygraph::kernels
