#pragma once

#include <cstdint>

#include "supplygraph/ingest.hpp"

namespace supplygraph {

struct SyntheticOptions {
  std::size_t nodes = 100'000;
  std::size_t edges = 120'000;
  double dataset_share = 0.17;  // fraction of nodes that are datasets
  double base_share = 0.08;     // chance that a new model has no parent
  std::uint64_t seed = 1;
  Date date{2025, 6, 30};
};

/// Snapshot whose built graph has exactly `nodes` nodes and `edges` edges.
/// Parents, training datasets and dataset sources are drawn by preferential
/// attachment, so degrees are heavy-tailed. Only structured fields are used.
/// Throws InvalidArgument when the edge budget cannot be met.
Snapshot synthetic_snapshot(const SyntheticOptions& options = {});

}  // namespace supplygraph
