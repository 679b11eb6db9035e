#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "supplygraph/graph.hpp"

namespace supplygraph {

/// Lowercase hex of HMAC-SHA256(salt, id), cut to `chars` characters (1..64).
std::string keyed_digest(std::string_view salt, std::string_view id, std::size_t chars = 16);

struct AnonymizeOptions {
  std::size_t digest_chars = 16;
};

struct AnonymizedGraph {
  SupplyChainGraph graph;
  /// (original, anonymized) for every node, ascending by original id.
  std::vector<std::pair<NodeId, NodeId>> mapping;
};

/// Replaces every id by its keyed digest; kinds, dates, metadata flags and
/// edges are kept. Throws SaltMissing for an empty salt and
/// CollisionDetected when two ids map to the same digest.
AnonymizedGraph anonymize(const SupplyChainGraph& g, std::string_view salt, const AnonymizeOptions& options = {});

/// `original,anonymized` with a header row.
std::string mapping_to_csv(const AnonymizedGraph& a);

}  // namespace supplygraph
