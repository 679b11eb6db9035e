#pragma once

#include <filesystem>
#include <string>

#include "supplygraph/graph.hpp"

namespace supplygraph {

struct GraphFiles {
  std::string nodes_csv;  // id,kind,first_seen,metadata_present
  std::string edges_csv;  // src,dst,kind
};

/// Byte-reproducible rendering: rows sorted by id and by (src, dst, kind).
GraphFiles export_graph(const SupplyChainGraph& g);
SupplyChainGraph import_graph(const GraphFiles& files);

/// Writes nodes.csv, edges.csv and graph.json (snapshot date) into `dir`.
void write_graph(const SupplyChainGraph& g, const std::filesystem::path& dir);
SupplyChainGraph read_graph(const std::filesystem::path& dir);

}  // namespace supplygraph
