#include "supplygraph/graph_io.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>

#include "supplygraph/csv.hpp"

namespace supplygraph {

namespace {

constexpr std::string_view kNodesHeader = "id,kind,first_seen,metadata_present\n";
constexpr std::string_view kEdgesHeader = "src,dst,kind\n";

void expect_header(const std::vector<std::vector<std::string>>& rows, std::string_view header,
                   const char* file) {
  std::string got = rows.empty() ? std::string() : csv::row(rows.front());
  if (got != header)
    throw Error(ErrorCode::MalformedInput, std::string(file) + ": unexpected header");
}

}  // namespace

GraphFiles export_graph(const SupplyChainGraph& g) {
  GraphFiles f;
  f.nodes_csv.assign(kNodesHeader);
  for (const Node& n : g.nodes()) {
    f.nodes_csv += csv::row({n.id.str(), std::string(token(n.kind)),
                             n.first_seen ? n.first_seen->str() : std::string(),
                             n.metadata_present ? "true" : "false"});
  }
  f.edges_csv.assign(kEdgesHeader);
  std::vector<Edge> edges = g.edge_list();
  std::sort(edges.begin(), edges.end(), edge_export_less);
  for (const Edge& e : edges)
    f.edges_csv += csv::row({e.src.str(), e.dst.str(), std::string(token(e.kind))});
  return f;
}

SupplyChainGraph import_graph(const GraphFiles& files) {
  GraphBuilder b(StubPolicy::Reject);
  auto node_rows = csv::parse(files.nodes_csv);
  expect_header(node_rows, kNodesHeader, "nodes.csv");
  for (std::size_t i = 1; i < node_rows.size(); ++i) {
    const auto& r = node_rows[i];
    const std::string where = "nodes.csv row " + std::to_string(i + 1);
    if (r.size() != 4) throw Error(ErrorCode::MalformedInput, where + ": expected 4 fields");
    auto kind = parse_node_kind(r[1]);
    if (!kind) throw Error(ErrorCode::MalformedInput, where + ": bad kind '" + r[1] + "'");
    Node n{NodeId(r[0]), *kind, std::nullopt, false};
    if (!r[2].empty()) {
      n.first_seen = Date::parse(r[2]);
      if (!n.first_seen) throw Error(ErrorCode::MalformedInput, where + ": bad date");
    }
    if (r[3] == "true") n.metadata_present = true;
    else if (r[3] != "false") throw Error(ErrorCode::MalformedInput, where + ": bad flag");
    if (!b.add_node(n)) throw Error(ErrorCode::MalformedInput, where + ": duplicate id");
  }
  auto edge_rows = csv::parse(files.edges_csv);
  expect_header(edge_rows, kEdgesHeader, "edges.csv");
  for (std::size_t i = 1; i < edge_rows.size(); ++i) {
    const auto& r = edge_rows[i];
    const std::string where = "edges.csv row " + std::to_string(i + 1);
    if (r.size() != 3) throw Error(ErrorCode::MalformedInput, where + ": expected 3 fields");
    auto kind = parse_edge_kind(r[2]);
    if (!kind) throw Error(ErrorCode::MalformedInput, where + ": bad kind '" + r[2] + "'");
    b.add_edge(Edge{NodeId(r[0]), NodeId(r[1]), *kind});
  }
  return b.freeze();
}

void write_graph(const SupplyChainGraph& g, const std::filesystem::path& dir) {
  GraphFiles f = export_graph(g);
  std::filesystem::create_directories(dir);
  csv::write_file_atomic(dir / "nodes.csv", f.nodes_csv);
  csv::write_file_atomic(dir / "edges.csv", f.edges_csv);
  nlohmann::json meta = nlohmann::json::object();
  meta["snapshot_date"] = g.snapshot_date() ? nlohmann::json(g.snapshot_date()->str()) : nlohmann::json();
  csv::write_file_atomic(dir / "graph.json", meta.dump(2) + "\n");
}

SupplyChainGraph read_graph(const std::filesystem::path& dir) {
  GraphFiles f{csv::read_file(dir / "nodes.csv"), csv::read_file(dir / "edges.csv")};
  SupplyChainGraph g = import_graph(f);
  if (std::filesystem::exists(dir / "graph.json")) {
    auto meta = nlohmann::json::parse(csv::read_file(dir / "graph.json"), nullptr, false);
    if (meta.is_discarded() || !meta.is_object())
      throw Error(ErrorCode::MalformedInput, "graph.json is not a JSON object");
    if (meta.contains("snapshot_date") && meta["snapshot_date"].is_string()) {
      auto d = Date::parse(meta["snapshot_date"].get<std::string>());
      if (!d) throw Error(ErrorCode::MalformedInput, "graph.json: bad snapshot_date");
      g.set_snapshot_date(d);
    }
  }
  return g;
}

}  // namespace supplygraph
