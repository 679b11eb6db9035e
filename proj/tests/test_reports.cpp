#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <random>

#include <nlohmann/json.hpp>

#include "supplygraph/csv.hpp"
#include "supplygraph/reports.hpp"
#include "test_support.hpp"

using namespace supplygraph;

namespace {

SupplyChainGraph fixture_graph() {
  return build_graph(load_snapshot(testsupport::fixture("llama_family_2025-06-30.jsonl")));
}

std::map<std::string, std::string> row_of(const ReportTable& t, std::size_t r) {
  std::map<std::string, std::string> out;
  auto parsed = csv::parse(t.to_csv());
  for (std::size_t i = 0; i < parsed[0].size(); ++i) out[parsed[0][i]] = parsed[r + 1][i];
  return out;
}

std::int64_t int_cell(const ReportTable& t, std::size_t r, const std::string& col) {
  const auto& cols = t.columns();
  for (std::size_t i = 0; i < cols.size(); ++i)
    if (cols[i].name == col) return std::get<std::int64_t>(t.rows()[r][i]);
  FAIL("no column " << col);
  return -1;
}

std::string str_cell(const ReportTable& t, std::size_t r, const std::string& col) {
  const auto& cols = t.columns();
  for (std::size_t i = 0; i < cols.size(); ++i)
    if (cols[i].name == col) return std::get<std::string>(t.rows()[r][i]);
  FAIL("no column " << col);
  return {};
}

struct OracleRow {
  std::string id;
  std::size_t total = 0;
  std::array<std::size_t, kNodeKindCount> per_kind{};
  std::size_t level = 0;
  std::size_t model_level = 0;
};

/// Reach summaries from the relaxation-based closure and distance oracles.
std::vector<OracleRow> oracle_rows(const SupplyChainGraph& g, bool forward) {
  auto reach = testsupport::transitive_closure(g);
  auto dist = testsupport::distances(g);
  std::vector<OracleRow> rows;
  for (NodeIndex u = 0; u < g.node_count(); ++u) {
    OracleRow r;
    r.id = g.node(u).id.str();
    for (NodeIndex v = 0; v < g.node_count(); ++v) {
      if (v == u) continue;
      const bool hit = forward ? reach[u][v] : reach[v][u];
      if (!hit) continue;
      const std::size_t d = forward ? dist[u][v] : dist[v][u];
      ++r.total;
      ++r.per_kind[index_of(g.node(v).kind)];
      r.level = std::max(r.level, d);
      if (is_model(g.node(v).kind)) r.model_level = std::max(r.model_level, d);
    }
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

TEST_CASE("ReportTable: typed rows, CSV and JSON rendering") {
  ReportTable t("demo", {{"Name"}, {"Count", ColumnType::Int}, {"Share", ColumnType::Real}});
  t.add_row({std::string("a,\"b\""), std::int64_t{3}, 0.126});
  t.add_row({std::string("plain"), std::int64_t{-1}, -0.0});
  CHECK(t.to_csv() == "Name,Count,Share\n\"a,\"\"b\"\"\",3,0.13\nplain,-1,0.00\n");
  auto j = nlohmann::json::parse(t.to_json());
  REQUIRE(j.size() == 2);
  CHECK(j[0]["Name"] == "a,\"b\"");
  CHECK(j[0]["Count"] == 3);
  CHECK(j[0]["Share"].get<double>() == doctest::Approx(0.13));

  CHECK_THROWS_AS(t.add_row({std::string("x")}), Error);
  try {
    t.add_row({std::int64_t{1}, std::int64_t{2}, 0.5});
    FAIL("expected a type error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidArgument);
  }
  CHECK(t.rows().size() == 2);
}

TEST_CASE("forward impact on the llama family") {
  auto g = fixture_graph();
  auto t = top_base_models_by_forward_impact(g, 1);
  REQUIRE(t.rows().size() == 1);
  auto r = row_of(t, 0);
  CHECK(r["Base model"] == "Meta-llama");
  CHECK(r["Total"] == "7");
  CHECK(r["Fine-tune"] == "4");
  CHECK(r["Adapter"] == "1");
  CHECK(r["Quantization"] == "1");
  CHECK(r["Merge"] == "1");
  CHECK(r["Level"] == "2");
}

TEST_CASE("backward lineage on the llama family") {
  auto g = fixture_graph();
  auto rows = backward_lineages(g);
  auto it = std::find_if(rows.begin(), rows.end(),
                         [&](const BackwardLineage& b) { return g.node(b.model).id.str() == "RBot70Bv4"; });
  REQUIRE(it != rows.end());
  CHECK(it->total == 8);  // Unsloth, Meta-llama, The Pile, Chatgpt-prompt, four subsets
  CHECK(it->total >= 4);
  CHECK(it->fine_tune == 1);
  CHECK(it->level == 2);
  CHECK(it->base_model == "Meta-llama");
  CHECK(it->adapter == 0);
  CHECK(it->merge == 0);

  auto t = top_models_by_backward_size(g, 3);
  REQUIRE(t.rows().size() == 3);
  // deepest lineages come first; ties by id
  CHECK(str_cell(t, 0, "Model") == "Llama-3.3-70B-4bit");
  CHECK(str_cell(t, 0, "Model Type") == "Quantization");
  CHECK(int_cell(t, 0, "Total") == 8);
  CHECK(str_cell(t, 0, "Base Model") == "Meta-llama");
}

TEST_CASE("backward lineage: base model column") {
  SUBCASE("two roots") {
    GraphBuilder b;
    for (const char* id : {"a", "b"}) b.add_node(Node{NodeId(id), NodeKind::BaseModel, std::nullopt, true});
    b.add_node(Node{NodeId("m"), NodeKind::Merge, std::nullopt, true});
    b.add_edge(Edge{NodeId("a"), NodeId("m"), EdgeKind::Merge});
    b.add_edge(Edge{NodeId("b"), NodeId("m"), EdgeKind::Merge});
    auto rows = backward_lineages(b.freeze());
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].base_model == "multiple");
  }
  SUBCASE("isolated models are excluded") {
    GraphBuilder b;
    b.add_node(Node{NodeId("solo"), NodeKind::FineTune, std::nullopt, true});
    auto g = b.freeze();
    CHECK(backward_lineages(g).empty());
    CHECK(top_models_by_backward_size(g).rows().empty());
  }
  SUBCASE("only datasets upstream") {
    GraphBuilder b;
    b.add_node(Node{NodeId("d"), NodeKind::Dataset, std::nullopt, true});
    b.add_node(Node{NodeId("m"), NodeKind::FineTune, std::nullopt, true});
    b.add_edge(Edge{NodeId("d"), NodeId("m"), EdgeKind::TrainedOn});
    auto rows = backward_lineages(b.freeze());
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].base_model == "none");
    CHECK(rows[0].level == 0);
  }
}

TEST_CASE("dataset tables on the llama family") {
  auto g = fixture_graph();
  auto inc = dataset_inclusion_table(g, 10);
  REQUIRE(inc.included.rows().size() == 1);
  CHECK(str_cell(inc.included, 0, "Dataset") == "The Pile");
  CHECK(int_cell(inc.included, 0, "# of included") == 4);
  REQUIRE(inc.derived.rows().size() == 4);
  CHECK(str_cell(inc.derived, 0, "Dataset") == "Arxiv");
  for (std::size_t r = 0; r < 4; ++r) CHECK(int_cell(inc.derived, r, "# of derived") == 1);

  auto dm = dataset_to_models_table(g, 10);
  REQUIRE(dm.rows().size() == 2);
  for (std::size_t r = 0; r < 2; ++r) {
    CHECK(int_cell(dm, r, "Total") == 1);
    CHECK(int_cell(dm, r, "Fine-tune") == 0);
  }
  CHECK(str_cell(dm, 1, "Dataset") == "The Pile");

  auto md = model_dataset_counts(g, 10);
  REQUIRE(md.rows().size() == 1);
  CHECK(str_cell(md, 0, "Model") == "Meta-llama");
  CHECK(str_cell(md, 0, "Model Type") == "Base");
  CHECK(int_cell(md, 0, "# of datasets") == 2);
}

TEST_CASE("dataset-to-model counts split by kind") {
  GraphBuilder b;
  b.add_node(Node{NodeId("data"), NodeKind::Dataset, std::nullopt, true});
  b.add_node(Node{NodeId("base"), NodeKind::BaseModel, std::nullopt, true});
  const std::pair<const char*, NodeKind> models[] = {{"ft1", NodeKind::FineTune}, {"ft2", NodeKind::FineTune},
                                                     {"ad", NodeKind::Adapter},   {"q", NodeKind::Quantization},
                                                     {"mg", NodeKind::Merge}};
  for (const auto& [id, kind] : models) {
    b.add_node(Node{NodeId(id), kind, std::nullopt, true});
    b.add_edge(Edge{NodeId("data"), NodeId(id), EdgeKind::TrainedOn});
  }
  b.add_edge(Edge{NodeId("data"), NodeId("base"), EdgeKind::TrainedOn});
  b.add_node(Node{NodeId("unused"), NodeKind::Dataset, std::nullopt, true});
  auto t = dataset_to_models_table(b.freeze());
  REQUIRE(t.rows().size() == 1);
  CHECK(int_cell(t, 0, "Total") == 6);
  CHECK(int_cell(t, 0, "Fine-tune") == 2);
  CHECK(int_cell(t, 0, "Adapter") == 1);
  CHECK(int_cell(t, 0, "Quantization") == 1);
  CHECK(int_cell(t, 0, "Merges") == 1);
}

TEST_CASE("graph_summary") {
  auto g = fixture_graph();
  auto t = graph_summary(g);
  REQUIRE(t.rows().size() == 1);
  CHECK(int_cell(t, 0, "Nodes") == 14);
  CHECK(int_cell(t, 0, "Edges") == static_cast<std::int64_t>(g.edge_count()));
  std::int64_t by_kind = 0;
  for (const char* c : {"Base", "Fine-tune", "Adapter", "Quantization", "Merge", "Dataset"}) by_kind += int_cell(t, 0, c);
  CHECK(by_kind == 14);
  CHECK(int_cell(t, 0, "Dataset") == 6);
  CHECK(int_cell(t, 0, "Base") == 1);
  CHECK(row_of(t, 0)["Metadata missing %"] == "0.00");

  auto empty = graph_summary(SupplyChainGraph{});
  CHECK(empty.to_csv() ==
        "Nodes,Edges,Base,Fine-tune,Adapter,Quantization,Merge,Dataset,Average degree,Metadata missing %\n"
        "0,0,0,0,0,0,0,0,0.00,0.00\n");
}

TEST_CASE("empty inputs give empty rankings") {
  SupplyChainGraph g;
  CHECK(top_base_models_by_forward_impact(g).rows().empty());
  CHECK(top_models_by_backward_size(g).rows().empty());
  auto inc = dataset_inclusion_table(g);
  CHECK(inc.included.rows().empty());
  CHECK(inc.derived.rows().empty());
  CHECK(dataset_to_models_table(g).rows().empty());
  CHECK(model_dataset_counts(g).rows().empty());

  auto only_models = testsupport::model_graph(3, {{0, 1}});
  CHECK(dataset_inclusion_table(only_models).included.rows().empty());
}

TEST_CASE("property: forward and backward tables match brute-force reachability") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 120; ++trial) {
    auto g = testsupport::random_graph(rng);
    auto fwd = oracle_rows(g, true);
    auto bwd = oracle_rows(g, false);

    std::vector<OracleRow> base;
    for (NodeIndex i = 0; i < g.node_count(); ++i)
      if (g.node(i).kind == NodeKind::BaseModel) base.push_back(fwd[i]);
    std::stable_sort(base.begin(), base.end(), [](const OracleRow& a, const OracleRow& b) { return a.total > b.total; });
    auto t = top_base_models_by_forward_impact(g, g.node_count() + 1);
    REQUIRE(t.rows().size() == base.size());
    for (std::size_t r = 0; r < base.size(); ++r) {
      CHECK(str_cell(t, r, "Base model") == base[r].id);
      const auto total = int_cell(t, r, "Total");
      CHECK(total == static_cast<std::int64_t>(base[r].total));
      CHECK(int_cell(t, r, "Level") == static_cast<std::int64_t>(base[r].level));
      // per-kind columns plus reached datasets and base models add up to Total
      std::int64_t parts = int_cell(t, r, "Fine-tune") + int_cell(t, r, "Adapter") +
                           int_cell(t, r, "Quantization") + int_cell(t, r, "Merge");
      parts += static_cast<std::int64_t>(base[r].per_kind[index_of(NodeKind::Dataset)] +
                                         base[r].per_kind[index_of(NodeKind::BaseModel)]);
      CHECK(parts == total);
    }

    std::vector<OracleRow> task;
    for (NodeIndex i = 0; i < g.node_count(); ++i) {
      const NodeKind k = g.node(i).kind;
      if (is_model(k) && k != NodeKind::BaseModel && bwd[i].total > 0) task.push_back(bwd[i]);
    }
    std::stable_sort(task.begin(), task.end(), [](const OracleRow& a, const OracleRow& b) { return a.total > b.total; });
    auto rows = backward_lineages(g);
    REQUIRE(rows.size() == task.size());
    auto reach = testsupport::transitive_closure(g);
    for (std::size_t r = 0; r < task.size(); ++r) {
      const NodeIndex m = rows[r].model;
      CHECK(g.node(m).id.str() == task[r].id);
      CHECK(rows[r].total == task[r].total);
      CHECK(rows[r].fine_tune == task[r].per_kind[index_of(NodeKind::FineTune)]);
      CHECK(rows[r].adapter == task[r].per_kind[index_of(NodeKind::Adapter)]);
      CHECK(rows[r].quantization == task[r].per_kind[index_of(NodeKind::Quantization)]);
      CHECK(rows[r].merge == task[r].per_kind[index_of(NodeKind::Merge)]);
      CHECK(rows[r].level == task[r].model_level);
      std::vector<std::string> roots;
      for (NodeIndex v = 0; v < g.node_count(); ++v) {
        if (v == m || !reach[v][m] || g.node(v).kind != NodeKind::BaseModel) continue;
        bool has_model_parent = false;
        for (const Edge& e : g.edge_list())
          if (e.dst == g.node(v).id && is_model_model(e.kind)) has_model_parent = true;
        if (!has_model_parent) roots.push_back(g.node(v).id.str());
      }
      const std::string expect = roots.empty() ? "none" : roots.size() > 1 ? "multiple" : roots[0];
      CHECK(rows[r].base_model == expect);
    }
  }
}

TEST_CASE("communities and modularity tables") {
  auto g = testsupport::model_graph(6, {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}});
  auto p = louvain(g);
  auto t = communities_table(g, p, 10);
  REQUIRE(t.rows().size() == 2);
  CHECK(int_cell(t, 0, "Size") == 3);
  CHECK(int_cell(t, 0, "ID") == 0);
  CHECK(str_cell(t, 0, "E.g. models") == "n00; n01");
  CHECK(str_cell(t, 0, "E.g. datasets").empty());
  CHECK(communities_table(g, p, 1).rows().size() == 1);
  CHECK(modularity_table(p).to_csv() == "Modularity,Communities\n0.5000,2\n");

  Partition wrong;
  CHECK_THROWS_AS(communities_table(g, wrong, 10), Error);
}

TEST_CASE("figure series") {
  auto g = fixture_graph();
  auto d = degree_distribution_table(g);
  std::int64_t in_all = 0;
  for (std::size_t r = 0; r < d.rows().size(); ++r)
    if (str_cell(d, r, "Direction") == "in" && str_cell(d, r, "Kind") == "all") in_all += int_cell(d, r, "Nodes");
  CHECK(in_all == 14);
  auto c = wcc_cdf_table(weakly_connected_components(g));
  REQUIRE_FALSE(c.rows().empty());
  CHECK(c.to_csv().substr(c.to_csv().rfind('\n', c.to_csv().size() - 2) + 1) == "14,1.000000\n");
}

TEST_CASE("report CSVs carry exactly the schema column sets") {
  auto g = fixture_graph();
  std::vector<ReportTable> tables;
  for (const char* name : {"forward_impact", "backward_lineage", "dataset_inclusion", "dataset_models"})
    for (auto& t : make_report(g, name)) tables.push_back(std::move(t));
  REQUIRE(tables.size() == 5);
  for (const auto& t : tables) {
    std::ifstream in(testsupport::fixture("schemas/" + t.name() + ".json"));
    REQUIRE_MESSAGE(in.good(), t.name());
    auto schema = nlohmann::json::parse(in);
    CHECK(schema["report"] == t.name());
    auto header = csv::parse(t.to_csv())[0];
    REQUIRE(header.size() == schema["columns"].size());
    for (std::size_t i = 0; i < header.size(); ++i) {
      CHECK(header[i] == schema["columns"][i]["name"].get<std::string>());
      CHECK(std::string(token(t.columns()[i].type)) == schema["columns"][i]["type"].get<std::string>());
    }
  }
}

TEST_CASE("make_report and write_report") {
  auto g = fixture_graph();
  for (const auto& name : report_names()) {
    auto a = make_report(g, name, 3);
    auto b = make_report(g, name, 3);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].to_csv() == b[i].to_csv());
      CHECK(a[i].to_json() == b[i].to_json());
    }
  }
  CHECK_THROWS_AS(make_report(g, "nope"), Error);
  CHECK_THROWS_AS(make_report(g, "summary", 0), Error);

  auto dir = std::filesystem::temp_directory_path() / "supplygraph_report_test";
  std::filesystem::remove_all(dir);
  auto t = graph_summary(g);
  auto path = write_report(t, dir, "2025-06-30");
  CHECK(path.filename() == "report_summary_2025-06-30.csv");
  CHECK(csv::read_file(path) == t.to_csv());
  CHECK(csv::read_file(dir / "report_summary_2025-06-30.json") == t.to_json());
  std::filesystem::remove_all(dir);
}
