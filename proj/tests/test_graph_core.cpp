#include <doctest.h>

#include <algorithm>
#include <random>

#include "supplygraph/graph.hpp"
#include "supplygraph/graph_io.hpp"
#include "test_support.hpp"

using namespace supplygraph;
using testsupport::node_name;

namespace {

Node model(const std::string& id, NodeKind k = NodeKind::FineTune) {
  return Node{NodeId(id), k, std::nullopt, true};
}
Node dataset(const std::string& id) { return Node{NodeId(id), NodeKind::Dataset, std::nullopt, true}; }

std::vector<std::string> ids(const TraversalResult& r) {
  std::vector<std::string> out;
  for (const auto& id : r.reached) out.push_back(id.str());
  return out;
}

SupplyChainGraph cycle3() {
  GraphBuilder b;
  for (auto n : {"A", "B", "C"}) b.add_node(dataset(n));
  b.add_edge(Edge{NodeId("A"), NodeId("B"), EdgeKind::Subset});
  b.add_edge(Edge{NodeId("B"), NodeId("C"), EdgeKind::Subset});
  b.add_edge(Edge{NodeId("C"), NodeId("A"), EdgeKind::Subset});
  return b.freeze();
}

}  // namespace

TEST_CASE("NodeId trims and rejects invalid values") {
  CHECK(NodeId("  meta-llama/Meta-Llama \t").str() == "meta-llama/Meta-Llama");
  CHECK(NodeId("meta-llama/Meta-Llama").display_name() == "Meta-Llama");
  CHECK(NodeId("bert").display_name() == "bert");
  CHECK_THROWS_AS(NodeId("   "), Error);
  CHECK_THROWS_AS(NodeId("a\nb"), Error);
  CHECK(NodeId("Bert") != NodeId("bert"));
}

TEST_CASE("add_node counts, idempotency and kind conflicts") {
  GraphBuilder b;
  CHECK(b.add_node(model("meta-llama/Meta-Llama", NodeKind::BaseModel)));
  CHECK_FALSE(b.add_node(model("meta-llama/Meta-Llama", NodeKind::BaseModel)));
  auto g = b.freeze();
  CHECK(g.node_count() == 1);
  CHECK(g.count(NodeKind::BaseModel) == 1);

  GraphBuilder c;
  c.add_node(model("x", NodeKind::FineTune));
  try {
    c.add_node(dataset("x"));
    FAIL("expected KindConflict");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::KindConflict);
  }
}

TEST_CASE("add_edge validates endpoint kinds and deduplicates") {
  GraphBuilder b;
  b.add_node(model("Meta-llama", NodeKind::BaseModel));
  b.add_node(model("Llama-3.3-70B"));
  b.add_node(dataset("The Pile"));
  CHECK(b.add_edge(Edge{NodeId("The Pile"), NodeId("Meta-llama"), EdgeKind::TrainedOn}));
  CHECK(b.add_edge(Edge{NodeId("Meta-llama"), NodeId("Llama-3.3-70B"), EdgeKind::FineTune}));
  CHECK_FALSE(b.add_edge(Edge{NodeId("Meta-llama"), NodeId("Llama-3.3-70B"), EdgeKind::FineTune}));
  CHECK(b.edge_count() == 2);

  auto code_of = [&](const Edge& e) {
    try {
      b.add_edge(e);
    } catch (const Error& err) {
      return err.code();
    }
    return ErrorCode::InvalidArgument;
  };
  CHECK(code_of(Edge{NodeId("Meta-llama"), NodeId("The Pile"), EdgeKind::TrainedOn}) ==
        ErrorCode::EndpointKindMismatch);
  CHECK(code_of(Edge{NodeId("The Pile"), NodeId("Meta-llama"), EdgeKind::Subset}) ==
        ErrorCode::EndpointKindMismatch);
  CHECK(code_of(Edge{NodeId("ghost"), NodeId("Meta-llama"), EdgeKind::FineTune}) ==
        ErrorCode::DanglingEndpoint);
  CHECK(code_of(Edge{NodeId("Meta-llama"), NodeId("Meta-llama"), EdgeKind::Merge}) == ErrorCode::SelfLoop);
  CHECK(b.edge_count() == 2);
}

TEST_CASE("stub policy creates metadata-less endpoints with inferred kinds") {
  GraphBuilder b(StubPolicy::Create);
  b.add_node(model("child"));
  b.add_edge(Edge{NodeId("ghost/base"), NodeId("child"), EdgeKind::FineTune});
  b.add_edge(Edge{NodeId("ghost/data"), NodeId("child"), EdgeKind::TrainedOn});
  b.add_edge(Edge{NodeId("ghost/base"), NodeId("ghost/mid"), EdgeKind::Quantization});
  auto g = b.freeze();
  const Node& base = g.node(g.index_of("ghost/base"));
  CHECK(base.kind == NodeKind::BaseModel);
  CHECK_FALSE(base.metadata_present);
  CHECK(g.node(g.index_of("ghost/data")).kind == NodeKind::Dataset);
  // a stub that something was derived into is not a base model
  CHECK(g.node(g.index_of("ghost/mid")).kind == NodeKind::FineTune);
}

TEST_CASE("forward and backward traversal on small shapes") {
  SUBCASE("three-node cycle") {
    auto g = cycle3();
    auto r = forward_subgraph(g, "A");
    CHECK(ids(r) == std::vector<std::string>{"B", "C"});
    CHECK(r.level == 2);
    CHECK(r.per_kind_counts[index_of(NodeKind::Dataset)] == 2);
  }
  SUBCASE("chain D1 -> M1 -> M2 -> M3") {
    GraphBuilder b;
    b.add_node(dataset("D1"));
    b.add_node(model("M1", NodeKind::BaseModel));
    b.add_node(model("M2"));
    b.add_node(model("M3"));
    b.add_edge(Edge{NodeId("D1"), NodeId("M1"), EdgeKind::TrainedOn});
    b.add_edge(Edge{NodeId("M1"), NodeId("M2"), EdgeKind::FineTune});
    b.add_edge(Edge{NodeId("M2"), NodeId("M3"), EdgeKind::FineTune});
    auto g = b.freeze();
    auto r = backward_subgraph(g, "M3");
    CHECK(ids(r) == std::vector<std::string>{"D1", "M1", "M2"});
    CHECK(r.level == 3);
    auto src = backward_subgraph(g, "D1");
    CHECK(src.reached.empty());
    CHECK(src.level == 0);
    auto sink = forward_subgraph(g, "M3");
    CHECK(sink.reached.empty());
    CHECK(sink.level == 0);
  }
  SUBCASE("unknown origin") {
    auto g = cycle3();
    CHECK_THROWS_AS(forward_subgraph(g, "nope"), Error);
    CHECK_THROWS_AS(degree(g, "nope", DegreeDirection::In), Error);
  }
}

TEST_CASE("degree on a star and an isolated node") {
  GraphBuilder b;
  b.add_node(model("center", NodeKind::BaseModel));
  b.add_node(model("lonely", NodeKind::BaseModel));
  for (int i = 0; i < 5; ++i) {
    b.add_node(model("leaf" + std::to_string(i)));
    b.add_edge(Edge{NodeId("center"), NodeId("leaf" + std::to_string(i)), EdgeKind::FineTune});
  }
  auto g = b.freeze();
  CHECK(degree(g, "center", DegreeDirection::Out) == 5);
  CHECK(degree(g, "leaf3", DegreeDirection::In) == 1);
  CHECK(degree(g, "lonely", DegreeDirection::In) == 0);
  CHECK(degree(g, "lonely", DegreeDirection::Out) == 0);
}

TEST_CASE("property: traversal matches brute-force closure on random graphs") {
  std::mt19937_64 rng(20250630);
  for (int trial = 0; trial < 150; ++trial) {
    auto g = testsupport::random_graph(rng);
    auto reach = testsupport::transitive_closure(g);
    auto dist = testsupport::distances(g);
    auto rev = g.reversed();
    std::size_t out_sum = 0, in_sum = 0;
    for (NodeIndex u = 0; u < g.node_count(); ++u) {
      const std::string id = g.node(u).id.str();
      auto fwd = forward_subgraph(g, id);
      std::vector<std::string> expected;
      std::size_t deepest = 0;
      for (NodeIndex v = 0; v < g.node_count(); ++v)
        if (v != u && reach[u][v]) {
          expected.push_back(g.node(v).id.str());
          deepest = std::max(deepest, dist[u][v]);
        }
      REQUIRE(ids(fwd) == expected);
      CHECK(fwd.level == deepest);
      CHECK((fwd.level == 0) == fwd.reached.empty());
      std::size_t kind_total = 0;
      for (auto c : fwd.per_kind_counts) kind_total += c;
      CHECK(kind_total == fwd.reached.size());

      auto bwd = backward_subgraph(g, id);
      auto fwd_rev = forward_subgraph(rev, id);
      CHECK(ids(bwd) == ids(fwd_rev));
      CHECK(bwd.level == fwd_rev.level);

      out_sum += degree(g, id, DegreeDirection::Out);
      in_sum += degree(g, id, DegreeDirection::In);
    }
    CHECK(out_sum == g.edge_count());
    CHECK(in_sum == g.edge_count());
    std::array<std::size_t, kNodeKindCount> recount{};
    for (const Node& n : g.nodes()) ++recount[index_of(n.kind)];
    for (NodeKind k : kAllNodeKinds) CHECK(g.count(k) == recount[index_of(k)]);
  }
}

TEST_CASE("graph export is sorted, quoted and round-trips byte-identically") {
  GraphBuilder b;
  b.add_node(Node{NodeId("org/z,comma"), NodeKind::Dataset, Date(2025, 6, 30), true});
  b.add_node(Node{NodeId("org/a \"q\""), NodeKind::BaseModel, std::nullopt, false});
  b.add_node(Node{NodeId("org/m"), NodeKind::Merge, Date(2025, 7, 1), true});
  b.add_edge(Edge{NodeId("org/a \"q\""), NodeId("org/m"), EdgeKind::Merge});
  b.add_edge(Edge{NodeId("org/z,comma"), NodeId("org/m"), EdgeKind::TrainedOn});
  b.add_edge(Edge{NodeId("org/a \"q\""), NodeId("org/m"), EdgeKind::Adapter});
  auto g = b.freeze();
  auto f = export_graph(g);
  CHECK(f.nodes_csv ==
        "id,kind,first_seen,metadata_present\n"
        "\"org/a \"\"q\"\"\",base,,false\n"
        "org/m,merge,2025-07-01,true\n"
        "\"org/z,comma\",dataset,2025-06-30,true\n");
  CHECK(f.edges_csv ==
        "src,dst,kind\n"
        "\"org/a \"\"q\"\"\",org/m,adapter\n"
        "\"org/a \"\"q\"\"\",org/m,merge\n"
        "\"org/z,comma\",org/m,trained_on\n");
  auto again = export_graph(import_graph(f));
  CHECK(again.nodes_csv == f.nodes_csv);
  CHECK(again.edges_csv == f.edges_csv);
}

TEST_CASE("import rejects malformed files") {
  GraphFiles bad{"id,kind,first_seen,metadata_present\nx,robot,,true\n", "src,dst,kind\n"};
  CHECK_THROWS_AS(import_graph(bad), Error);
  GraphFiles bad_header{"id,kind\n", "src,dst,kind\n"};
  CHECK_THROWS_AS(import_graph(bad_header), Error);
  GraphFiles dangling{"id,kind,first_seen,metadata_present\nx,base,,true\n", "src,dst,kind\nx,y,finetune\n"};
  CHECK_THROWS_AS(import_graph(dangling), Error);
}
