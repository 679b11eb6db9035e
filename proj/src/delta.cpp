#include "supplygraph/delta.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "supplygraph/csv.hpp"

namespace supplygraph {

bool Delta::empty() const {
  return added.empty() && changed.empty() && deleted.empty() && added_edges.empty() && deleted_edges.empty() &&
         node_updates.empty() && dropped_stubs.empty();
}

namespace {

[[noreturn]] void inconsistent(const std::string& why) { throw Error(ErrorCode::InconsistentDelta, why); }

NodeKind provisional_kind(const SnapshotRecord& r) {
  if (r.type == RecordType::Dataset) return NodeKind::Dataset;
  return r.relation ? produced_kind(*r.relation) : NodeKind::BaseModel;
}

}  // namespace

Delta diff_snapshots(const Snapshot& a, const Snapshot& b, const BuildOptions& options) {
  if (!(a.date < b.date))
    throw Error(ErrorCode::OutOfOrderSnapshots, b.date.str() + " does not follow " + a.date.str());
  const SupplyChainGraph g0 = build_graph(a, options);
  const SupplyChainGraph g1 = build_graph(b, options);

  Delta d;
  d.from = a.date;
  d.to = b.date;
  for (const auto& [id, rec] : b.records) {
    auto it = a.records.find(id);
    if (it == a.records.end()) d.added.push_back(rec);
    else if (!(it->second == rec)) d.changed.push_back(rec);
  }
  for (const auto& [id, rec] : a.records) {
    if (b.records.contains(id)) continue;
    d.deleted.push_back(rec.id);
    d.deleted_kinds.push_back(g0.node(g0.index_of(id)).kind);
  }

  const auto e0 = g0.edge_list();
  const auto e1 = g1.edge_list();
  std::set_difference(e1.begin(), e1.end(), e0.begin(), e0.end(), std::back_inserter(d.added_edges),
                      edge_export_less);
  std::set_difference(e0.begin(), e0.end(), e1.begin(), e1.end(), std::back_inserter(d.deleted_edges),
                      edge_export_less);

  const std::set<NodeId> deleted(d.deleted.begin(), d.deleted.end());
  for (const Node& n : g1.nodes()) {
    auto i0 = g0.find(n.id.str());
    if (!i0 || !(g0.node(*i0) == n)) d.node_updates.push_back(n);
  }
  for (const Node& n : g0.nodes())
    if (!g1.find(n.id.str()) && !deleted.contains(n.id)) d.dropped_stubs.push_back(n.id);
  return d;
}

SupplyChainGraph apply_delta(const SupplyChainGraph& g, const Delta& d) {
  if (!g.snapshot_date() || !(*g.snapshot_date() == d.from))
    inconsistent("delta starts at " + d.from.str() + " but the graph is from " +
                 (g.snapshot_date() ? g.snapshot_date()->str() : std::string("an unknown date")));
  if (!(d.from < d.to)) inconsistent("delta ends before it starts");

  GraphBuilder b = g.thaw();
  b.set_stub_policy(StubPolicy::Create);

  try {
    for (const Edge& e : d.deleted_edges)
      if (!b.remove_edge(e))
        inconsistent("edge " + e.src.str() + " -> " + e.dst.str() + " (" + std::string(token(e.kind)) +
                     ") is not in the graph");

    std::map<NodeId, const Node*> updates;
    for (const Node& n : d.node_updates) updates.emplace(n.id, &n);
    for (const SnapshotRecord& r : d.added)
      if (!updates.contains(r.id)) b.update_node(Node{r.id, provisional_kind(r), r.first_seen, r.metadata_present()});
    for (const Node& n : d.node_updates) b.update_node(n);

    for (const Edge& e : d.added_edges) b.add_edge(e);

    // Added models without explicit attributes are classified like a build would.
    std::set<Edge, decltype(&edge_export_less)> removed(d.deleted_edges.begin(), d.deleted_edges.end(),
                                                        &edge_export_less);
    for (const SnapshotRecord& r : d.added) {
      if (r.type != RecordType::Model || updates.contains(r.id)) continue;
      std::vector<EdgeKind> incoming;
      for (const Edge& e : d.added_edges)
        if (e.dst == r.id && is_model_model(e.kind)) incoming.push_back(e.kind);
      if (auto old = g.find(r.id.str()))
        for (const Adjacent& a : g.in_edges(*old)) {
          Edge e{g.node(a.node).id, r.id, a.kind};
          if (is_model_model(a.kind) && !removed.contains(e)) incoming.push_back(a.kind);
        }
      b.update_node(Node{r.id, classify_node(r, incoming), r.first_seen, r.metadata_present()});
    }

    for (const NodeId& id : d.deleted) {
      if (!b.contains(id)) inconsistent("deleted id " + id.str() + " is not in the graph");
      if (b.incident_edge_count(id) == 0) b.remove_node(id);
      else if (!updates.contains(id)) b.degrade_to_stub(id);
    }
    for (const NodeId& id : d.dropped_stubs) {
      if (!b.contains(id)) inconsistent("dropped stub " + id.str() + " is not in the graph");
      b.remove_node(id);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InconsistentDelta) throw;
    inconsistent(e.what());
  }

  b.set_snapshot_date(d.to);
  return b.freeze();
}

// ---------------------------------------------------------------------------
// wire format

namespace {

using ojson = nlohmann::ordered_json;

ojson edge_json(const Edge& e) {
  ojson o;
  o["src"] = e.src.str();
  o["dst"] = e.dst.str();
  o["kind"] = std::string(token(e.kind));
  return o;
}

[[noreturn]] void malformed(const std::string& why) { throw Error(ErrorCode::MalformedInput, "delta: " + why); }

const nlohmann::json& array_at(const nlohmann::json& o, const char* key) {
  static const nlohmann::json empty = nlohmann::json::array();
  auto it = o.find(key);
  if (it == o.end()) return empty;
  if (!it->is_array()) malformed(std::string(key) + " is not an array");
  return *it;
}

std::string str_at(const nlohmann::json& o, const char* key) {
  auto it = o.find(key);
  if (it == o.end() || !it->is_string()) malformed(std::string("missing string ") + key);
  return it->get<std::string>();
}

Date date_at(const nlohmann::json& o, const char* key) {
  auto d = Date::parse(str_at(o, key));
  if (!d) malformed(std::string("bad date in ") + key);
  return *d;
}

NodeId id_of(const std::string& s) {
  auto id = normalize_id(s);
  if (!id) malformed("invalid id '" + s + "'");
  return NodeId(*id);
}

Edge edge_of(const nlohmann::json& o) {
  if (!o.is_object()) malformed("edge is not an object");
  auto k = parse_edge_kind(str_at(o, "kind"));
  if (!k) malformed("unknown edge kind");
  return Edge{id_of(str_at(o, "src")), id_of(str_at(o, "dst")), *k};
}

NodeKind node_kind_of(const std::string& s) {
  auto k = parse_node_kind(s);
  if (!k) malformed("unknown node kind '" + s + "'");
  return *k;
}

}  // namespace

std::string delta_to_json(const Delta& d) {
  ojson o;
  o["from"] = d.from.str();
  o["to"] = d.to.str();
  auto records = [](const std::vector<SnapshotRecord>& rs) {
    ojson arr = ojson::array();
    for (const auto& r : rs) arr.push_back(ojson::parse(record_to_json(r)));
    return arr;
  };
  o["added_records"] = records(d.added);
  o["changed_records"] = records(d.changed);
  o["deleted_ids"] = ojson::array();
  for (const auto& id : d.deleted) o["deleted_ids"].push_back(id.str());
  o["deleted_kinds"] = ojson::array();
  for (NodeKind k : d.deleted_kinds) o["deleted_kinds"].push_back(std::string(token(k)));
  o["added_edges"] = ojson::array();
  for (const auto& e : d.added_edges) o["added_edges"].push_back(edge_json(e));
  o["deleted_edges"] = ojson::array();
  for (const auto& e : d.deleted_edges) o["deleted_edges"].push_back(edge_json(e));
  o["node_updates"] = ojson::array();
  for (const auto& n : d.node_updates) {
    ojson u;
    u["id"] = n.id.str();
    u["kind"] = std::string(token(n.kind));
    u["first_seen"] = n.first_seen ? ojson(n.first_seen->str()) : ojson(nullptr);
    u["metadata_present"] = n.metadata_present;
    o["node_updates"].push_back(u);
  }
  o["dropped_stubs"] = ojson::array();
  for (const auto& id : d.dropped_stubs) o["dropped_stubs"].push_back(id.str());
  return o.dump(2) + "\n";
}

Delta delta_from_json(std::string_view text) {
  auto o = nlohmann::json::parse(text, nullptr, false);
  if (o.is_discarded() || !o.is_object()) malformed("not a JSON object");
  Delta d;
  d.from = date_at(o, "from");
  d.to = date_at(o, "to");
  if (!(d.from < d.to)) malformed("'to' must be after 'from'");
  try {
    for (const auto& r : array_at(o, "added_records")) d.added.push_back(parse_record(r.dump()));
    for (const auto& r : array_at(o, "changed_records")) d.changed.push_back(parse_record(r.dump()));
  } catch (const Error& e) {
    malformed(e.what());
  }
  for (const auto& v : array_at(o, "deleted_ids")) {
    if (!v.is_string()) malformed("deleted_ids holds a non-string");
    d.deleted.push_back(id_of(v.get<std::string>()));
  }
  for (const auto& v : array_at(o, "deleted_kinds")) {
    if (!v.is_string()) malformed("deleted_kinds holds a non-string");
    d.deleted_kinds.push_back(node_kind_of(v.get<std::string>()));
  }
  if (!d.deleted_kinds.empty() && d.deleted_kinds.size() != d.deleted.size())
    malformed("deleted_kinds does not match deleted_ids");
  for (const auto& e : array_at(o, "added_edges")) d.added_edges.push_back(edge_of(e));
  for (const auto& e : array_at(o, "deleted_edges")) d.deleted_edges.push_back(edge_of(e));
  for (const auto& u : array_at(o, "node_updates")) {
    if (!u.is_object()) malformed("node update is not an object");
    Node n{id_of(str_at(u, "id")), node_kind_of(str_at(u, "kind")), std::nullopt, false};
    if (auto it = u.find("first_seen"); it != u.end() && !it->is_null()) n.first_seen = date_at(u, "first_seen");
    if (auto it = u.find("metadata_present"); it != u.end()) {
      if (!it->is_boolean()) malformed("metadata_present is not a boolean");
      n.metadata_present = it->get<bool>();
    }
    d.node_updates.push_back(std::move(n));
  }
  for (const auto& v : array_at(o, "dropped_stubs")) {
    if (!v.is_string()) malformed("dropped_stubs holds a non-string");
    d.dropped_stubs.push_back(id_of(v.get<std::string>()));
  }

  std::set<NodeId> added;
  for (const auto& r : d.added) added.insert(r.id);
  for (const auto& id : d.deleted)
    if (added.contains(id)) malformed(id.str() + " is both added and deleted");
  return d;
}

// ---------------------------------------------------------------------------
// churn

ChurnStats churn_report(const std::vector<Delta>& deltas) {
  if (deltas.empty()) throw Error(ErrorCode::EmptyInput, "no deltas");
  ChurnStats s;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const Delta& d = deltas[i];
    if (i > 0 && !(deltas[i - 1].to == d.from))
      s.warnings.push_back("GapInDates: " + deltas[i - 1].to.str() + " is followed by a delta from " + d.from.str());
    if (d.deleted_kinds.size() != d.deleted.size())
      throw Error(ErrorCode::InvalidArgument, "delta " + d.to.str() + " lacks kinds for its deleted ids");

    std::map<NodeId, NodeKind> final_kind;
    for (const Node& n : d.node_updates) final_kind.emplace(n.id, n.kind);
    ChurnDay day;
    day.date = d.to;
    for (const auto& r : d.added) {
      auto it = final_kind.find(r.id);
      ++day.added[index_of(it != final_kind.end() ? it->second : provisional_kind(r))];
    }
    for (NodeKind k : d.deleted_kinds) ++day.deleted[index_of(k)];
    s.days.push_back(day);
  }

  const double n = static_cast<double>(s.days.size());
  std::array<std::size_t, kNodeKindCount> add_sum{}, del_sum{};
  for (const auto& day : s.days)
    for (std::size_t k = 0; k < kNodeKindCount; ++k) {
      add_sum[k] += day.added[k];
      del_sum[k] += day.deleted[k];
    }
  for (std::size_t k = 0; k < kNodeKindCount; ++k) {
    s.mean_added[k] = static_cast<double>(add_sum[k]) / n;
    s.mean_deleted[k] = static_cast<double>(del_sum[k]) / n;
    if (kAllNodeKinds[k] == NodeKind::Dataset) {
      s.mean_datasets_added = s.mean_added[k];
      s.mean_datasets_deleted = s.mean_deleted[k];
    } else {
      s.mean_models_added += s.mean_added[k];
      s.mean_models_deleted += s.mean_deleted[k];
    }
  }
  return s;
}

std::string churn_to_csv(const ChurnStats& stats) {
  std::string out = csv::row({"date", "kind", "added", "deleted"});
  for (const auto& day : stats.days)
    for (NodeKind k : kAllNodeKinds)
      out += csv::row({day.date.str(), std::string(token(k)), std::to_string(day.added[index_of(k)]),
                       std::to_string(day.deleted[index_of(k)])});
  return out;
}

}  // namespace supplygraph
