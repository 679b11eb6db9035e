#include "supplygraph/reports.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <nlohmann/json.hpp>

#include "supplygraph/csv.hpp"
#include "supplygraph/kernels.hpp"

namespace supplygraph {

namespace {

using I = std::int64_t;

I as_int(std::size_t v) { return static_cast<I>(v); }

std::string format_real(double v, int precision) {
  if (v == 0.0) v = 0.0;  // no "-0.00"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  std::string s(buf);
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

std::string render(const Cell& c, const Column& col) {
  switch (c.index()) {
    case 0: return std::get<std::string>(c);
    case 1: return std::to_string(std::get<I>(c));
    default: return format_real(std::get<double>(c), col.precision);
  }
}

template <class Less>
std::vector<NodeIndex> ranked(std::vector<NodeIndex> v, std::size_t k, Less less) {
  const std::size_t keep = std::min(k, v.size());
  std::partial_sort(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(keep), v.end(), less);
  v.resize(keep);
  return v;
}

/// Base models reached backward from `origin` that have no model parent.
std::vector<NodeIndex> lineage_roots(const SupplyChainGraph& g, NodeIndex origin) {
  std::vector<char> seen(g.node_count(), 0);
  std::vector<NodeIndex> frontier{origin}, roots;
  seen[origin] = 1;
  while (!frontier.empty()) {
    NodeIndex u = frontier.back();
    frontier.pop_back();
    for (const Adjacent& a : g.in_edges(u)) {
      if (seen[a.node]) continue;
      seen[a.node] = 1;
      frontier.push_back(a.node);
      if (g.node(a.node).kind != NodeKind::BaseModel) continue;
      const auto in = g.in_edges(a.node);
      if (std::none_of(in.begin(), in.end(), [](const Adjacent& p) { return is_model_model(p.kind); }))
        roots.push_back(a.node);
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

std::string join_examples(const SupplyChainGraph& g, std::vector<NodeIndex> members, const std::vector<std::size_t>& deg) {
  std::sort(members.begin(), members.end(), [&](NodeIndex a, NodeIndex b) {
    return deg[a] != deg[b] ? deg[a] > deg[b] : a < b;
  });
  std::string out;
  for (std::size_t i = 0; i < members.size() && i < 2; ++i) {
    if (i) out += "; ";
    out += g.node(members[i]).id.str();
  }
  return out;
}

}  // namespace

std::string_view token(ColumnType t) noexcept {
  switch (t) {
    case ColumnType::String: return "string";
    case ColumnType::Int: return "int";
    case ColumnType::Real: return "real";
  }
  return "string";
}

ReportTable::ReportTable(std::string name, std::vector<Column> columns)
    : name_(std::move(name)), columns_(std::move(columns)) {}

void ReportTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size())
    throw Error(ErrorCode::InvalidArgument, "report " + name_ + ": row has " + std::to_string(row.size()) +
                                                " cells, expected " + std::to_string(columns_.size()));
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (row[i].index() != static_cast<std::size_t>(columns_[i].type))
      throw Error(ErrorCode::InvalidArgument, "report " + name_ + ": column " + columns_[i].name +
                                                  " expects " + std::string(token(columns_[i].type)));
  }
  rows_.push_back(std::move(row));
}

std::string ReportTable::to_csv() const {
  std::vector<std::string> fields;
  for (const auto& c : columns_) fields.push_back(c.name);
  std::string out = csv::row(fields);
  for (const auto& r : rows_) {
    fields.clear();
    for (std::size_t i = 0; i < r.size(); ++i) fields.push_back(render(r[i], columns_[i]));
    out += csv::row(fields);
  }
  return out;
}

std::string ReportTable::to_json() const {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : rows_) {
    nlohmann::ordered_json o;
    for (std::size_t i = 0; i < r.size(); ++i) {
      const Column& c = columns_[i];
      switch (c.type) {
        case ColumnType::String: o[c.name] = std::get<std::string>(r[i]); break;
        case ColumnType::Int: o[c.name] = std::get<I>(r[i]); break;
        // same rounding as the CSV so both files agree
        case ColumnType::Real: o[c.name] = std::stod(render(r[i], c)); break;
      }
    }
    arr.push_back(std::move(o));
  }
  return arr.dump(2) + "\n";
}

std::string_view kind_label(NodeKind k) noexcept {
  switch (k) {
    case NodeKind::BaseModel: return "Base";
    case NodeKind::FineTune: return "Finetune";
    case NodeKind::Adapter: return "Adapter";
    case NodeKind::Quantization: return "Quantization";
    case NodeKind::Merge: return "Merge";
    case NodeKind::Dataset: return "Dataset";
  }
  return "";
}

ReportTable top_base_models_by_forward_impact(const SupplyChainGraph& g, std::size_t k) {
  ReportTable t("forward_impact", {{"Base model"},
                                   {"Total", ColumnType::Int},
                                   {"Fine-tune", ColumnType::Int},
                                   {"Adapter", ColumnType::Int},
                                   {"Quantization", ColumnType::Int},
                                   {"Merge", ColumnType::Int},
                                   {"Level", ColumnType::Int}});
  std::vector<NodeIndex> origins;
  for (NodeIndex i = 0; i < g.node_count(); ++i)
    if (g.node(i).kind == NodeKind::BaseModel) origins.push_back(i);
  const auto stats = kernels::parallel::reach_stats(g, origins, Direction::Forward);

  std::vector<NodeIndex> order(origins.size());
  std::iota(order.begin(), order.end(), 0);
  order = ranked(std::move(order), k, [&](NodeIndex a, NodeIndex b) {
    return stats[a].total != stats[b].total ? stats[a].total > stats[b].total : origins[a] < origins[b];
  });
  for (NodeIndex r : order) {
    const auto& s = stats[r];
    auto pk = [&](NodeKind kind) { return I{s.per_kind[index_of(kind)]}; };
    t.add_row({g.node(origins[r]).id.str(), I{s.total}, pk(NodeKind::FineTune), pk(NodeKind::Adapter),
               pk(NodeKind::Quantization), pk(NodeKind::Merge), I{s.level}});
  }
  return t;
}

std::vector<BackwardLineage> backward_lineages(const SupplyChainGraph& g, std::size_t limit) {
  std::vector<NodeIndex> origins;
  for (NodeIndex i = 0; i < g.node_count(); ++i) {
    const NodeKind kind = g.node(i).kind;
    if (is_model(kind) && kind != NodeKind::BaseModel) origins.push_back(i);
  }
  const auto stats = kernels::parallel::reach_stats(g, origins, Direction::Backward);

  std::vector<NodeIndex> order;
  for (NodeIndex r = 0; r < origins.size(); ++r)
    if (stats[r].total > 0) order.push_back(r);
  const std::size_t keep = limit == 0 ? order.size() : limit;
  order = ranked(std::move(order), keep, [&](NodeIndex a, NodeIndex b) {
    return stats[a].total != stats[b].total ? stats[a].total > stats[b].total : origins[a] < origins[b];
  });

  std::vector<BackwardLineage> out;
  out.reserve(order.size());
  for (NodeIndex r : order) {
    const auto& s = stats[r];
    BackwardLineage b;
    b.model = origins[r];
    b.total = s.total;
    b.fine_tune = s.per_kind[index_of(NodeKind::FineTune)];
    b.adapter = s.per_kind[index_of(NodeKind::Adapter)];
    b.quantization = s.per_kind[index_of(NodeKind::Quantization)];
    b.merge = s.per_kind[index_of(NodeKind::Merge)];
    b.level = s.model_level;
    const auto roots = lineage_roots(g, b.model);
    b.base_model = roots.empty() ? "none" : roots.size() > 1 ? "multiple" : g.node(roots[0]).id.str();
    out.push_back(std::move(b));
  }
  return out;
}

ReportTable top_models_by_backward_size(const SupplyChainGraph& g, std::size_t k) {
  ReportTable t("backward_lineage", {{"Model"},
                                     {"Model Type"},
                                     {"Total", ColumnType::Int},
                                     {"Fine-tune", ColumnType::Int},
                                     {"Quantization", ColumnType::Int},
                                     {"Level", ColumnType::Int},
                                     {"Base Model"}});
  for (const auto& b : backward_lineages(g, k)) {
    const Node& n = g.node(b.model);
    t.add_row({n.id.str(), std::string(kind_label(n.kind)), as_int(b.total), as_int(b.fine_tune),
               as_int(b.quantization), as_int(b.level), b.base_model});
  }
  return t;
}

DatasetInclusion dataset_inclusion_table(const SupplyChainGraph& g, std::size_t k) {
  DatasetInclusion out{ReportTable("dataset_included", {{"Dataset"}, {"# of included", ColumnType::Int}}),
                       ReportTable("dataset_derived", {{"Dataset"}, {"# of derived", ColumnType::Int}})};
  std::vector<std::size_t> in(g.node_count(), 0), outd(g.node_count(), 0);
  std::vector<NodeIndex> datasets;
  for (NodeIndex i = 0; i < g.node_count(); ++i) {
    if (g.node(i).kind != NodeKind::Dataset) continue;
    datasets.push_back(i);
    for (const Adjacent& a : g.in_edges(i)) in[i] += is_dataset_dataset(a.kind);
    for (const Adjacent& a : g.out_edges(i)) outd[i] += is_dataset_dataset(a.kind);
  }
  auto fill = [&](ReportTable& t, const std::vector<std::size_t>& score) {
    std::vector<NodeIndex> c;
    for (NodeIndex d : datasets)
      if (score[d] > 0) c.push_back(d);
    for (NodeIndex d : ranked(std::move(c), k, [&](NodeIndex a, NodeIndex b) {
           return score[a] != score[b] ? score[a] > score[b] : a < b;
         }))
      t.add_row({g.node(d).id.str(), as_int(score[d])});
  };
  fill(out.included, in);
  fill(out.derived, outd);
  return out;
}

ReportTable dataset_to_models_table(const SupplyChainGraph& g, std::size_t k) {
  ReportTable t("dataset_models", {{"Dataset"},
                                   {"Total", ColumnType::Int},
                                   {"Fine-tune", ColumnType::Int},
                                   {"Adapter", ColumnType::Int},
                                   {"Quantization", ColumnType::Int},
                                   {"Merges", ColumnType::Int}});
  std::vector<std::array<std::size_t, kNodeKindCount>> per(g.node_count());
  std::vector<std::size_t> total(g.node_count(), 0);
  std::vector<NodeIndex> c;
  for (NodeIndex i = 0; i < g.node_count(); ++i) {
    if (g.node(i).kind != NodeKind::Dataset) continue;
    std::vector<NodeIndex> children;
    for (const Adjacent& a : g.out_edges(i))
      if (a.kind == EdgeKind::TrainedOn) children.push_back(a.node);
    std::sort(children.begin(), children.end());
    children.erase(std::unique(children.begin(), children.end()), children.end());
    per[i] = {};
    for (NodeIndex m : children) ++per[i][index_of(g.node(m).kind)];
    total[i] = children.size();
    if (total[i] > 0) c.push_back(i);
  }
  for (NodeIndex d : ranked(std::move(c), k, [&](NodeIndex a, NodeIndex b) {
         return total[a] != total[b] ? total[a] > total[b] : a < b;
       })) {
    auto pk = [&](NodeKind kind) { return as_int(per[d][index_of(kind)]); };
    t.add_row({g.node(d).id.str(), as_int(total[d]), pk(NodeKind::FineTune), pk(NodeKind::Adapter),
               pk(NodeKind::Quantization), pk(NodeKind::Merge)});
  }
  return t;
}

ReportTable model_dataset_counts(const SupplyChainGraph& g, std::size_t k) {
  ReportTable t("model_datasets", {{"Model"}, {"Model Type"}, {"# of datasets", ColumnType::Int}});
  std::vector<std::size_t> count(g.node_count(), 0);
  std::vector<NodeIndex> c;
  for (NodeIndex i = 0; i < g.node_count(); ++i) {
    if (!is_model(g.node(i).kind)) continue;
    std::vector<NodeIndex> parents;
    for (const Adjacent& a : g.in_edges(i))
      if (a.kind == EdgeKind::TrainedOn) parents.push_back(a.node);
    std::sort(parents.begin(), parents.end());
    count[i] = static_cast<std::size_t>(std::unique(parents.begin(), parents.end()) - parents.begin());
    if (count[i] > 0) c.push_back(i);
  }
  for (NodeIndex m : ranked(std::move(c), k, [&](NodeIndex a, NodeIndex b) {
         return count[a] != count[b] ? count[a] > count[b] : a < b;
       }))
    t.add_row({g.node(m).id.str(), std::string(kind_label(g.node(m).kind)), as_int(count[m])});
  return t;
}

ReportTable graph_summary(const SupplyChainGraph& g) {
  ReportTable t("summary", {{"Nodes", ColumnType::Int},
                            {"Edges", ColumnType::Int},
                            {"Base", ColumnType::Int},
                            {"Fine-tune", ColumnType::Int},
                            {"Adapter", ColumnType::Int},
                            {"Quantization", ColumnType::Int},
                            {"Merge", ColumnType::Int},
                            {"Dataset", ColumnType::Int},
                            {"Average degree", ColumnType::Real},
                            {"Metadata missing %", ColumnType::Real}});
  const std::size_t n = g.node_count();
  std::size_t missing = 0;
  for (const Node& node : g.nodes()) missing += !node.metadata_present;
  const double avg = n ? static_cast<double>(g.edge_count()) / static_cast<double>(n) : 0.0;
  const double miss = n ? 100.0 * static_cast<double>(missing) / static_cast<double>(n) : 0.0;
  t.add_row({as_int(n), as_int(g.edge_count()), as_int(g.count(NodeKind::BaseModel)),
             as_int(g.count(NodeKind::FineTune)), as_int(g.count(NodeKind::Adapter)),
             as_int(g.count(NodeKind::Quantization)), as_int(g.count(NodeKind::Merge)),
             as_int(g.count(NodeKind::Dataset)), avg, miss});
  return t;
}

ReportTable communities_table(const SupplyChainGraph& g, const Partition& p, std::size_t k) {
  ReportTable t("communities", {{"ID", ColumnType::Int}, {"Size", ColumnType::Int}, {"E.g. models"}, {"E.g. datasets"}});
  if (p.community_of.size() != g.node_count())
    throw Error(ErrorCode::InvalidArgument, "partition does not match the graph");
  const std::size_t cc = p.community_count();
  std::vector<std::vector<NodeIndex>> members(cc);
  for (NodeIndex i = 0; i < g.node_count(); ++i) {
    const I c = p.community_of[i];
    if (c < 0 || static_cast<std::size_t>(c) >= cc) throw Error(ErrorCode::UnassignedNode, g.node(i).id.str());
    members[static_cast<std::size_t>(c)].push_back(i);
  }
  std::vector<std::size_t> deg(g.node_count());
  for (NodeIndex i = 0; i < g.node_count(); ++i) deg[i] = g.in_edges(i).size() + g.out_edges(i).size();

  std::vector<NodeIndex> ids(cc);
  std::iota(ids.begin(), ids.end(), 0);
  for (NodeIndex c : ranked(std::move(ids), k, [&](NodeIndex a, NodeIndex b) {
         return members[a].size() != members[b].size() ? members[a].size() > members[b].size() : a < b;
       })) {
    std::vector<NodeIndex> models, datasets;
    for (NodeIndex m : members[c]) (is_model(g.node(m).kind) ? models : datasets).push_back(m);
    t.add_row({I{c}, as_int(members[c].size()), join_examples(g, std::move(models), deg),
               join_examples(g, std::move(datasets), deg)});
  }
  return t;
}

ReportTable modularity_table(const Partition& p) {
  ReportTable t("modularity", {{"Modularity", ColumnType::Real, 4}, {"Communities", ColumnType::Int}});
  t.add_row({p.modularity, as_int(p.community_count())});
  return t;
}

ReportTable degree_distribution_table(const SupplyChainGraph& g) {
  ReportTable t("degree_distribution",
                {{"Direction"}, {"Kind"}, {"Degree", ColumnType::Int}, {"Nodes", ColumnType::Int}});
  for (DegreeDirection d : {DegreeDirection::In, DegreeDirection::Out}) {
    const std::string dir = d == DegreeDirection::In ? "in" : "out";
    std::vector<std::optional<NodeKind>> filters{std::nullopt};
    for (NodeKind kind : kAllNodeKinds) filters.emplace_back(kind);
    for (const auto& f : filters) {
      const auto h = degree_distribution(g, d, f);
      const std::string kind = f ? std::string(token(*f)) : "all";
      for (const auto& b : h.buckets) t.add_row({dir, kind, as_int(b.degree), as_int(b.node_count)});
    }
  }
  return t;
}

ReportTable wcc_cdf_table(const ComponentSet& components) {
  ReportTable t(components.mode == ComponentMode::Weak ? "wcc_cdf" : "scc_cdf",
                {{"Size", ColumnType::Int}, {"Cumulative fraction", ColumnType::Real, 6}});
  for (const auto& p : component_size_cdf(components)) t.add_row({as_int(p.size), p.cum_fraction});
  return t;
}

const std::vector<std::string>& report_names() {
  static const std::vector<std::string> names{
      "forward_impact", "backward_lineage", "dataset_inclusion", "dataset_models", "model_datasets",
      "summary",        "communities",      "degree_distribution", "wcc_cdf"};
  return names;
}

std::vector<ReportTable> make_report(const SupplyChainGraph& g, const std::string& name, std::size_t k,
                                     const LouvainOptions& louvain_options) {
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
  if (name == "forward_impact") return {top_base_models_by_forward_impact(g, k)};
  if (name == "backward_lineage") return {top_models_by_backward_size(g, k)};
  if (name == "dataset_inclusion") {
    auto d = dataset_inclusion_table(g, k);
    return {std::move(d.included), std::move(d.derived)};
  }
  if (name == "dataset_models") return {dataset_to_models_table(g, k)};
  if (name == "model_datasets") return {model_dataset_counts(g, k)};
  if (name == "summary") return {graph_summary(g)};
  if (name == "communities") {
    const Partition p = louvain(g, louvain_options);
    return {communities_table(g, p, k), modularity_table(p)};
  }
  if (name == "degree_distribution") return {degree_distribution_table(g)};
  if (name == "wcc_cdf") return {wcc_cdf_table(weakly_connected_components(g))};
  throw Error(ErrorCode::InvalidArgument, "unknown report: " + name);
}

std::filesystem::path write_report(const ReportTable& t, const std::filesystem::path& dir, const std::string& date) {
  std::filesystem::create_directories(dir);
  const std::string stem = "report_" + t.name() + "_" + date;
  const auto csv_path = dir / (stem + ".csv");
  csv::write_file_atomic(csv_path, t.to_csv());
  csv::write_file_atomic(dir / (stem + ".json"), t.to_json());
  return csv_path;
}

}  // namespace supplygraph
