#include "supplygraph/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "supplygraph/anonymize.hpp"
#include "supplygraph/csv.hpp"
#include "supplygraph/delta.hpp"
#include "supplygraph/graph_io.hpp"
#include "supplygraph/reports.hpp"

namespace supplygraph {

void Config::validate() const {
  if (parallelism < 1) throw Error(ErrorCode::InvalidConfig, "parallelism must be at least 1");
  if (k < 1) throw Error(ErrorCode::InvalidConfig, "k must be at least 1");
  if (!(resolution > 0.0)) throw Error(ErrorCode::InvalidConfig, "resolution must be positive");
  if (restarts < 0) throw Error(ErrorCode::InvalidConfig, "restarts must be >= 0");
}

namespace {

using std::filesystem::path;

std::optional<Date> parse_date_flag(const std::string& s) {
  if (s.empty()) return std::nullopt;
  auto d = Date::parse(s);
  if (!d) throw Error(ErrorCode::InvalidArgument, "bad date '" + s + "', expected YYYY-MM-DD");
  return d;
}

LouvainOptions louvain_options(const Config& c, bool shuffle_ties) {
  LouvainOptions o;
  o.resolution = c.resolution;
  o.seed = c.seed;
  o.restarts = c.restarts;
  o.shuffle_ties = shuffle_ties;
  return o;
}

std::string provenance_csv(const BuildResult& r) {
  std::string out = "src,dst,kind,source\n";
  for (const auto& d : r.audit) {
    Edge e = d.edge();
    out += csv::row({e.src.str(), e.dst.str(), std::string(token(e.kind)), std::string(token(d.source))});
  }
  return out;
}

std::string traversal_json(const TraversalResult& t) {
  nlohmann::ordered_json j;
  j["origin"] = t.origin.str();
  j["direction"] = t.direction == Direction::Forward ? "forward" : "backward";
  auto reached = nlohmann::ordered_json::array();
  for (const auto& id : t.reached) reached.push_back(id.str());
  j["reached"] = std::move(reached);
  nlohmann::ordered_json counts = nlohmann::ordered_json::object();
  for (NodeKind k : kAllNodeKinds) counts[std::string(token(k))] = t.per_kind_counts[index_of(k)];
  j["per_kind_counts"] = std::move(counts);
  j["level"] = t.level;
  return j.dump(2) + "\n";
}

std::string membership_csv(const SupplyChainGraph& g, const std::vector<std::int64_t>& of, const char* column) {
  std::string out = std::string("id,") + column + "\n";
  for (NodeIndex i = 0; i < g.node_count(); ++i) out += csv::row({g.node(i).id.str(), std::to_string(of[i])});
  return out;
}

void print_warnings(std::ostream& err, const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) err << "warning: " << w << "\n";
}

std::string format_modularity(double q) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", q);
  return buf;
}

bool usage_error(ErrorCode c) {
  return c == ErrorCode::InvalidConfig || c == ErrorCode::InvalidArgument || c == ErrorCode::SaltMissing;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Build and analyse model/dataset supply-chain graphs", "supplygraph"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML or INI file with option defaults");

  Config cfg;
  path graph_dir, out_path, delta_file, from_file, to_file, mapping_file;
  std::string date_flag, forward_id, backward_id, report_name;
  std::vector<path> delta_files;
  bool weak = false, strong = false, shuffle_ties = false;

  const std::map<std::string, StubPolicy> policies{{"create", StubPolicy::Create}, {"reject", StubPolicy::Reject}};
  auto add_stub_policy = [&](CLI::App* s) {
    s->add_option("--stub-policy", cfg.stub_policy, "create|reject for references to unknown ids")
        ->transform(CLI::CheckedTransformer(policies, CLI::ignore_case).description("{create,reject}"));
  };
  auto add_louvain = [&](CLI::App* s) {
    s->add_option("--resolution", cfg.resolution, "modularity resolution");
    s->add_option("--seed", cfg.seed, "seed for shuffled runs and tie breaks");
    s->add_option("--restarts", cfg.restarts, "extra Louvain runs");
    s->add_flag("--shuffle-ties", shuffle_ties, "break equal-gain moves at random");
  };
  auto graph_opt = [&](CLI::App* s) {
    s->add_option("--graph", graph_dir, "graph directory (nodes.csv, edges.csv)")->required()->check(CLI::ExistingDirectory);
  };

  auto* build = app.add_subcommand("build", "build a graph from a snapshot");
  auto* snap_opt = build->add_option("--snapshot", cfg.snapshots, "snapshot JSONL file")->check(CLI::ExistingFile);
  auto* plat_opt = build->add_option("--platform", cfg.platform_file, "fetch cards through the platform adapter from this file")
                       ->check(CLI::ExistingFile);
  snap_opt->excludes(plat_opt);
  build->add_option("--date", date_flag, "snapshot date (default: from the file name)");
  build->add_option("--parallelism", cfg.parallelism, "concurrent card fetches");
  build->add_option("--out", out_path, "output directory")->required();
  add_stub_policy(build);

  auto* update = app.add_subcommand("update", "apply a delta to a graph");
  graph_opt(update);
  update->add_option("--delta", delta_file, "delta JSON")->required()->check(CLI::ExistingFile);
  update->add_option("--out", out_path, "output directory (default: the graph directory)");

  auto* diff = app.add_subcommand("diff", "compute the delta between two snapshots");
  diff->add_option("--from", from_file, "older snapshot")->required()->check(CLI::ExistingFile);
  diff->add_option("--to", to_file, "newer snapshot")->required()->check(CLI::ExistingFile);
  diff->add_option("--out", out_path, "delta JSON to write")->required();
  add_stub_policy(diff);

  auto* churn = app.add_subcommand("churn", "daily additions and deletions from deltas");
  churn->add_option("--delta", delta_files, "delta JSON files in date order")->required()->check(CLI::ExistingFile);
  churn->add_option("--out", out_path, "CSV to write (default: stdout)");

  auto* query = app.add_subcommand("query", "forward or backward subgraph of one node");
  graph_opt(query);
  auto* fwd = query->add_option("--forward", forward_id, "node id");
  auto* bwd = query->add_option("--backward", backward_id, "node id");
  fwd->excludes(bwd);

  auto* stats = app.add_subcommand("stats", "print the graph summary");
  graph_opt(stats);

  auto* communities = app.add_subcommand("communities", "Louvain communities");
  graph_opt(communities);
  communities->add_option("--out", out_path, "partition CSV to write")->required();
  add_louvain(communities);

  auto* components = app.add_subcommand("components", "weakly or strongly connected components");
  graph_opt(components);
  auto* weak_flag = components->add_flag("--weak", weak, "weak components");
  auto* strong_flag = components->add_flag("--strong", strong, "strong components");
  weak_flag->excludes(strong_flag);
  components->add_option("--out", out_path, "output directory")->required();

  auto* report = app.add_subcommand("report", "write an analysis table");
  graph_opt(report);
  std::vector<std::string> names = report_names();
  names.push_back("all");
  report->add_option("--name", report_name, "report name or 'all'")->required()->check(CLI::IsMember(names));
  report->add_option("--out", out_path, "output directory")->required();
  report->add_option("--k", cfg.k, "rows per ranking");
  report->add_option("--date", date_flag, "date used in file names (default: the graph's snapshot date)");
  add_louvain(report);

  auto* exp = app.add_subcommand("export", "re-export a graph in canonical form");
  graph_opt(exp);
  exp->add_option("--out", out_path, "output directory")->required();

  auto* anon = app.add_subcommand("anonymize", "export with keyed-digest ids");
  graph_opt(anon);
  anon->add_option("--out", out_path, "output directory")->required();
  anon->add_option("--salt", cfg.salt, "digest key")->envname("SUPPLY_GRAPH_SALT");
  anon->add_option("--mapping", mapping_file, "also write original,anonymized pairs here");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    cfg.validate();
    if (*build) {
      if (cfg.snapshots.empty() && cfg.platform_file.empty())
        throw Error(ErrorCode::InvalidArgument, "build needs --snapshot or --platform");
      if (cfg.snapshots.size() > 1) throw Error(ErrorCode::InvalidArgument, "build takes one --snapshot");
      Snapshot s;
      if (!cfg.platform_file.empty()) {
        auto d = parse_date_flag(date_flag);
        if (!d) d = date_from_filename(cfg.platform_file);
        if (!d) throw Error(ErrorCode::InvalidArgument, "--date is required with --platform");
        s = collect_snapshot(disk_platform(cfg.platform_file), *d, cfg.parallelism);
      } else {
        s = load_snapshot(cfg.snapshots[0], parse_date_flag(date_flag));
      }
      auto r = build_graph_with_audit(s, BuildOptions{cfg.stub_policy});
      print_warnings(err, s.warnings);
      print_warnings(err, r.warnings);
      write_graph(r.graph, out_path);
      csv::write_file_atomic(out_path / "provenance.csv", provenance_csv(r));
      csv::write_file_atomic(out_path / "rejects.jsonl", rejects_to_jsonl(s.rejects));
      out << "built " << r.graph.node_count() << " nodes, " << r.graph.edge_count() << " edges ("
          << s.rejects.size() << " rejected lines)\n";
    } else if (*update) {
      auto g = read_graph(graph_dir);
      auto d = delta_from_json(csv::read_file(delta_file));
      auto h = apply_delta(g, d);
      write_graph(h, out_path.empty() ? graph_dir : out_path);
      out << "updated to " << d.to.str() << ": " << h.node_count() << " nodes, " << h.edge_count() << " edges\n";
    } else if (*diff) {
      auto a = load_snapshot(from_file);
      auto b = load_snapshot(to_file);
      auto d = diff_snapshots(a, b, BuildOptions{cfg.stub_policy});
      csv::write_file_atomic(out_path, delta_to_json(d));
      out << "+" << d.added.size() << " -" << d.deleted.size() << " ~" << d.changed.size() << " records, +"
          << d.added_edges.size() << " -" << d.deleted_edges.size() << " edges\n";
    } else if (*churn) {
      std::vector<Delta> deltas;
      for (const auto& f : delta_files) deltas.push_back(delta_from_json(csv::read_file(f)));
      auto stats_out = churn_report(deltas);
      print_warnings(err, stats_out.warnings);
      const std::string text = churn_to_csv(stats_out);
      if (out_path.empty()) out << text;
      else csv::write_file_atomic(out_path, text);
    } else if (*query) {
      if (forward_id.empty() && backward_id.empty())
        throw Error(ErrorCode::InvalidArgument, "query needs --forward or --backward");
      auto g = read_graph(graph_dir);
      out << traversal_json(forward_id.empty() ? backward_subgraph(g, backward_id) : forward_subgraph(g, forward_id));
    } else if (*stats) {
      out << graph_summary(read_graph(graph_dir)).to_csv();
    } else if (*communities) {
      auto g = read_graph(graph_dir);
      auto p = louvain(g, louvain_options(cfg, shuffle_ties));
      csv::write_file_atomic(out_path, membership_csv(g, p.community_of, "community"));
      out << "modularity " << format_modularity(p.modularity) << ", " << p.community_count() << " communities\n";
    } else if (*components) {
      if (!weak && !strong) throw Error(ErrorCode::InvalidArgument, "components needs --weak or --strong");
      auto g = read_graph(graph_dir);
      auto c = strong ? strongly_connected_components(g) : weakly_connected_components(g);
      const std::string mode = strong ? "strong" : "weak";
      auto m = c.membership(g.node_count());
      std::filesystem::create_directories(out_path);
      csv::write_file_atomic(out_path / ("components_" + mode + ".csv"),
                             membership_csv(g, std::vector<std::int64_t>(m.begin(), m.end()), "component"));
      auto cdf = wcc_cdf_table(c);
      csv::write_file_atomic(out_path / ("component_cdf_" + mode + ".csv"), cdf.to_csv());
      out << c.components.size() << " " << mode << " components, largest "
          << (c.components.empty() ? 0 : c.components[0].size()) << ", " << c.trivial_count() << " single nodes\n";
    } else if (*report) {
      auto g = read_graph(graph_dir);
      std::string date = date_flag;
      if (date.empty()) date = g.snapshot_date() ? g.snapshot_date()->str() : "undated";
      else parse_date_flag(date);
      std::vector<std::string> todo = report_name == "all" ? report_names() : std::vector<std::string>{report_name};
      for (const auto& name : todo)
        for (const auto& t : make_report(g, name, cfg.k, louvain_options(cfg, shuffle_ties)))
          out << write_report(t, out_path, date).string() << "\n";
    } else if (*exp) {
      write_graph(read_graph(graph_dir), out_path);
    } else if (*anon) {
      auto a = anonymize(read_graph(graph_dir), cfg.salt);
      write_graph(a.graph, out_path);
      if (!mapping_file.empty()) csv::write_file_atomic(mapping_file, mapping_to_csv(a));
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return usage_error(e.code()) ? kExitUsage : kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace supplygraph
