#pragma once

#include <filesystem>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "supplygraph/graph.hpp"

namespace supplygraph {

enum class RecordType : std::uint8_t { Model, Dataset };

/// One model or dataset card as collected from the platform.
struct SnapshotRecord {
  NodeId id;
  RecordType type = RecordType::Model;
  std::vector<NodeId> base_model;
  std::optional<EdgeKind> relation;  // model-model kinds only
  std::vector<NodeId> datasets;
  // dataset-only fields
  std::vector<NodeId> trained_models;
  std::vector<NodeId> subset_of;
  std::vector<NodeId> modified_from;
  std::vector<NodeId> derived_from;
  std::string description;
  std::vector<std::string> xref_urls;
  std::optional<Date> first_seen;

  /// True when the card carries any content beyond its id and type.
  bool metadata_present() const;

  friend bool operator==(const SnapshotRecord&, const SnapshotRecord&) = default;
};

struct RejectedLine {
  std::size_t line_number = 0;  // 1-based
  std::string reason;
};

struct Snapshot {
  Date date;
  std::map<std::string, SnapshotRecord> records;  // keyed by id string
  std::vector<RejectedLine> rejects;
  std::vector<std::string> warnings;
};

/// Parses one JSONL line. Throws MalformedInput with the reason.
SnapshotRecord parse_record(std::string_view json_line);
/// Inverse of parse_record; keys in fixed order, empty fields omitted.
std::string record_to_json(const SnapshotRecord& r);

/// Reads a snapshot. Malformed lines land in `rejects`; a later duplicate id
/// replaces the earlier record with a warning. Throws UnreadableInput, or
/// EmptySnapshot when no line yields a record.
Snapshot load_snapshot(std::istream& in, Date date);
/// Without an explicit date the file name must contain YYYY-MM-DD.
Snapshot load_snapshot(const std::filesystem::path& path, std::optional<Date> date = std::nullopt);
std::optional<Date> date_from_filename(const std::filesystem::path& path);

/// Rejects report: JSONL of {"line_number": n, "reason": "..."}.
std::string rejects_to_jsonl(const std::vector<RejectedLine>& rejects);

enum class EvidenceSource : std::uint8_t { StructuredField, CrossReferenceUrl, TextPattern };
std::string_view token(EvidenceSource s) noexcept;

/// A dependency found in a card. `parent` is the referenced artifact and
/// `child` the one carrying the evidence (unset when extracted without
/// context). The graph edge runs parent -> child, except for Subset where the
/// subset (child) points at the collection containing it.
struct ExtractedDependency {
  NodeId parent;
  std::optional<NodeId> child;
  EdgeKind kind = EdgeKind::FineTune;
  EvidenceSource source = EvidenceSource::StructuredField;

  Edge edge() const;
  friend bool operator==(const ExtractedDependency&, const ExtractedDependency&) = default;
};

/// Recognizes `other=base_model:<relation>:<namespace>/<name>` in the query
/// string; anything else yields nullopt.
std::optional<ExtractedDependency> extract_cross_reference(std::string_view url);

/// Phrase rules over free text. Parents are returned as written (original
/// case), in order of appearance, without duplicates.
std::vector<ExtractedDependency> extract_textual_dependencies(std::string_view text);

/// Canonical text that extracts back to exactly `deps`.
std::string render_dependencies(const std::vector<ExtractedDependency>& deps);

/// Node kind for a record given the kinds of its incoming model-model edges.
NodeKind classify_node(const SnapshotRecord& record, const std::vector<EdgeKind>& incoming_relations);

/// Maps loose text mentions onto known ids: exact id, then a unique
/// case-insensitive id, then a unique case-insensitive display name. Longer
/// token prefixes of the mention are tried first.
class NameResolver {
 public:
  explicit NameResolver(const std::vector<std::string>& ids);

  enum class Outcome : std::uint8_t { Resolved, Ambiguous, Unknown };
  struct Result {
    Outcome outcome = Outcome::Unknown;
    std::string id;
  };
  Result resolve(std::string_view mention) const;

 private:
  Result lookup(std::string_view candidate) const;

  std::vector<std::string> exact_;  // sorted
  std::map<std::string, std::vector<std::string>> by_lower_id_;
  std::map<std::string, std::vector<std::string>> by_lower_name_;
};

struct BuildOptions {
  StubPolicy stub_policy = StubPolicy::Create;
};

struct BuildResult {
  SupplyChainGraph graph;
  /// Evidence behind every materialized edge, in build order.
  std::vector<ExtractedDependency> audit;
  std::vector<std::string> warnings;

  std::vector<ExtractedDependency> provenance(const Edge& e) const;
};

/// Extraction runs per record in parallel; materialization is sequential in
/// ascending record id order. Bad evidence becomes a warning, never an abort.
BuildResult build_graph_with_audit(const Snapshot& snapshot, const BuildOptions& options = {});
SupplyChainGraph build_graph(const Snapshot& snapshot, const BuildOptions& options = {});

/// Read-only view of a metadata platform.
struct PlatformClient {
  std::function<std::vector<std::string>()> list_models;
  std::function<std::vector<std::string>()> list_datasets;
  /// Card for an id as one JSON object in the snapshot record format.
  std::function<std::string(const std::string&)> get_card;
};

/// Serves cards out of a snapshot JSONL file.
PlatformClient disk_platform(const std::filesystem::path& snapshot_file);

/// Fetches every listed card with at most `parallelism` requests in flight.
Snapshot collect_snapshot(const PlatformClient& client, Date date, std::size_t parallelism);

}  // namespace supplygraph
