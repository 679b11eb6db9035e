#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "supplygraph/ingest.hpp"

namespace supplygraph {

/// Signed change set between two consecutive snapshots.
struct Delta {
  Date from;
  Date to;
  std::vector<SnapshotRecord> added;    // ids new in `to`, ascending
  std::vector<SnapshotRecord> changed;  // same id, different fields (new version)
  std::vector<NodeId> deleted;          // ids gone in `to`, ascending
  std::vector<NodeKind> deleted_kinds;  // kind of each deleted id in the `from` graph
  std::vector<Edge> added_edges;
  std::vector<Edge> deleted_edges;
  /// Final attributes for nodes that are new or whose attributes changed.
  /// Optional in hand-written deltas.
  std::vector<Node> node_updates;
  /// Stubs that are no longer referenced by anything.
  std::vector<NodeId> dropped_stubs;

  bool empty() const;
};

/// Builds both snapshots and records every difference between the graphs,
/// so that apply_delta(build(a), diff) reproduces build(b) exactly.
/// Throws OutOfOrderSnapshots unless b.date > a.date.
Delta diff_snapshots(const Snapshot& a, const Snapshot& b, const BuildOptions& options = {});

/// Removes deleted edges, adds new nodes and edges, then drops deleted ids
/// that no longer have edges; deleted ids that still do become stubs.
/// Throws InconsistentDelta when the graph's snapshot date is not `from` or
/// the delta does not fit the graph.
SupplyChainGraph apply_delta(const SupplyChainGraph& g, const Delta& d);

std::string delta_to_json(const Delta& d);
/// Throws MalformedInput.
Delta delta_from_json(std::string_view text);

struct ChurnDay {
  Date date;
  std::array<std::size_t, kNodeKindCount> added{};
  std::array<std::size_t, kNodeKindCount> deleted{};
};

struct ChurnStats {
  std::vector<ChurnDay> days;
  std::array<double, kNodeKindCount> mean_added{};
  std::array<double, kNodeKindCount> mean_deleted{};
  double mean_models_added = 0.0;  // all model kinds together
  double mean_models_deleted = 0.0;
  double mean_datasets_added = 0.0;
  double mean_datasets_deleted = 0.0;
  std::vector<std::string> warnings;  // gaps between consecutive deltas
};

/// Throws EmptyInput for an empty list. A delta whose `from` is not the
/// previous delta's `to` only produces a warning.
ChurnStats churn_report(const std::vector<Delta>& deltas);

/// `date,kind,added,deleted`, one row per day and node kind.
std::string churn_to_csv(const ChurnStats& stats);

}  // namespace supplygraph
