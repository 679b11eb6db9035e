#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "supplygraph/algorithms.hpp"
#include "supplygraph/graph.hpp"

namespace supplygraph {

enum class ColumnType : std::uint8_t { String, Int, Real };
std::string_view token(ColumnType t) noexcept;

struct Column {
  std::string name;
  ColumnType type = ColumnType::String;
  int precision = 2;  // digits after the point for Real columns
};

using Cell = std::variant<std::string, std::int64_t, double>;

/// Typed table; rows keep the order the producing report documents.
class ReportTable {
 public:
  ReportTable(std::string name, std::vector<Column> columns);

  const std::string& name() const noexcept { return name_; }
  const std::vector<Column>& columns() const noexcept { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const noexcept { return rows_; }

  /// Throws InvalidArgument when arity or cell types do not match.
  void add_row(std::vector<Cell> row);

  /// RFC 4180, LF line ends, header row; reals at the column precision.
  std::string to_csv() const;
  /// Array of row objects keyed by column name.
  std::string to_json() const;

 private:
  std::string name_;
  std::vector<Column> columns_;
  std::vector<std::vector<Cell>> rows_;
};

inline constexpr std::size_t kDefaultTopK = 10;

/// Display label for a node kind in report cells ("Finetune", "Base", ...).
std::string_view kind_label(NodeKind k) noexcept;

/// Per base model: forward reach split by kind, and the deepest level.
/// Sorted by Total descending, then id.
ReportTable top_base_models_by_forward_impact(const SupplyChainGraph& g, std::size_t k = kDefaultTopK);

struct BackwardLineage {
  NodeIndex model;
  std::size_t total = 0;
  std::size_t fine_tune = 0;
  std::size_t adapter = 0;
  std::size_t quantization = 0;
  std::size_t merge = 0;
  std::size_t level = 0;   // depth of the model-only chain
  std::string base_model;  // "multiple" / "none" when not unique
};

/// Backward lineage of every non-base model with a non-empty lineage,
/// sorted by total descending, then id. Keeps the adapter and merge counts
/// that the rendered table leaves out.
/// `limit` == 0 keeps every row.
std::vector<BackwardLineage> backward_lineages(const SupplyChainGraph& g, std::size_t limit = 0);
ReportTable top_models_by_backward_size(const SupplyChainGraph& g, std::size_t k = kDefaultTopK);

struct DatasetInclusion {
  ReportTable included;  // in-degree over dataset-dataset edges
  ReportTable derived;   // out-degree over dataset-dataset edges
};
DatasetInclusion dataset_inclusion_table(const SupplyChainGraph& g, std::size_t k = kDefaultTopK);

/// Direct TrainedOn children per dataset, split by model kind.
ReportTable dataset_to_models_table(const SupplyChainGraph& g, std::size_t k = kDefaultTopK);

/// Distinct datasets with a direct TrainedOn edge into each model.
ReportTable model_dataset_counts(const SupplyChainGraph& g, std::size_t k = kDefaultTopK);

ReportTable graph_summary(const SupplyChainGraph& g);

/// Largest communities (ties by id) with up to two example models and
/// datasets each, highest total degree first.
ReportTable communities_table(const SupplyChainGraph& g, const Partition& p, std::size_t k = kDefaultTopK);
/// One row: global modularity and community count.
ReportTable modularity_table(const Partition& p);

/// Figure data: degree histograms for every direction and kind filter.
ReportTable degree_distribution_table(const SupplyChainGraph& g);
/// Size CDF; named wcc_cdf or scc_cdf after the component mode.
ReportTable wcc_cdf_table(const ComponentSet& components);

/// Names accepted by make_report.
const std::vector<std::string>& report_names();
/// Builds a named report; dataset inclusion expands to two tables.
/// Throws InvalidArgument for an unknown name or k == 0.
std::vector<ReportTable> make_report(const SupplyChainGraph& g, const std::string& name,
                                     std::size_t k = kDefaultTopK, const LouvainOptions& louvain_options = {});

/// Writes report_<name>_<date>.csv and .json atomically; returns the CSV path.
std::filesystem::path write_report(const ReportTable& t, const std::filesystem::path& dir, const std::string& date);

}  // namespace supplygraph
