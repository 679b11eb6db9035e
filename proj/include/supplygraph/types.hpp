#pragma once

#include <array>
#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "supplygraph/error.hpp"

namespace supplygraph {

/// Artifact identifier. Canonical form is "namespace/name" or a bare name;
/// surrounding whitespace is trimmed and comparison is case-sensitive.
class NodeId {
 public:
  NodeId() = default;
  explicit NodeId(std::string_view raw);

  const std::string& str() const noexcept { return value_; }
  bool empty() const noexcept { return value_.empty(); }

  /// Substring after the last '/', used when reports show short names.
  std::string_view display_name() const noexcept;

  friend auto operator<=>(const NodeId&, const NodeId&) = default;
  friend bool operator==(const NodeId&, const NodeId&) = default;

 private:
  std::string value_;
};

std::string_view display_name(std::string_view id) noexcept;

/// Returns the trimmed id, or nullopt when it would violate NodeId invariants.
std::optional<std::string> normalize_id(std::string_view raw);

enum class NodeKind : std::uint8_t { BaseModel, FineTune, Adapter, Quantization, Merge, Dataset };
inline constexpr std::size_t kNodeKindCount = 6;
inline constexpr std::array<NodeKind, kNodeKindCount> kAllNodeKinds = {
    NodeKind::BaseModel, NodeKind::FineTune, NodeKind::Adapter,
    NodeKind::Quantization, NodeKind::Merge, NodeKind::Dataset};

enum class EdgeKind : std::uint8_t {
  FineTune,
  Adapter,
  Quantization,
  Merge,
  TrainedOn,
  Subset,
  ModifiedVersion,
  DerivedDataset,
};
inline constexpr std::size_t kEdgeKindCount = 8;
inline constexpr std::array<EdgeKind, kEdgeKindCount> kAllEdgeKinds = {
    EdgeKind::FineTune, EdgeKind::Adapter, EdgeKind::Quantization, EdgeKind::Merge,
    EdgeKind::TrainedOn, EdgeKind::Subset, EdgeKind::ModifiedVersion, EdgeKind::DerivedDataset};

enum class Direction : std::uint8_t { Forward, Backward };
enum class DegreeDirection : std::uint8_t { In, Out };

constexpr bool is_model(NodeKind k) noexcept { return k != NodeKind::Dataset; }

constexpr bool is_model_model(EdgeKind k) noexcept {
  return k == EdgeKind::FineTune || k == EdgeKind::Adapter || k == EdgeKind::Quantization ||
         k == EdgeKind::Merge;
}

constexpr bool is_dataset_dataset(EdgeKind k) noexcept {
  return k == EdgeKind::Subset || k == EdgeKind::ModifiedVersion || k == EdgeKind::DerivedDataset;
}

/// Whether the endpoint of `kind` on the given side must be a dataset.
constexpr bool requires_dataset(EdgeKind kind, bool source_side) noexcept {
  if (is_dataset_dataset(kind)) return true;
  if (kind == EdgeKind::TrainedOn) return source_side;
  return false;
}

/// The node kind a model produced by a model-model edge of this kind receives.
constexpr NodeKind produced_kind(EdgeKind k) noexcept {
  switch (k) {
    case EdgeKind::Adapter: return NodeKind::Adapter;
    case EdgeKind::Quantization: return NodeKind::Quantization;
    case EdgeKind::Merge: return NodeKind::Merge;
    default: return NodeKind::FineTune;
  }
}

constexpr std::size_t index_of(NodeKind k) noexcept { return static_cast<std::size_t>(k); }
constexpr std::size_t index_of(EdgeKind k) noexcept { return static_cast<std::size_t>(k); }

// Persistence tokens: base, finetune, adapter, quantization, merge, dataset.
std::string_view token(NodeKind k) noexcept;
// finetune, adapter, quantization, merge, trained_on, subset, modified_version, derived_dataset.
std::string_view token(EdgeKind k) noexcept;
std::optional<NodeKind> parse_node_kind(std::string_view tok) noexcept;
std::optional<EdgeKind> parse_edge_kind(std::string_view tok) noexcept;

/// Calendar date, serialized as ISO-8601 YYYY-MM-DD.
class Date {
 public:
  Date() = default;
  explicit Date(std::chrono::year_month_day ymd) : ymd_(ymd) {}
  Date(int y, unsigned m, unsigned d)
      : ymd_(std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}) {}

  static std::optional<Date> parse(std::string_view iso);
  std::string str() const;

  Date next_day() const;
  long days_since_epoch() const;

  friend bool operator==(const Date& a, const Date& b) { return a.ymd_ == b.ymd_; }
  friend auto operator<=>(const Date& a, const Date& b) { return a.days_since_epoch() <=> b.days_since_epoch(); }

 private:
  std::chrono::year_month_day ymd_{std::chrono::year{1970}, std::chrono::month{1}, std::chrono::day{1}};
};

}  // namespace supplygraph
