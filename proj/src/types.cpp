#include "supplygraph/types.hpp"

#include <charconv>
#include <cstdio>

namespace supplygraph {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidNodeId: return "InvalidNodeId";
    case ErrorCode::KindConflict: return "KindConflict";
    case ErrorCode::EndpointKindMismatch: return "EndpointKindMismatch";
    case ErrorCode::DanglingEndpoint: return "DanglingEndpoint";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::UnreadableInput: return "UnreadableInput";
    case ErrorCode::MalformedInput: return "MalformedInput";
    case ErrorCode::EmptySnapshot: return "EmptySnapshot";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnassignedNode: return "UnassignedNode";
    case ErrorCode::OutOfOrderSnapshots: return "OutOfOrderSnapshots";
    case ErrorCode::InconsistentDelta: return "InconsistentDelta";
    case ErrorCode::SaltMissing: return "SaltMissing";
    case ErrorCode::CollisionDetected: return "CollisionDetected";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

namespace {

constexpr bool is_space(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

}  // namespace

std::optional<std::string> normalize_id(std::string_view raw) {
  std::size_t b = 0;
  std::size_t e = raw.size();
  while (b < e && is_space(raw[b])) ++b;
  while (e > b && is_space(raw[e - 1])) --e;
  if (b == e) return std::nullopt;
  std::string_view trimmed = raw.substr(b, e - b);
  if (trimmed.find_first_of("\n\r") != std::string_view::npos) return std::nullopt;
  return std::string(trimmed);
}

NodeId::NodeId(std::string_view raw) {
  auto v = normalize_id(raw);
  if (!v) throw Error(ErrorCode::InvalidNodeId, "'" + std::string(raw) + "'");
  value_ = std::move(*v);
}

std::string_view display_name(std::string_view id) noexcept {
  auto slash = id.rfind('/');
  if (slash == std::string_view::npos || slash + 1 == id.size()) return id;
  return id.substr(slash + 1);
}

std::string_view NodeId::display_name() const noexcept { return supplygraph::display_name(value_); }

std::string_view token(NodeKind k) noexcept {
  switch (k) {
    case NodeKind::BaseModel: return "base";
    case NodeKind::FineTune: return "finetune";
    case NodeKind::Adapter: return "adapter";
    case NodeKind::Quantization: return "quantization";
    case NodeKind::Merge: return "merge";
    case NodeKind::Dataset: return "dataset";
  }
  return "";
}

std::string_view token(EdgeKind k) noexcept {
  switch (k) {
    case EdgeKind::FineTune: return "finetune";
    case EdgeKind::Adapter: return "adapter";
    case EdgeKind::Quantization: return "quantization";
    case EdgeKind::Merge: return "merge";
    case EdgeKind::TrainedOn: return "trained_on";
    case EdgeKind::Subset: return "subset";
    case EdgeKind::ModifiedVersion: return "modified_version";
    case EdgeKind::DerivedDataset: return "derived_dataset";
  }
  return "";
}

std::optional<NodeKind> parse_node_kind(std::string_view tok) noexcept {
  for (NodeKind k : kAllNodeKinds)
    if (token(k) == tok) return k;
  return std::nullopt;
}

std::optional<EdgeKind> parse_edge_kind(std::string_view tok) noexcept {
  for (EdgeKind k : kAllEdgeKinds)
    if (token(k) == tok) return k;
  return std::nullopt;
}

std::optional<Date> Date::parse(std::string_view iso) {
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') return std::nullopt;
  int y = 0;
  unsigned m = 0, d = 0;
  auto num = [&](std::size_t off, std::size_t len, auto& out) {
    auto first = iso.data() + off;
    auto [ptr, ec] = std::from_chars(first, first + len, out);
    return ec == std::errc{} && ptr == first + len;
  };
  if (!num(0, 4, y) || !num(5, 2, m) || !num(8, 2, d)) return std::nullopt;
  std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!ymd.ok()) return std::nullopt;
  return Date(ymd);
}

std::string Date::str() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd_.year()),
                static_cast<unsigned>(ymd_.month()), static_cast<unsigned>(ymd_.day()));
  return buf;
}

Date Date::next_day() const {
  return Date(std::chrono::year_month_day{std::chrono::sys_days{ymd_} + std::chrono::days{1}});
}

long Date::days_since_epoch() const {
  return static_cast<long>(std::chrono::sys_days{ymd_}.time_since_epoch().count());
}

}  // namespace supplygraph
