#include "supplygraph/ingest.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <memory>
#include <mutex>
#include <regex>
#include <set>
#include <sstream>
#include <thread>
#include <variant>

#include <nlohmann/json.hpp>

namespace supplygraph {

namespace {

using nlohmann::json;

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

[[noreturn]] void malformed(const std::string& why) { throw Error(ErrorCode::MalformedInput, why); }

std::vector<NodeId> id_list(const json& obj, const char* key) {
  std::vector<NodeId> out;
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return out;
  if (!it->is_array()) malformed(std::string(key) + " is not an array");
  for (const json& v : *it) {
    if (!v.is_string()) malformed(std::string(key) + " holds a non-string entry");
    auto id = normalize_id(v.get<std::string>());
    if (!id) malformed(std::string(key) + " holds an invalid id");
    out.emplace_back(*id);
  }
  return out;
}

std::vector<std::string> string_list(const json& obj, const char* key) {
  std::vector<std::string> out;
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return out;
  if (!it->is_array()) malformed(std::string(key) + " is not an array");
  for (const json& v : *it) {
    if (!v.is_string()) malformed(std::string(key) + " holds a non-string entry");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::optional<std::string> opt_string(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) malformed(std::string(key) + " is not a string");
  return it->get<std::string>();
}

}  // namespace

// ---------------------------------------------------------------------------
// records

bool SnapshotRecord::metadata_present() const {
  return !base_model.empty() || relation.has_value() || !datasets.empty() || !trained_models.empty() ||
         !subset_of.empty() || !modified_from.empty() || !derived_from.empty() ||
         !trim(description).empty() || !xref_urls.empty();
}

SnapshotRecord parse_record(std::string_view line) {
  json obj = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (obj.is_discarded()) malformed("invalid JSON");
  if (!obj.is_object()) malformed("not a JSON object");

  SnapshotRecord r;
  auto id = opt_string(obj, "id");
  if (!id) malformed("missing id");
  auto norm = normalize_id(*id);
  if (!norm) malformed("invalid id");
  r.id = NodeId(*norm);

  auto type = opt_string(obj, "type");
  if (!type) malformed("missing type");
  if (*type == "model") r.type = RecordType::Model;
  else if (*type == "dataset") r.type = RecordType::Dataset;
  else malformed("unknown type '" + *type + "'");

  r.base_model = id_list(obj, "base_model");
  if (auto rel = opt_string(obj, "relation")) {
    auto k = parse_edge_kind(*rel);
    if (!k || !is_model_model(*k)) malformed("unknown relation '" + *rel + "'");
    r.relation = *k;
  }
  r.datasets = id_list(obj, "datasets");
  r.trained_models = id_list(obj, "trained_models");
  r.subset_of = id_list(obj, "subset_of");
  r.modified_from = id_list(obj, "modified_from");
  r.derived_from = id_list(obj, "derived_from");
  r.description = opt_string(obj, "description").value_or("");
  r.xref_urls = string_list(obj, "xref_urls");
  if (auto fs = opt_string(obj, "first_seen")) {
    auto d = Date::parse(*fs);
    if (!d) malformed("bad first_seen '" + *fs + "'");
    r.first_seen = *d;
  }
  if (r.type == RecordType::Model &&
      (!r.trained_models.empty() || !r.subset_of.empty() || !r.modified_from.empty()))
    malformed("dataset-only field on a model record");
  return r;
}

std::string record_to_json(const SnapshotRecord& r) {
  nlohmann::ordered_json o;
  o["id"] = r.id.str();
  o["type"] = r.type == RecordType::Model ? "model" : "dataset";
  auto put = [&](const char* key, const std::vector<NodeId>& ids) {
    if (ids.empty()) return;
    auto& arr = o[key] = nlohmann::ordered_json::array();
    for (const auto& id : ids) arr.push_back(id.str());
  };
  put("base_model", r.base_model);
  if (r.relation) o["relation"] = std::string(token(*r.relation));
  put("datasets", r.datasets);
  put("trained_models", r.trained_models);
  put("subset_of", r.subset_of);
  put("modified_from", r.modified_from);
  put("derived_from", r.derived_from);
  if (!r.description.empty()) o["description"] = r.description;
  if (!r.xref_urls.empty()) o["xref_urls"] = r.xref_urls;
  if (r.first_seen) o["first_seen"] = r.first_seen->str();
  return o.dump();
}

Snapshot load_snapshot(std::istream& in, Date date) {
  if (!in) throw Error(ErrorCode::UnreadableInput, "snapshot stream is not readable");
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(std::move(line));
  if (in.bad()) throw Error(ErrorCode::UnreadableInput, "read error");

  using Parsed = std::variant<std::monostate, SnapshotRecord, std::string>;
  std::vector<Parsed> parsed(lines.size());
  const auto count = static_cast<std::int64_t>(lines.size());
#pragma omp parallel for schedule(dynamic, 256)
  for (std::int64_t i = 0; i < count; ++i) {
    if (trim(lines[i]).empty()) continue;
    try {
      parsed[i] = parse_record(lines[i]);
    } catch (const Error& e) {
      parsed[i] = std::string(e.what());
    }
  }

  Snapshot s;
  s.date = date;
  std::map<std::string, std::size_t> seen_on;
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    if (auto* why = std::get_if<std::string>(&parsed[i])) {
      s.rejects.push_back({i + 1, *why});
    } else if (auto* rec = std::get_if<SnapshotRecord>(&parsed[i])) {
      const std::string key = rec->id.str();
      auto [it, fresh] = seen_on.try_emplace(key, i + 1);
      if (!fresh) {
        s.warnings.push_back("line " + std::to_string(i + 1) + ": duplicate id " + key + " replaces line " +
                             std::to_string(it->second));
        it->second = i + 1;
      }
      s.records.insert_or_assign(key, std::move(*rec));
    }
  }
  if (s.records.empty())
    throw Error(ErrorCode::EmptySnapshot, "no valid records (" + std::to_string(s.rejects.size()) + " rejected)");
  return s;
}

std::optional<Date> date_from_filename(const std::filesystem::path& path) {
  static const std::regex pattern(R"((\d{4}-\d{2}-\d{2}))");
  const std::string name = path.filename().string();
  std::smatch m;
  if (!std::regex_search(name, m, pattern)) return std::nullopt;
  return Date::parse(m[1].str());
}

Snapshot load_snapshot(const std::filesystem::path& path, std::optional<Date> date) {
  if (!date) date = date_from_filename(path);
  if (!date)
    throw Error(ErrorCode::InvalidArgument,
                "snapshot date unknown for " + path.string() + "; pass a date or put YYYY-MM-DD in the file name");
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::UnreadableInput, "cannot open " + path.string());
  return load_snapshot(in, *date);
}

std::string rejects_to_jsonl(const std::vector<RejectedLine>& rejects) {
  std::string out;
  for (const auto& r : rejects) {
    nlohmann::ordered_json o;
    o["line_number"] = r.line_number;
    o["reason"] = r.reason;
    out += o.dump() + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// extraction

std::string_view token(EvidenceSource s) noexcept {
  switch (s) {
    case EvidenceSource::StructuredField: return "structured";
    case EvidenceSource::CrossReferenceUrl: return "xref_url";
    case EvidenceSource::TextPattern: return "text";
  }
  return "?";
}

Edge ExtractedDependency::edge() const {
  if (!child) throw Error(ErrorCode::InvalidArgument, "dependency on " + parent.str() + " has no child");
  if (kind == EdgeKind::Subset) return Edge{*child, parent, kind};
  return Edge{parent, *child, kind};
}

namespace {

std::string percent_decode(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '+') {
      out += ' ';
    } else if (s[i] == '%' && i + 2 < s.size() && std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
               std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
      out += static_cast<char>(std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16));
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

}  // namespace

std::optional<ExtractedDependency> extract_cross_reference(std::string_view url) {
  auto q = url.find('?');
  if (q == std::string_view::npos) return std::nullopt;
  std::string_view query = url.substr(q + 1);
  if (auto h = query.find('#'); h != std::string_view::npos) query = query.substr(0, h);

  constexpr std::string_view kPrefix = "base_model:";
  while (!query.empty()) {
    auto amp = query.find('&');
    std::string_view param = query.substr(0, amp);
    query = amp == std::string_view::npos ? std::string_view{} : query.substr(amp + 1);

    auto eq = param.find('=');
    if (eq == std::string_view::npos || param.substr(0, eq) != "other") continue;
    const std::string value = percent_decode(param.substr(eq + 1));
    if (value.rfind(kPrefix, 0) != 0) continue;
    std::string_view rest = std::string_view(value).substr(kPrefix.size());
    auto colon = rest.find(':');
    if (colon == std::string_view::npos) continue;
    auto kind = parse_edge_kind(rest.substr(0, colon));
    if (!kind || !is_model_model(*kind)) continue;
    std::string_view target = rest.substr(colon + 1);
    auto slash = target.find('/');
    if (slash == std::string_view::npos || slash == 0 || slash + 1 == target.size()) continue;
    if (std::any_of(target.begin(), target.end(), is_space)) continue;
    auto id = normalize_id(target);
    if (!id) continue;
    return ExtractedDependency{NodeId(*id), std::nullopt, *kind, EvidenceSource::CrossReferenceUrl};
  }
  return std::nullopt;
}

namespace {

struct PhraseRule {
  std::string_view phrase;
  EdgeKind kind;
};

constexpr PhraseRule kRules[] = {
    {"fine-tuned from", EdgeKind::FineTune},
    {"finetuned from", EdgeKind::FineTune},
    {"trained on", EdgeKind::TrainedOn},
    {"adapted from", EdgeKind::Adapter},
    {"adapter for", EdgeKind::Adapter},
    {"quantized version of", EdgeKind::Quantization},
    {"quantization of", EdgeKind::Quantization},
    {"merge of", EdgeKind::Merge},
    {"merged from", EdgeKind::Merge},
    {"subset of", EdgeKind::Subset},
};

constexpr std::size_t kMaxMentionTokens = 8;

struct Match {
  std::size_t pos;
  std::size_t len;
  EdgeKind kind;
};

bool is_terminator(std::string_view text, std::size_t i, bool allow_comma) {
  switch (text[i]) {
    case ',': return !allow_comma;
    case ';': case ':': case '!': case '?': case '(': case ')': case '[': case ']':
    case '{': case '}': case '"': case '\n': case '\r':
      return true;
    case '.': return i + 1 == text.size() || is_space(text[i + 1]);
    default: return false;
  }
}

std::string_view clean_mention(std::string_view s) {
  s = trim(s);
  // dangling connectives left over from list splitting or a cut-short capture
  for (bool again = true; again;) {
    again = false;
    for (std::string_view word : {"and", "&"}) {
      const std::string low = lower(s);
      if (s.size() > word.size() && low.compare(s.size() - word.size(), word.size(), word) == 0 &&
          is_space(s[s.size() - word.size() - 1])) {
        s = trim(s.substr(0, s.size() - word.size()));
        again = true;
      } else if (s.size() > word.size() && low.compare(0, word.size(), word) == 0 && is_space(s[word.size()])) {
        s = trim(s.substr(word.size()));
        again = true;
      } else if (low == word) {
        s = {};
      }
    }
  }
  auto junk = [](char c) { return c == '`' || c == '*' || c == '\''; };
  while (!s.empty() && junk(s.front())) s.remove_prefix(1);
  while (!s.empty() && junk(s.back())) s.remove_suffix(1);
  s = trim(s);
  // keep at most kMaxMentionTokens whitespace-separated tokens
  std::size_t tokens = 0;
  for (std::size_t i = 0; i < s.size();) {
    while (i < s.size() && is_space(s[i])) ++i;
    if (i == s.size()) break;
    if (++tokens > kMaxMentionTokens) return trim(s.substr(0, i));
    while (i < s.size() && !is_space(s[i])) ++i;
  }
  return s;
}

/// Splits "a, b and c" / "a & b" into parts.
std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> parts;
  const std::string low = lower(s);
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size();) {
    std::size_t sep_len = 0;
    if (i == s.size()) {
      sep_len = 1;
    } else if (s[i] == ',') {
      sep_len = 1;
    } else if (is_space(s[i])) {
      for (std::string_view word : {"and", "&"}) {
        std::size_t j = i + 1;
        if (low.compare(j, word.size(), word) == 0 && j + word.size() < s.size() && is_space(s[j + word.size()])) {
          sep_len = 1 + word.size() + 1;
          break;
        }
      }
    }
    if (sep_len == 0) {
      ++i;
      continue;
    }
    parts.push_back(s.substr(start, i - start));
    i += sep_len;
    start = i;
  }
  return parts;
}

}  // namespace

std::vector<ExtractedDependency> extract_textual_dependencies(std::string_view text) {
  std::vector<ExtractedDependency> out;
  if (text.empty()) return out;
  const std::string low = lower(text);

  std::vector<Match> matches;
  for (const PhraseRule& rule : kRules) {
    for (std::size_t pos = low.find(rule.phrase); pos != std::string::npos; pos = low.find(rule.phrase, pos + 1)) {
      const std::size_t after = pos + rule.phrase.size();
      const bool left_ok = pos == 0 || !is_alnum(low[pos - 1]);
      const bool right_ok = after < low.size() && is_space(low[after]);
      if (left_ok && right_ok) matches.push_back({pos, rule.phrase.size(), rule.kind});
    }
  }
  std::sort(matches.begin(), matches.end(), [](const Match& a, const Match& b) { return a.pos < b.pos; });

  std::set<std::pair<std::string, EdgeKind>> seen;
  for (std::size_t m = 0; m < matches.size(); ++m) {
    const Match& mt = matches[m];
    const std::size_t start = mt.pos + mt.len;
    const std::size_t limit = m + 1 < matches.size() ? matches[m + 1].pos : text.size();
    if (start >= limit) continue;
    const bool list = mt.kind == EdgeKind::Merge;
    std::size_t end = start;
    while (end < limit && !is_terminator(text, end, list)) ++end;

    std::vector<std::string_view> parts;
    std::string_view captured = text.substr(start, end - start);
    if (list) parts = split_list(captured);
    else parts.push_back(captured);
    for (std::string_view part : parts) {
      auto id = normalize_id(clean_mention(part));
      if (!id || id->empty()) continue;
      if (!seen.emplace(*id, mt.kind).second) continue;
      out.push_back(ExtractedDependency{NodeId(*id), std::nullopt, mt.kind, EvidenceSource::TextPattern});
    }
  }
  return out;
}

std::string render_dependencies(const std::vector<ExtractedDependency>& deps) {
  std::string out;
  for (const auto& d : deps) {
    std::string_view phrase;
    switch (d.kind) {
      case EdgeKind::FineTune: phrase = "fine-tuned from"; break;
      case EdgeKind::Adapter: phrase = "adapted from"; break;
      case EdgeKind::Quantization: phrase = "quantized version of"; break;
      case EdgeKind::Merge: phrase = "merged from"; break;
      case EdgeKind::TrainedOn: phrase = "trained on"; break;
      case EdgeKind::Subset: phrase = "subset of"; break;
      default: continue;  // no phrase rule produces these kinds
    }
    out += std::string(phrase) + " " + d.parent.str() + ".\n";
  }
  return out;
}

NodeKind classify_node(const SnapshotRecord& record, const std::vector<EdgeKind>& incoming_relations) {
  if (record.type == RecordType::Dataset) return NodeKind::Dataset;
  if (record.relation) return produced_kind(*record.relation);
  for (EdgeKind k : {EdgeKind::FineTune, EdgeKind::Adapter, EdgeKind::Quantization, EdgeKind::Merge})
    if (std::find(incoming_relations.begin(), incoming_relations.end(), k) != incoming_relations.end())
      return produced_kind(k);
  return NodeKind::BaseModel;
}

// ---------------------------------------------------------------------------
// name resolution

NameResolver::NameResolver(const std::vector<std::string>& ids) : exact_(ids) {
  std::sort(exact_.begin(), exact_.end());
  exact_.erase(std::unique(exact_.begin(), exact_.end()), exact_.end());
  for (const auto& id : exact_) {
    by_lower_id_[lower(id)].push_back(id);
    by_lower_name_[lower(display_name(id))].push_back(id);
  }
}

NameResolver::Result NameResolver::lookup(std::string_view candidate) const {
  if (std::binary_search(exact_.begin(), exact_.end(), candidate, std::less<>{}))
    return {Outcome::Resolved, std::string(candidate)};
  const std::string key = lower(candidate);
  for (const auto* table : {&by_lower_id_, &by_lower_name_}) {
    auto it = table->find(key);
    if (it == table->end()) continue;
    if (it->second.size() == 1) return {Outcome::Resolved, it->second.front()};
    return {Outcome::Ambiguous, {}};
  }
  return {Outcome::Unknown, {}};
}

NameResolver::Result NameResolver::resolve(std::string_view mention) const {
  mention = trim(mention);
  std::vector<std::size_t> token_ends;
  for (std::size_t i = 0; i < mention.size();) {
    while (i < mention.size() && is_space(mention[i])) ++i;
    while (i < mention.size() && !is_space(mention[i])) ++i;
    token_ends.push_back(i);
  }
  for (auto it = token_ends.rbegin(); it != token_ends.rend(); ++it) {
    Result r = lookup(mention.substr(0, *it));
    if (r.outcome != Outcome::Unknown) return r;
  }
  return {};
}

// ---------------------------------------------------------------------------
// graph construction

std::vector<ExtractedDependency> BuildResult::provenance(const Edge& e) const {
  std::vector<ExtractedDependency> out;
  for (const auto& d : audit)
    if (d.edge() == e) out.push_back(d);
  return out;
}

namespace {

struct RecordEvidence {
  std::vector<ExtractedDependency> deps;  // structured, then URL, then text
  std::vector<std::string> warnings;
};

void structured_and_url(const SnapshotRecord& r, RecordEvidence& ev) {
  const NodeId& self = r.id;
  auto add = [&](const NodeId& parent, const NodeId& child, EdgeKind k) {
    ev.deps.push_back(ExtractedDependency{parent, child, k, EvidenceSource::StructuredField});
  };
  for (const auto& p : r.base_model) add(p, self, r.relation.value_or(EdgeKind::FineTune));
  for (const auto& d : r.datasets) add(d, self, EdgeKind::TrainedOn);
  for (const auto& m : r.trained_models) add(self, m, EdgeKind::TrainedOn);
  for (const auto& x : r.subset_of) add(x, self, EdgeKind::Subset);
  for (const auto& x : r.modified_from) add(x, self, EdgeKind::ModifiedVersion);
  for (const auto& x : r.derived_from) add(x, self, EdgeKind::DerivedDataset);

  for (const auto& url : r.xref_urls) {
    auto dep = extract_cross_reference(url);
    if (!dep) continue;
    dep->child = self;
    // Different parents for the same relation: keep both, but say so.
    const bool structured_same_kind =
        !r.base_model.empty() && r.relation.value_or(EdgeKind::FineTune) == dep->kind;
    const bool structured_has_parent =
        std::find(r.base_model.begin(), r.base_model.end(), dep->parent) != r.base_model.end();
    if (structured_same_kind && !structured_has_parent)
      ev.warnings.push_back(self.str() + ": base_model field and cross-reference link name different " +
                            std::string(token(dep->kind)) + " parents (" + dep->parent.str() + ")");
    ev.deps.push_back(*dep);
  }
}

void textual(const SnapshotRecord& r, const NameResolver& resolver, RecordEvidence& ev) {
  for (auto& dep : extract_textual_dependencies(r.description)) {
    auto res = resolver.resolve(dep.parent.str());
    if (res.outcome == NameResolver::Outcome::Ambiguous) {
      ev.warnings.push_back(r.id.str() + ": ambiguous text mention '" + dep.parent.str() + "' dropped");
      continue;
    }
    if (res.outcome == NameResolver::Outcome::Unknown) {
      ev.warnings.push_back(r.id.str() + ": unresolved text mention '" + dep.parent.str() + "' dropped");
      continue;
    }
    dep.parent = NodeId(res.id);
    dep.child = r.id;
    ev.deps.push_back(std::move(dep));
  }
}

NodeKind provisional_kind(const SnapshotRecord& r) {
  if (r.type == RecordType::Dataset) return NodeKind::Dataset;
  return r.relation ? produced_kind(*r.relation) : NodeKind::BaseModel;
}

}  // namespace

BuildResult build_graph_with_audit(const Snapshot& snapshot, const BuildOptions& options) {
  std::vector<const SnapshotRecord*> records;
  records.reserve(snapshot.records.size());
  for (const auto& [key, rec] : snapshot.records) records.push_back(&rec);
  const auto n = static_cast<std::int64_t>(records.size());

  // Pass 1: evidence per record.
  std::vector<RecordEvidence> evidence(records.size());
#pragma omp parallel for schedule(dynamic, 256)
  for (std::int64_t i = 0; i < n; ++i) structured_and_url(*records[i], evidence[i]);

  std::vector<std::string> known;
  known.reserve(records.size() * 2);
  for (std::int64_t i = 0; i < n; ++i) {
    known.push_back(records[i]->id.str());
    for (const auto& d : evidence[i].deps) {
      known.push_back(d.parent.str());
      known.push_back(d.child->str());
    }
  }
  const NameResolver resolver(known);

#pragma omp parallel for schedule(dynamic, 256)
  for (std::int64_t i = 0; i < n; ++i) textual(*records[i], resolver, evidence[i]);

  // Strongest source per (src, dst) pair.
  std::map<std::pair<std::string, std::string>, EvidenceSource> best;
  for (auto& ev : evidence) {
    std::erase_if(ev.deps, [&](const ExtractedDependency& d) {
      if (d.parent != *d.child) return false;
      ev.warnings.push_back(d.parent.str() + ": self-referencing " + std::string(token(d.kind)) + " dropped");
      return true;
    });
    for (const auto& d : ev.deps) {
      Edge e = d.edge();
      auto [it, fresh] = best.try_emplace({e.src.str(), e.dst.str()}, d.source);
      if (!fresh && d.source < it->second) it->second = d.source;
    }
  }

  // Pass 2: materialize.
  BuildResult result;
  GraphBuilder builder(options.stub_policy);
  builder.set_snapshot_date(snapshot.date);
  for (const SnapshotRecord* r : records)
    builder.add_node(Node{r->id, provisional_kind(*r), r->first_seen, r->metadata_present()});

  std::map<std::string, std::vector<EdgeKind>> incoming;
  std::set<std::tuple<std::string, std::string, EdgeKind, EvidenceSource>> logged;
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (auto& w : evidence[i].warnings) result.warnings.push_back(std::move(w));
    for (const auto& d : evidence[i].deps) {
      const Edge e = d.edge();
      if (best.at({e.src.str(), e.dst.str()}) != d.source) continue;
      try {
        builder.add_edge(e);
      } catch (const Error& err) {
        result.warnings.push_back(records[i]->id.str() + ": " + err.what());
        continue;
      }
      if (is_model_model(e.kind)) incoming[e.dst.str()].push_back(e.kind);
      if (logged.emplace(d.parent.str(), d.child->str(), d.kind, d.source).second) result.audit.push_back(d);
    }
  }

  for (const SnapshotRecord* r : records) {
    if (r->type != RecordType::Model) continue;
    auto it = incoming.find(r->id.str());
    const NodeKind k = classify_node(*r, it == incoming.end() ? std::vector<EdgeKind>{} : it->second);
    builder.update_node(Node{r->id, k, r->first_seen, r->metadata_present()});
  }

  result.graph = builder.freeze();
  return result;
}

SupplyChainGraph build_graph(const Snapshot& snapshot, const BuildOptions& options) {
  return build_graph_with_audit(snapshot, options).graph;
}

// ---------------------------------------------------------------------------
// platform access

PlatformClient disk_platform(const std::filesystem::path& snapshot_file) {
  std::ifstream in(snapshot_file);
  if (!in) throw Error(ErrorCode::UnreadableInput, "cannot open " + snapshot_file.string());
  auto cards = std::make_shared<std::map<std::string, std::string>>();
  auto models = std::make_shared<std::vector<std::string>>();
  auto datasets = std::make_shared<std::vector<std::string>>();
  for (std::string line; std::getline(in, line);) {
    try {
      SnapshotRecord r = parse_record(line);
      const bool fresh = cards->insert_or_assign(r.id.str(), line).second;
      if (fresh) (r.type == RecordType::Model ? models : datasets)->push_back(r.id.str());
    } catch (const Error&) {
      // the disk platform simply does not list unreadable cards
    }
  }
  PlatformClient c;
  c.list_models = [models] { return *models; };
  c.list_datasets = [datasets] { return *datasets; };
  c.get_card = [cards](const std::string& id) {
    auto it = cards->find(id);
    if (it == cards->end()) throw Error(ErrorCode::UnknownNode, id);
    return it->second;
  };
  return c;
}

Snapshot collect_snapshot(const PlatformClient& client, Date date, std::size_t parallelism) {
  if (parallelism == 0) throw Error(ErrorCode::InvalidConfig, "parallelism must be at least 1");
  std::vector<std::string> ids = client.list_models();
  for (auto& d : client.list_datasets()) ids.push_back(std::move(d));

  std::vector<std::variant<std::monostate, SnapshotRecord, std::string>> fetched(ids.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < ids.size();) {
      try {
        SnapshotRecord r = parse_record(client.get_card(ids[i]));
        if (r.id.str() != ids[i]) throw Error(ErrorCode::MalformedInput, "card id " + r.id.str() + " != " + ids[i]);
        fetched[i] = std::move(r);
      } catch (const std::exception& e) {
        fetched[i] = ids[i] + ": " + e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t workers = std::min(parallelism, std::max<std::size_t>(ids.size(), 1));
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  Snapshot s;
  s.date = date;
  for (std::size_t i = 0; i < fetched.size(); ++i) {
    if (auto* why = std::get_if<std::string>(&fetched[i])) s.rejects.push_back({i + 1, *why});
    else if (auto* rec = std::get_if<SnapshotRecord>(&fetched[i])) s.records.insert_or_assign(rec->id.str(), *rec);
  }
  if (s.records.empty()) throw Error(ErrorCode::EmptySnapshot, "platform listed no readable cards");
  return s;
}

}  // namespace supplygraph
