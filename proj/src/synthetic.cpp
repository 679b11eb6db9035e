#include "supplygraph/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <unordered_set>

namespace supplygraph {

namespace {

std::string model_id(std::size_t i) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "org%03zu/model-%07zu", i % 997, i);
  return buf;
}

std::string dataset_id(std::size_t i) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "lab%03zu/data-%07zu", i % 211, i);
  return buf;
}

// Urn sampling: every index starts with one ticket and gains `boost` per
// pick, which gives the rich-get-richer degree tail.
struct Urn {
  std::vector<std::uint32_t> tickets;
  std::size_t boost = 1;
  void add(std::uint32_t i) { tickets.push_back(i); }
  std::uint32_t draw(std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, tickets.size() - 1);
    std::uint32_t v = tickets[pick(rng)];
    tickets.insert(tickets.end(), boost, v);
    return v;
  }
};

std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) { return (std::uint64_t{a} << 32) | b; }

}  // namespace

Snapshot synthetic_snapshot(const SyntheticOptions& o) {
  if (o.nodes < 4) throw Error(ErrorCode::InvalidArgument, "synthetic graph needs at least 4 nodes");
  if (!(o.dataset_share > 0.0 && o.dataset_share < 1.0) || !(o.base_share >= 0.0 && o.base_share <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "shares must lie in (0, 1)");
  std::mt19937_64 rng(o.seed);
  const std::size_t datasets = std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(o.dataset_share * double(o.nodes))));
  const std::size_t models = o.nodes - datasets;
  if (models < 2) throw Error(ErrorCode::InvalidArgument, "too few models");

  Snapshot s;
  s.date = o.date;
  std::vector<SnapshotRecord> m(models), d(datasets);
  const long day0 = Date(2023, 1, 1).days_since_epoch();
  const long span = std::max(1L, o.date.days_since_epoch() - day0);
  auto seen_on = [&](std::size_t i, std::size_t n) {
    long add = static_cast<long>(double(span) * double(i) / double(n));
    std::chrono::sys_days sd{std::chrono::days{day0 + add}};
    return Date(std::chrono::year_month_day{sd});
  };

  // Model-model edges: one parent per derived model, two for merges.
  std::bernoulli_distribution is_base(o.base_share);
  std::discrete_distribution<int> relation({38, 26, 32, 4});
  constexpr EdgeKind kRel[] = {EdgeKind::FineTune, EdgeKind::Adapter, EdgeKind::Quantization, EdgeKind::Merge};
  Urn model_urn;
  std::size_t edges = 0;
  for (std::size_t i = 0; i < models; ++i) {
    SnapshotRecord& r = m[i];
    r.id = NodeId(model_id(i));
    r.type = RecordType::Model;
    r.first_seen = seen_on(i, models);
    if (i >= 2 && !is_base(rng)) {
      const EdgeKind k = kRel[relation(rng)];
      r.relation = k;
      const std::uint32_t p = model_urn.draw(rng);
      r.base_model.push_back(NodeId(model_id(p)));
      if (k == EdgeKind::Merge) {
        std::uint32_t q = p;
        for (int tries = 0; q == p && tries < 64; ++tries) q = model_urn.draw(rng);
        if (q != p) r.base_model.push_back(NodeId(model_id(q)));
      }
      edges += r.base_model.size();
    }
    model_urn.add(static_cast<std::uint32_t>(i));
  }
  if (edges > o.edges)
    throw Error(ErrorCode::InvalidArgument, "edge budget below the " + std::to_string(edges) + " lineage edges");

  for (std::size_t i = 0; i < datasets; ++i) {
    d[i].id = NodeId(dataset_id(i));
    d[i].type = RecordType::Dataset;
    d[i].first_seen = seen_on(i, datasets);
  }

  // Split the rest between training links and dataset-dataset links.
  const std::size_t rest = o.edges - edges;
  const std::size_t trained = rest * 3 / 5;
  const std::size_t data_links = rest - trained;
  const std::size_t max_tries = 50 * o.edges + 1000;

  // datasets have far fewer draws than there are datasets, so they need a
  // stronger boost to grow hubs
  Urn data_urn;
  data_urn.boost = 6;
  for (std::size_t i = 0; i < datasets; ++i) data_urn.add(static_cast<std::uint32_t>(i));
  std::uniform_int_distribution<std::size_t> any_model(0, models - 1), any_dataset(0, datasets - 1);
  std::unordered_set<std::uint64_t> used;
  used.reserve(rest * 2);
  std::size_t tries = 0;
  for (std::size_t made = 0; made < trained; ++tries) {
    if (tries > max_tries) throw Error(ErrorCode::InvalidArgument, "cannot place training links");
    const std::uint32_t ds = data_urn.draw(rng);
    const auto mi = static_cast<std::uint32_t>(any_model(rng));
    if (!used.insert(pair_key(ds, mi)).second) continue;
    m[mi].datasets.push_back(d[ds].id);
    ++made;
  }

  used.clear();
  std::bernoulli_distribution back_link(0.02), derived_kind(0.5);
  tries = 0;
  for (std::size_t made = 0; made < data_links; ++tries) {
    if (tries > max_tries) throw Error(ErrorCode::InvalidArgument, "cannot place dataset links");
    const std::uint32_t hub = data_urn.draw(rng);
    const auto other = static_cast<std::uint32_t>(any_dataset(rng));
    if (hub == other) continue;
    // one edge per unordered pair keeps every link distinct after building
    const std::uint64_t key = hub < other ? pair_key(hub, other) : pair_key(other, hub);
    if (!used.insert(key).second) continue;
    // Links mostly run from older to newer datasets; a few point backwards
    // so that some dataset cycles exist.
    const bool forward_in_time = back_link(rng) ? hub > other : hub < other;
    if (!forward_in_time) {
      d[other].subset_of.push_back(d[hub].id);  // other -> hub
    } else if (derived_kind(rng)) {
      d[other].derived_from.push_back(d[hub].id);  // hub -> other
    } else {
      d[other].modified_from.push_back(d[hub].id);
    }
    ++made;
  }

  for (auto& r : m) s.records.emplace(r.id.str(), std::move(r));
  for (auto& r : d) s.records.emplace(r.id.str(), std::move(r));
  return s;
}

}  // namespace supplygraph
