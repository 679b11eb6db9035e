#include "supplygraph/anonymize.hpp"

#include <array>
#include <unordered_map>

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include "supplygraph/csv.hpp"

namespace supplygraph {

std::string keyed_digest(std::string_view salt, std::string_view id, std::size_t chars) {
  if (salt.empty()) throw Error(ErrorCode::SaltMissing, "anonymization needs a non-empty salt");
  if (chars == 0 || chars > 64) throw Error(ErrorCode::InvalidArgument, "digest length must be in 1..64");
  std::array<unsigned char, EVP_MAX_MD_SIZE> mac{};
  unsigned int len = 0;
  if (!HMAC(EVP_sha256(), salt.data(), static_cast<int>(salt.size()),
            reinterpret_cast<const unsigned char*>(id.data()), id.size(), mac.data(), &len))
    throw Error(ErrorCode::InvalidConfig, "HMAC-SHA256 unavailable");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(chars);
  for (unsigned int i = 0; i < len && out.size() < chars; ++i) {
    out.push_back(kHex[mac[i] >> 4]);
    if (out.size() < chars) out.push_back(kHex[mac[i] & 0xF]);
  }
  return out;
}

AnonymizedGraph anonymize(const SupplyChainGraph& g, std::string_view salt, const AnonymizeOptions& options) {
  if (salt.empty()) throw Error(ErrorCode::SaltMissing, "anonymization needs a non-empty salt");
  AnonymizedGraph out;
  out.mapping.reserve(g.node_count());
  std::unordered_map<std::string, NodeIndex> seen;
  seen.reserve(g.node_count());
  std::vector<NodeId> renamed(g.node_count());
  for (NodeIndex i = 0; i < g.node_count(); ++i) {
    std::string d = keyed_digest(salt, g.node(i).id.str(), options.digest_chars);
    auto [it, fresh] = seen.emplace(d, i);
    if (!fresh)
      throw Error(ErrorCode::CollisionDetected, "'" + g.node(it->second).id.str() + "' and '" +
                                                    g.node(i).id.str() + "' share digest " + d);
    renamed[i] = NodeId(d);
    out.mapping.emplace_back(g.node(i).id, renamed[i]);
  }

  GraphBuilder b(StubPolicy::Reject);
  for (NodeIndex i = 0; i < g.node_count(); ++i) {
    Node n = g.node(i);
    n.id = renamed[i];
    b.add_node(n);
  }
  for (NodeIndex i = 0; i < g.node_count(); ++i)
    for (const Adjacent& a : g.out_edges(i)) b.add_edge(Edge{renamed[i], renamed[a.node], a.kind});
  b.set_snapshot_date(g.snapshot_date());
  out.graph = b.freeze();
  return out;
}

std::string mapping_to_csv(const AnonymizedGraph& a) {
  std::string out = "original,anonymized\n";
  for (const auto& [from, to] : a.mapping) out += csv::row({from.str(), to.str()});
  return out;
}

}  // namespace supplygraph
