#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "gsnn/common.hpp"
#include "gsnn/network.hpp"

namespace gsnn {

struct Triple {
  std::string head;
  std::string relation;
  std::string tail;

  bool operator==(const Triple&) const = default;
  bool operator<(const Triple& o) const {
    return std::tie(head, relation, tail) < std::tie(o.head, o.relation, o.tail);
  }
};

/// Ground-truth transitivity flag per relation; used only as the reward
/// supervision label during training.
struct RelationMeta {
  std::string label;
  bool is_transitive = false;
};

using RelationMetaMap = std::map<std::string, RelationMeta>;

struct DatasetSplit {
  std::vector<Triple> train;
  std::vector<Triple> masked;
  double mask_fraction = 0.0;
};

/// Parse TSV triples `head<TAB>relation<TAB>tail`; UTF-8, `#` comments.
/// Duplicates are preserved unless `deduplicate` is set.
std::vector<Triple> parse_triples(std::istream& in, const std::string& origin,
                                  bool deduplicate = false);
std::vector<Triple> load_triples(const std::string& path, bool deduplicate = false);

/// Parse TSV relation metadata `relation<TAB>transitive(0|1)`.
RelationMetaMap parse_relation_meta(std::istream& in, const std::string& origin);
RelationMetaMap load_relation_meta(const std::string& path);

/// Seeded uniform split stratified by relation: each relation contributes
/// round(fraction * count) triples to the masked set.
DatasetSplit mask_split(const std::vector<Triple>& triples, double fraction,
                        std::uint64_t seed);

/// Allocate an engram for every distinct entity and relation label (in
/// first-appearance order, entities and relations tagged); labels already
/// bound are left untouched. Also validates that no label is used both as
/// a relation and as an entity.
void bind_symbols(const std::vector<Triple>& triples, Network& net);

}  // namespace gsnn
