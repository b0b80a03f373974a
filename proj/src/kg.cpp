#include "gsnn/kg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace gsnn {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cols;
  std::string::size_type start = 0;
  for (;;) {
    auto tab = line.find('\t', start);
    if (tab == std::string::npos) {
      cols.push_back(line.substr(start));
      return cols;
    }
    cols.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

std::vector<Triple> parse_triples(std::istream& in, const std::string& origin,
                                  bool deduplicate) {
  std::vector<Triple> triples;
  std::set<Triple> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty() || line[0] == '#') continue;
    auto cols = split_tabs(line);
    if (cols.size() != 3)
      throw ParseError(origin + ":" + std::to_string(lineno) + ": expected 3 tab-separated columns, got " +
                       std::to_string(cols.size()));
    for (const auto& c : cols)
      if (c.empty())
        throw ParseError(origin + ":" + std::to_string(lineno) + ": empty field");
    Triple t{cols[0], cols[1], cols[2]};
    if (deduplicate) {
      if (!seen.insert(t).second) continue;
    }
    triples.push_back(std::move(t));
  }
  return triples;
}

std::vector<Triple> load_triples(const std::string& path, bool deduplicate) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open triples file: " + path);
  return parse_triples(in, path, deduplicate);
}

RelationMetaMap parse_relation_meta(std::istream& in, const std::string& origin) {
  RelationMetaMap meta;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty() || line[0] == '#') continue;
    auto cols = split_tabs(line);
    if (cols.size() != 2 || cols[0].empty() || (cols[1] != "0" && cols[1] != "1"))
      throw ParseError(origin + ":" + std::to_string(lineno) +
                       ": expected `relation<TAB>transitive(0|1)`");
    meta[cols[0]] = RelationMeta{cols[0], cols[1] == "1"};
  }
  return meta;
}

RelationMetaMap load_relation_meta(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open relation metadata file: " + path);
  return parse_relation_meta(in, path);
}

DatasetSplit mask_split(const std::vector<Triple>& triples, double fraction,
                        std::uint64_t seed) {
  if (fraction < 0.0 || fraction >= 1.0)
    throw ConfigError("mask_split: fraction must lie in [0, 1)");
  DatasetSplit split;
  split.mask_fraction = fraction;

  // Stratum per relation, in first-appearance order.
  std::vector<std::string> relations;
  std::map<std::string, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < triples.size(); ++i) {
    auto [it, inserted] = strata.try_emplace(triples[i].relation);
    if (inserted) relations.push_back(triples[i].relation);
    it->second.push_back(i);
  }

  std::vector<bool> masked(triples.size(), false);
  for (const auto& rel : relations) {
    auto& idx = strata[rel];
    Rng rng(seed_for(seed, rel));
    // Fisher-Yates shuffle, then mask the prefix.
    for (std::size_t i = idx.size(); i > 1; --i) {
      auto j = static_cast<std::size_t>(rng.next_below(i));
      std::swap(idx[i - 1], idx[j]);
    }
    auto n_mask = static_cast<std::size_t>(
        std::llround(fraction * static_cast<double>(idx.size())));
    for (std::size_t i = 0; i < n_mask; ++i) masked[idx[i]] = true;
  }
  for (std::size_t i = 0; i < triples.size(); ++i)
    (masked[i] ? split.masked : split.train).push_back(triples[i]);
  return split;
}

void bind_symbols(const std::vector<Triple>& triples, Network& net) {
  // Dataset invariant: a label may not be both a relation and an entity.
  std::set<std::string> entities, relations;
  for (const auto& t : triples) {
    entities.insert(t.head);
    entities.insert(t.tail);
    relations.insert(t.relation);
  }
  for (const auto& r : relations)
    if (entities.count(r))
      throw ParseError("label '" + r + "' is used both as a relation and as an entity");

  for (const auto& t : triples) {
    for (const auto* label : {&t.head, &t.tail}) {
      if (!net.registry.contains(*label)) {
        const Engram& e =
            net.registry.allocate(*label, SymbolKind::Entity, net.params.seed);
        net.apply_polarity(e);
      }
    }
    if (!net.registry.contains(t.relation)) {
      const Engram& e =
          net.registry.allocate(t.relation, SymbolKind::Relation, net.params.seed);
      net.apply_polarity(e);
    }
  }
}

}  // namespace gsnn
