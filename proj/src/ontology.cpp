#include "pgso/ontology.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include <nlohmann/json.hpp>

namespace pgso {

using nlohmann::json;
using nlohmann::ordered_json;

const char* to_string(ValueType t) {
  switch (t) {
    case ValueType::Int: return "INT";
    case ValueType::Double: return "DOUBLE";
    case ValueType::Bool: return "BOOL";
    case ValueType::String: return "STRING";
    case ValueType::Date: return "DATE";
  }
  return "STRING";
}

std::optional<ValueType> value_type_from(const std::string& s) {
  if (s == "INT") return ValueType::Int;
  if (s == "DOUBLE") return ValueType::Double;
  if (s == "BOOL") return ValueType::Bool;
  if (s == "STRING") return ValueType::String;
  if (s == "DATE") return ValueType::Date;
  return std::nullopt;
}

const char* to_string(RelType t) {
  switch (t) {
    case RelType::OneToOne: return "ONE_TO_ONE";
    case RelType::OneToMany: return "ONE_TO_MANY";
    case RelType::ManyToMany: return "MANY_TO_MANY";
    case RelType::Union: return "UNION";
    case RelType::Inheritance: return "INHERITANCE";
  }
  return "ONE_TO_MANY";
}

std::optional<RelType> rel_type_from(const std::string& s) {
  if (s == "ONE_TO_ONE") return RelType::OneToOne;
  if (s == "ONE_TO_MANY") return RelType::OneToMany;
  if (s == "MANY_TO_MANY") return RelType::ManyToMany;
  if (s == "UNION") return RelType::Union;
  if (s == "INHERITANCE") return RelType::Inheritance;
  return std::nullopt;
}

const ConceptDef* Ontology::find_concept(const std::string& name) const {
  for (const auto& c : concepts)
    if (c.name == name) return &c;
  return nullptr;
}

const Relationship* Ontology::find_relationship(const std::string& name) const {
  for (const auto& r : relationships)
    if (r.name == name) return &r;
  return nullptr;
}

int Ontology::concept_index(const std::string& name) const {
  for (std::size_t i = 0; i < concepts.size(); ++i)
    if (concepts[i].name == name) return static_cast<int>(i);
  return -1;
}

namespace {

// DFS cycle check over one relationship type (UNION or INHERITANCE).
bool has_cycle(const Ontology& o, RelType type) {
  std::map<std::string, std::vector<std::string>> next;
  for (const auto& r : o.relationships)
    if (r.type == type) next[r.src].push_back(r.dst);

  std::map<std::string, int> state;  // 0 unseen, 1 on stack, 2 done
  std::function<bool(const std::string&)> visit = [&](const std::string& n) {
    int& s = state[n];
    if (s == 1) return true;
    if (s == 2) return false;
    s = 1;
    for (const auto& m : next[n])
      if (visit(m)) return true;
    s = 2;
    return false;
  };
  for (const auto& [n, _] : next)
    if (visit(n)) return true;
  return false;
}

}  // namespace

Result<Ontology> parse_ontology(const std::string& json_text,
                                const ParseOptions& opts) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    return make_error(ErrorCode::MalformedJson, e.what());
  }

  Ontology o;
  try {
    if (!root.is_object() || !root.contains("concepts") ||
        !root.contains("relationships"))
      return make_error(ErrorCode::MalformedJson,
                        "expected object with concepts and relationships");

    for (const auto& jc : root.at("concepts")) {
      ConceptDef c;
      c.name = jc.at("name").get<std::string>();
      if (c.name.empty())
        return make_error(ErrorCode::MalformedJson, "empty concept name");
      if (jc.contains("properties")) {
        for (const auto& jp : jc.at("properties")) {
          DataProperty p;
          p.name = jp.at("name").get<std::string>();
          auto t = value_type_from(jp.at("type").get<std::string>());
          if (!t)
            return make_error(ErrorCode::BadRelType,
                              "unknown property type for " + c.name + "." +
                                  p.name);
          p.type = *t;
          p.cardinality = PropCardinality::Scalar;
          p.origin = c.name;
          c.properties.push_back(std::move(p));
        }
      }
      o.concepts.push_back(std::move(c));
    }

    for (const auto& jr : root.at("relationships")) {
      Relationship r;
      r.name = jr.at("name").get<std::string>();
      r.src = jr.at("src").get<std::string>();
      r.dst = jr.at("dst").get<std::string>();
      auto t = rel_type_from(jr.at("type").get<std::string>());
      if (!t)
        return make_error(ErrorCode::BadRelType,
                          "unknown relationship type on " + r.name);
      r.type = *t;
      o.relationships.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    return make_error(ErrorCode::MalformedJson, e.what());
  }

  // Name uniqueness.
  {
    std::map<std::string, int> seen;
    for (const auto& c : o.concepts)
      if (++seen[c.name] > 1)
        return make_error(ErrorCode::DuplicateName,
                          "duplicate concept " + c.name);
    for (const auto& c : o.concepts) {
      std::map<std::string, int> props;
      for (const auto& p : c.properties)
        if (++props[p.name] > 1)
          return make_error(ErrorCode::DuplicateName,
                            "duplicate property " + c.name + "." + p.name);
    }
    std::map<std::string, int> rels;
    for (const auto& r : o.relationships)
      if (++rels[r.name] > 1)
        return make_error(ErrorCode::DuplicateName,
                          "duplicate relationship " + r.name);
  }

  // Endpoint resolution.
  for (const auto& r : o.relationships) {
    if (o.find_concept(r.src) == nullptr)
      return make_error(ErrorCode::UnknownConceptRef,
                        r.name + " references unknown concept " + r.src);
    if (o.find_concept(r.dst) == nullptr)
      return make_error(ErrorCode::UnknownConceptRef,
                        r.name + " references unknown concept " + r.dst);
  }

  // Union and inheritance structure must be acyclic; self edges included.
  for (const auto& r : o.relationships)
    if ((r.type == RelType::Union || r.type == RelType::Inheritance) &&
        r.src == r.dst)
      return make_error(ErrorCode::CycleDetected,
                        r.name + " loops " + r.src + " onto itself");
  if (has_cycle(o, RelType::Inheritance))
    return make_error(ErrorCode::CycleDetected, "inheritance cycle");
  if (has_cycle(o, RelType::Union))
    return make_error(ErrorCode::CycleDetected, "union cycle");

  // Union concepts carry no data properties of their own unless allowed.
  if (!opts.allow_union_props) {
    for (const auto& r : o.relationships) {
      if (r.type != RelType::Union) continue;
      const ConceptDef* u = o.find_concept(r.src);
      if (u != nullptr && !u->properties.empty())
        return make_error(ErrorCode::ConstraintViolation,
                          "union concept " + u->name +
                              " declares data properties");
    }
  }

  return o;
}

std::string serialize_ontology(const Ontology& o) {
  ordered_json root;
  root["concepts"] = ordered_json::array();
  for (const auto& c : o.concepts) {
    ordered_json jc;
    jc["name"] = c.name;
    jc["properties"] = ordered_json::array();
    for (const auto& p : c.properties) {
      ordered_json jp;
      jp["name"] = p.name;
      jp["type"] = to_string(p.type);
      jc["properties"].push_back(jp);
    }
    root["concepts"].push_back(jc);
  }
  root["relationships"] = ordered_json::array();
  for (const auto& r : o.relationships) {
    ordered_json jr;
    jr["name"] = r.name;
    jr["src"] = r.src;
    jr["dst"] = r.dst;
    jr["type"] = to_string(r.type);
    root["relationships"].push_back(jr);
  }
  return root.dump(2);
}

std::string ontology_fingerprint(const Ontology& o) {
  // Canonical form: sorted keys, no layout noise.
  json root = json::parse(serialize_ontology(o));
  std::string canon = root.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : canon) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::int64_t OntologyStats::cardinality(const std::string& concept_name,
                                        Warnings* warnings) const {
  auto it = concept_cardinality.find(concept_name);
  if (it != concept_cardinality.end()) return it->second;
  if (warnings != nullptr)
    warnings->push_back("no cardinality for concept " + concept_name +
                        "; default " + std::to_string(kDefaultCardinality));
  return kDefaultCardinality;
}

std::int64_t OntologyStats::edge_count(const std::string& rel_name,
                                       Warnings* warnings) const {
  auto it = rel_edge_count.find(rel_name);
  if (it != rel_edge_count.end()) return it->second;
  if (warnings != nullptr)
    warnings->push_back("no edge count for relationship " + rel_name +
                        "; default " + std::to_string(kDefaultEdgeCount));
  return kDefaultEdgeCount;
}

Result<OntologyStats> parse_stats(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    return make_error(ErrorCode::MalformedJson, e.what());
  }
  OntologyStats s;
  try {
    if (root.contains("concepts"))
      for (const auto& [name, v] : root.at("concepts").items())
        s.concept_cardinality[name] = v.at("cardinality").get<std::int64_t>();
    if (root.contains("relationships"))
      for (const auto& [name, v] : root.at("relationships").items())
        s.rel_edge_count[name] = v.at("edgeCount").get<std::int64_t>();
    if (root.contains("properties"))
      for (const auto& [name, v] : root.at("properties").items())
        s.property_avg_bytes[name] = v.at("avgBytes").get<std::int64_t>();
  } catch (const json::exception& e) {
    return make_error(ErrorCode::MalformedJson, e.what());
  }
  for (const auto& [k, v] : s.concept_cardinality)
    if (v < 0)
      return make_error(ErrorCode::ConstraintViolation,
                        "negative cardinality for " + k);
  for (const auto& [k, v] : s.rel_edge_count)
    if (v < 0)
      return make_error(ErrorCode::ConstraintViolation,
                        "negative edge count for " + k);
  return s;
}

Result<Workload> parse_workload(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    return make_error(ErrorCode::MalformedJson, e.what());
  }
  Workload w;
  try {
    if (root.contains("entries")) {
      for (const auto& je : root.at("entries")) {
        WorkloadEntry e;
        e.src = je.at("src").get<std::string>();
        if (je.contains("rel")) e.rel = je.at("rel").get<std::string>();
        if (je.contains("dstProperty"))
          e.dst_property = je.at("dstProperty").get<std::string>();
        e.frequency = je.at("frequency").get<double>();
        if (e.frequency < 0)
          return make_error(ErrorCode::ConstraintViolation,
                            "negative frequency for " + e.src);
        w.entries.push_back(std::move(e));
      }
    }
  } catch (const json::exception& e) {
    return make_error(ErrorCode::MalformedJson, e.what());
  }
  return w;
}

double scalar_byte_size(ValueType t) {
  switch (t) {
    case ValueType::Int: return 8;
    case ValueType::Double: return 8;
    case ValueType::Bool: return 1;
    case ValueType::Date: return 8;
    case ValueType::String: return 32;
  }
  return 32;
}

double property_byte_size(const DataProperty& p, const std::string& holder,
                          const Ontology& o, const OntologyStats& stats,
                          Warnings* warnings) {
  double elem = scalar_byte_size(p.type);
  auto it = stats.property_avg_bytes.find(holder + "." + p.name);
  if (it == stats.property_avg_bytes.end())
    it = stats.property_avg_bytes.find(p.origin + "." + p.name);
  if (it != stats.property_avg_bytes.end()) elem = double(it->second);

  if (!p.is_list()) return elem;

  double list_len = 1.0;
  if (p.origin_rel) {
    const Relationship* r = o.find_relationship(*p.origin_rel);
    double edges = double(stats.edge_count(*p.origin_rel, warnings));
    std::int64_t holders = stats.cardinality(
        r != nullptr ? r->src : holder, warnings);
    list_len = edges / double(std::max<std::int64_t>(1, holders));
  }
  return list_len * elem;
}

double size_of_concept(const ConceptDef& c, const Ontology& o,
                       const OntologyStats& stats, Warnings* warnings) {
  double total = 0;
  for (const auto& p : c.properties)
    total += property_byte_size(p, c.name, o, stats, warnings);
  return total;
}

namespace {

std::string property_owner(const std::string& dotted) {
  auto pos = dotted.find('.');
  return pos == std::string::npos ? dotted : dotted.substr(0, pos);
}

}  // namespace

double af_concept(const Workload& w, const std::string& concept_name) {
  if (w.uniform()) return 1.0;
  double total = 0;
  for (const auto& e : w.entries) {
    if (e.src == concept_name ||
        (e.dst_property && property_owner(*e.dst_property) == concept_name))
      total += e.frequency;
  }
  return total;
}

double af_relationship(const Workload& w, const std::string& src,
                       const std::string& rel) {
  if (w.uniform()) return 1.0;
  double total = 0;
  for (const auto& e : w.entries)
    if (e.src == src && e.rel && *e.rel == rel) total += e.frequency;
  return total;
}

double af_rel_property(const Workload& w, const std::string& src,
                       const std::string& rel,
                       const std::string& dst_property) {
  if (w.uniform()) return 1.0;
  double total = 0;
  for (const auto& e : w.entries) {
    if (e.src != src || !e.rel || *e.rel != rel) continue;
    if (!e.dst_property || *e.dst_property == dst_property)
      total += e.frequency;
  }
  return total;
}

}  // namespace pgso
