#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pgso/common.hpp"

namespace pgso {

enum class ValueType { Int, Double, Bool, String, Date };
enum class PropCardinality { Scalar, List };

const char* to_string(ValueType t);
std::optional<ValueType> value_type_from(const std::string& s);

// Identity of a property is (origin, name): origin is the concept that
// declared it, and survives replication by rewrite rules unchanged.
struct DataProperty {
  std::string name;
  ValueType type = ValueType::String;
  PropCardinality cardinality = PropCardinality::Scalar;
  std::string origin;                // declaring concept
  std::optional<std::string> origin_rel;  // relationship a LIST was derived from

  bool is_list() const { return cardinality == PropCardinality::List; }
};

struct ConceptDef {
  std::string name;
  std::vector<DataProperty> properties;
};

enum class RelType { OneToOne, OneToMany, ManyToMany, Union, Inheritance };

const char* to_string(RelType t);
std::optional<RelType> rel_type_from(const std::string& s);

// For UNION src is the union concept; for INHERITANCE src is the parent.
struct Relationship {
  std::string name;
  std::string src;
  std::string dst;
  RelType type = RelType::OneToMany;
};

struct Ontology {
  std::vector<ConceptDef> concepts;       // declaration order
  std::vector<Relationship> relationships;

  const ConceptDef* find_concept(const std::string& name) const;
  const Relationship* find_relationship(const std::string& name) const;
  int concept_index(const std::string& name) const;  // -1 when absent
};

struct ParseOptions {
  bool allow_union_props = false;
};

Result<Ontology> parse_ontology(const std::string& json_text,
                                const ParseOptions& opts = {});
std::string serialize_ontology(const Ontology& o);

// FNV-1a of the canonical serialization; ties schemas back to their source
// ontology for benefit-ratio comparisons.
std::string ontology_fingerprint(const Ontology& o);

// Absent entries fall back to cardinality/edge-count defaults of 1000 and to
// per-type byte sizes; every fallback for a requested name is reported once
// through the Warnings sink when one is supplied.
struct OntologyStats {
  std::map<std::string, std::int64_t> concept_cardinality;
  std::map<std::string, std::int64_t> rel_edge_count;
  std::map<std::string, std::int64_t> property_avg_bytes;  // "Concept.prop"

  static constexpr std::int64_t kDefaultCardinality = 1000;
  static constexpr std::int64_t kDefaultEdgeCount = 1000;

  std::int64_t cardinality(const std::string& concept_name,
                           Warnings* warnings = nullptr) const;
  std::int64_t edge_count(const std::string& rel_name,
                          Warnings* warnings = nullptr) const;
};

Result<OntologyStats> parse_stats(const std::string& json_text);

struct WorkloadEntry {
  std::string src;
  std::optional<std::string> rel;
  std::optional<std::string> dst_property;  // "Concept.prop"
  double frequency = 0.0;
};

struct Workload {
  std::vector<WorkloadEntry> entries;
  bool uniform() const { return entries.empty(); }
};

Result<Workload> parse_workload(const std::string& json_text);

// Byte widths: INT 8, DOUBLE 8, BOOL 1, DATE 8, STRING 32; a
// "Concept.prop" stats entry overrides the type default.
double scalar_byte_size(ValueType t);
double property_byte_size(const DataProperty& p, const std::string& holder,
                          const Ontology& o, const OntologyStats& stats,
                          Warnings* warnings = nullptr);

// Total per-instance bytes of a concept's properties. LIST properties weigh
// avgListLen * element size with avgListLen = edgeCount(rel)/max(1, |holder|).
double size_of_concept(const ConceptDef& c, const Ontology& o,
                       const OntologyStats& stats,
                       Warnings* warnings = nullptr);

// Workload access frequencies. An empty workload is uniform: every target
// scores 1. Entries without a rel are concept-level observations; entries
// without a dstProperty speak for the whole relationship.
double af_concept(const Workload& w, const std::string& concept_name);
double af_relationship(const Workload& w, const std::string& src,
                       const std::string& rel);
double af_rel_property(const Workload& w, const std::string& src,
                       const std::string& rel, const std::string& dst_property);

}  // namespace pgso
