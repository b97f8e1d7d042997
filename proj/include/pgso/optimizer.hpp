#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pgso/common.hpp"
#include "pgso/ontology.hpp"
#include "pgso/working_schema.hpp"

namespace pgso {

struct OptimizeOptions {
  double theta1 = 0.66;
  double theta2 = 0.33;
  // Per-pass shuffle of the rule scan order; the converged result does not
  // depend on it, which is exactly what the permutation tests exercise.
  std::optional<std::uint64_t> shuffle_seed;
};

struct PropertySchema {
  std::string name;  // rendered; qualified "Origin.name" when prefixed
  ValueType value_type = ValueType::String;
  PropCardinality cardinality = PropCardinality::Scalar;
  std::string provenance;  // origin concept when foreign to the node type
};

struct PgsNodeType {
  std::string name;
  std::vector<PropertySchema> property_schemas;
};

enum class EdgeKind { Relationship, Isa, Union };
const char* to_string(EdgeKind k);

struct PgsEdgeType {
  std::string name;
  std::string src_type;
  std::string dst_type;
  EdgeKind kind = EdgeKind::Relationship;
};

struct BudgetReport {
  std::int64_t cost_bytes = 0;
  double benefit_score = 0.0;
  std::vector<std::string> applied_rules;
};

struct PropertyGraphSchema {
  std::vector<PgsNodeType> node_types;
  std::vector<PgsEdgeType> edge_types;
  BudgetReport budget_report;
  std::string origin_fingerprint;  // of the source ontology
};

// One agenda entry per relationship in declaration order, except M:N which
// contributes its forward and backward rules back to back.
using RuleSeq = std::vector<std::pair<RuleKind, std::string>>;
RuleSeq rule_agenda(const Ontology& o);

// Rules that never consume budget: every 1:1 merge plus Keep marking for
// inheritance with theta2 <= j <= theta1. Returns the rels still blocked by
// a deferral guard (a 1:1 endpoint held by an unprocessed union) so callers
// can retry after more rules fire and report what stayed blocked.
std::vector<std::string> apply_free_rules(WorkingSchema& s, double theta1,
                                          double theta2);

// Fixpoint application of every rule: repeated declaration-order passes (or
// shuffled ones) until a pass changes nothing. Bounded by |R|+1 passes.
Result<WorkingSchema> optimize_unconstrained(const Ontology& o,
                                             const OptimizeOptions& opts = {});

// Snapshot of a working schema as node/edge types. Budget accounting other
// than the applied-rule list is the caller's (it needs stats + workload).
PropertyGraphSchema generate_pgs(const WorkingSchema& s);

// Baseline mapping with no rewriting: concept -> node type, relationship ->
// edge type.
PropertyGraphSchema direct_schema(const Ontology& o);

// Deterministic serialization; two schemas are equal iff their canonical
// strings are. The budget report is bookkeeping, not schema, and is omitted.
std::string canonicalize(const PropertyGraphSchema& p);

std::string serialize_pgs(const PropertyGraphSchema& p);
Result<PropertyGraphSchema> parse_pgs(const std::string& json_text);

}  // namespace pgso
