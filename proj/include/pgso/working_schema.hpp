#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pgso/common.hpp"
#include "pgso/ontology.hpp"

namespace pgso {

// M:N splits into two independently applicable directions; every other
// relationship type owns a single rule.
enum class RuleKind {
  Union,
  Inheritance,
  OneToOne,
  OneToMany,
  MnForward,
  MnBackward,
};

const char* to_string(RuleKind k);

enum class MnDirection { Forward, Backward, Both };

// Inheritance branch by Jaccard similarity j against (theta1, theta2):
// Fold (j > theta1) merges the child into the parent, CopyDown (j < theta2)
// replicates the parent onto the child and keeps both, Keep retains the edge
// as a plain isA.
enum class InheritanceBranch { Fold, CopyDown, Keep };

const char* to_string(InheritanceBranch b);

struct RewriteRecord {
  RuleKind kind;
  std::string rel;
  std::optional<InheritanceBranch> branch;
  std::vector<std::string> nodes_removed;
  std::vector<std::string> edges_added;    // "rel:src->dst"
  std::vector<std::string> edges_removed;
  struct PropCopy {
    std::string prop;  // "origin.name"
    std::string from;
    std::string to;
  };
  std::vector<PropCopy> properties_copied;
};

struct SchemaNodeView {
  std::string name;
  std::vector<std::string> constituents;     // original concepts, decl order
  std::vector<DataProperty> properties;      // rendered names
  std::vector<std::string> incident_rels;    // sorted, unique
};

struct SchemaEdgeView {
  std::string rel;
  std::string src;
  std::string dst;
  RelType type;
  double jaccard = 0.0;  // INHERITANCE only
  bool kept_isa = false;
};

// Mutable rewrite graph. Rule effects that replicate material (union
// mirroring, parent-to-child copies, list derivation) are persistent flows
// re-executed until fixpoint, so late-arriving properties and edges still
// propagate; removed union concepts stay behind as invisible relays. Together
// with set-based identities this makes the converged result independent of
// application order.
class WorkingSchema {
 public:
  static Result<WorkingSchema> from_ontology(const Ontology& o);

  const Ontology& ontology() const { return ontology_; }
  double jaccard_of(const std::string& rel) const;  // INHERITANCE rels

  std::map<std::string, SchemaNodeView> nodes() const;
  std::vector<SchemaEdgeView> edges() const;
  const std::vector<RewriteRecord>& provenance_log() const { return log_; }

  bool applied(RuleKind kind, const std::string& rel) const;
  std::optional<InheritanceBranch> branch_of(const std::string& rel) const;
  std::vector<std::pair<RuleKind, std::string>> applied_rules() const;

  // True when the rule could fire right now: not yet applied, at least one
  // live edge instance, and no deferral guard in the way (union rules wait
  // for an enclosing union, 1:1 rules wait for union endpoints to resolve).
  bool applicable(RuleKind kind, const std::string& rel) const;

  // Applies one rule to every live edge instance carrying the relationship
  // name, then re-runs all flows to fixpoint. theta values are only read for
  // INHERITANCE.
  Result<void> apply(RuleKind kind, const std::string& rel,
                     double theta1 = 0.0, double theta2 = 0.0);

  // Re-executes flows until nothing changes; returns whether anything did.
  bool run_flows();

  // Deterministic serialization of the full state (relays included); two
  // states compare equal iff no pass could tell them apart.
  std::string canonical_state() const;

  // Replays the (kind, rel) sequence of a provenance log onto a fresh schema.
  static Result<WorkingSchema> replay(const Ontology& o,
                                      const std::vector<RewriteRecord>& log,
                                      double theta1, double theta2);

 private:
  using NodeId = std::int32_t;

  struct PropEntry {
    std::string origin;
    std::string name;
    ValueType type = ValueType::String;
    bool list = false;
    std::string origin_rel;  // lists only

    auto key() const { return std::tie(origin, name, list); }
    bool operator<(const PropEntry& other) const { return key() < other.key(); }
  };

  struct NodeRec {
    NodeId id = 0;
    bool alive = true;
    bool union_origin = false;
    std::vector<int> constituents;  // concept decl indices, ascending
    int merge_events = 0;
    std::optional<std::pair<std::string, std::string>> lone_pair;
    std::set<PropEntry> props;
  };

  struct EdgeKey {
    std::string rel;
    NodeId src = 0;
    NodeId dst = 0;
    auto tie() const { return std::tie(rel, src, dst); }
    bool operator<(const EdgeKey& other) const { return tie() < other.tie(); }
  };

  struct EdgeRec {
    RelType type = RelType::OneToMany;
    double jaccard = 0.0;
    bool alive = true;
  };

  enum class FlowKind { UnionMirror, InhCopy };

  struct Flow {
    FlowKind kind;
    NodeId from = 0;
    NodeId to = 0;
    std::string rel;  // owning rule, for log attribution
  };

  NodeId resolve(NodeId id) const;
  NodeRec& rec(NodeId id) { return nodes_[id]; }
  const NodeRec& rec(NodeId id) const { return nodes_[id]; }
  bool consumed_rel(const std::string& rel) const;
  std::string display_name(const NodeRec& n) const;
  std::string render_prop(const NodeRec& n, const PropEntry& p) const;
  bool edge_insert(const EdgeKey& key, const EdgeRec& rec);
  void kill_incident_edges(NodeId id, RewriteRecord* record);
  void rehome_edges(NodeId from, NodeId to,
                    const std::optional<EdgeKey>& drop, RewriteRecord* record);
  void merge_nodes(NodeId into, NodeId victim, RewriteRecord* record);
  bool copy_props(NodeId from_id, NodeId to_id, const std::string& rel);
  bool mirror_edges(NodeId from_id, NodeId to_id, bool include_structural,
                    const std::string& rel);
  bool deliver_lists();
  std::string edge_str(const EdgeKey& key) const;

  Result<void> apply_union_rule(const Relationship& r, RewriteRecord& record);
  Result<void> apply_inheritance_rule(const Relationship& r, double theta1,
                                      double theta2, RewriteRecord& record);
  Result<void> apply_one_to_one_rule(const Relationship& r,
                                     RewriteRecord& record);

  Ontology ontology_;
  std::vector<NodeRec> nodes_;                  // index = NodeId
  std::vector<NodeId> alias_;                   // union-find
  std::map<std::string, NodeId> concept_node_;  // concept -> initial node
  std::map<EdgeKey, EdgeRec> edges_;
  std::map<std::string, double> jaccard_;       // INHERITANCE rels
  std::map<std::string, InheritanceBranch> branch_;
  std::set<std::pair<RuleKind, std::string>> applied_;
  std::set<std::string> fold_hidden_;           // decl children of folds
  std::vector<Flow> flows_;
  std::vector<RewriteRecord> log_;
  std::map<std::string, std::size_t> record_idx_;  // rel -> log_ slot
};

}  // namespace pgso
