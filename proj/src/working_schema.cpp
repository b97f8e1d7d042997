#include "pgso/working_schema.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

#include "pgso/rules.hpp"

namespace pgso {

const char* to_string(RuleKind k) {
  switch (k) {
    case RuleKind::Union: return "UNION";
    case RuleKind::Inheritance: return "INHERITANCE";
    case RuleKind::OneToOne: return "ONE_TO_ONE";
    case RuleKind::OneToMany: return "ONE_TO_MANY";
    case RuleKind::MnForward: return "MN_FORWARD";
    case RuleKind::MnBackward: return "MN_BACKWARD";
  }
  return "UNKNOWN";
}

const char* to_string(InheritanceBranch b) {
  switch (b) {
    case InheritanceBranch::Fold: return "FOLD";
    case InheritanceBranch::CopyDown: return "COPY_DOWN";
    case InheritanceBranch::Keep: return "KEEP";
  }
  return "UNKNOWN";
}

Result<WorkingSchema> WorkingSchema::from_ontology(const Ontology& o) {
  WorkingSchema s;
  s.ontology_ = o;
  s.nodes_.reserve(o.concepts.size());
  for (std::size_t i = 0; i < o.concepts.size(); ++i) {
    NodeRec n;
    n.id = static_cast<NodeId>(i);
    n.constituents = {static_cast<int>(i)};
    for (const auto& p : o.concepts[i].properties) {
      PropEntry e;
      e.origin = p.origin;
      e.name = p.name;
      e.type = p.type;
      e.list = false;
      n.props.insert(std::move(e));
    }
    s.concept_node_[o.concepts[i].name] = n.id;
    s.alias_.push_back(n.id);
    s.nodes_.push_back(std::move(n));
  }

  for (const auto& r : o.relationships) {
    if (r.type == RelType::Union)
      s.nodes_[s.concept_node_[r.src]].union_origin = true;
    EdgeKey key{r.name, s.concept_node_[r.src], s.concept_node_[r.dst]};
    EdgeRec rec;
    rec.type = r.type;
    if (r.type == RelType::Inheritance) {
      const ConceptDef* parent = o.find_concept(r.src);
      const ConceptDef* child = o.find_concept(r.dst);
      rec.jaccard = jaccard(parent->properties, child->properties);
      s.jaccard_[r.name] = rec.jaccard;
    }
    s.edges_[key] = rec;
  }
  return s;
}

double WorkingSchema::jaccard_of(const std::string& rel) const {
  auto it = jaccard_.find(rel);
  return it == jaccard_.end() ? 0.0 : it->second;
}

WorkingSchema::NodeId WorkingSchema::resolve(NodeId id) const {
  while (alias_[id] != id) id = alias_[id];
  return id;
}

std::string WorkingSchema::display_name(const NodeRec& n) const {
  std::vector<std::string> visible;
  for (int ci : n.constituents) {
    const std::string& name = ontology_.concepts[ci].name;
    if (fold_hidden_.count(name) == 0) visible.push_back(name);
  }
  if (visible.empty())  // defensive; fold graphs are acyclic
    for (int ci : n.constituents) visible.push_back(ontology_.concepts[ci].name);

  if (n.merge_events == 1 && n.lone_pair && visible.size() == 2) {
    const auto& [a, b] = *n.lone_pair;
    if ((visible[0] == a && visible[1] == b) ||
        (visible[0] == b && visible[1] == a))
      return a + b;
  }
  std::string out;
  for (const auto& v : visible) out += v;
  return out;
}

std::string WorkingSchema::render_prop(const NodeRec& n,
                                       const PropEntry& p) const {
  if (p.list) return p.origin + "." + p.name;
  for (const auto& other : n.props)
    if (!other.list && other.name == p.name && other.origin != p.origin)
      return p.origin + "." + p.name;
  return p.name;
}

bool WorkingSchema::consumed_rel(const std::string& rel) const {
  if (applied_.count({RuleKind::Union, rel}) > 0) return true;
  if (applied_.count({RuleKind::OneToOne, rel}) > 0) return true;
  if (applied_.count({RuleKind::Inheritance, rel}) > 0) {
    auto it = branch_.find(rel);
    return it != branch_.end() && it->second != InheritanceBranch::Keep;
  }
  return false;
}

bool WorkingSchema::edge_insert(const EdgeKey& key, const EdgeRec& rec) {
  // An applied rule consumed every instance of its relationship, present and
  // future; relay copies of them must not come back to life.
  if (consumed_rel(key.rel)) return false;
  EdgeRec e = rec;
  if (!nodes_[key.src].alive || !nodes_[key.dst].alive) e.alive = false;
  auto [it, inserted] = edges_.emplace(key, e);
  if (!inserted && e.alive && !it->second.alive) {
    // Endpoints are live, so the earlier ghost copy can surface.
    it->second.alive = true;
    return true;
  }
  return inserted;
}

std::string WorkingSchema::edge_str(const EdgeKey& key) const {
  return key.rel + ":" + display_name(nodes_[resolve(key.src)]) + "->" +
         display_name(nodes_[resolve(key.dst)]);
}

void WorkingSchema::kill_incident_edges(NodeId id, RewriteRecord* record) {
  for (auto& [key, rec] : edges_) {
    if (key.src != id && key.dst != id) continue;
    if (rec.alive && record != nullptr)
      record->edges_removed.push_back(edge_str(key));
    rec.alive = false;
  }
}

void WorkingSchema::rehome_edges(NodeId from, NodeId to,
                                 const std::optional<EdgeKey>& drop,
                                 RewriteRecord* record) {
  std::vector<std::pair<EdgeKey, EdgeRec>> moved;
  for (auto it = edges_.begin(); it != edges_.end();) {
    if (it->first.src == from || it->first.dst == from) {
      moved.push_back(*it);
      it = edges_.erase(it);
    } else {
      ++it;
    }
  }
  for (auto& [key, rec] : moved) {
    if (drop && key.rel == drop->rel && key.src == drop->src &&
        key.dst == drop->dst) {
      if (rec.alive && record != nullptr)
        record->edges_removed.push_back(edge_str(key));
      continue;
    }
    EdgeKey moved_key = key;
    if (moved_key.src == from) moved_key.src = to;
    if (moved_key.dst == from) moved_key.dst = to;
    edge_insert(moved_key, rec);
  }
}

void WorkingSchema::merge_nodes(NodeId into, NodeId victim,
                                RewriteRecord* record) {
  NodeRec& a = nodes_[into];
  NodeRec& b = nodes_[victim];
  for (const auto& p : b.props) {
    if (a.props.insert(p).second && record != nullptr)
      record->properties_copied.push_back(
          {p.origin + "." + p.name, display_name(b), display_name(a)});
  }
  std::vector<int> merged;
  std::set_union(a.constituents.begin(), a.constituents.end(),
                 b.constituents.begin(), b.constituents.end(),
                 std::back_inserter(merged));
  a.constituents = std::move(merged);
  b.props.clear();
  b.alive = false;
  alias_[victim] = into;
}

bool WorkingSchema::copy_props(NodeId from_id, NodeId to_id,
                               const std::string& rel) {
  NodeId f = resolve(from_id);
  NodeId t = resolve(to_id);
  if (f == t) return false;
  bool changed = false;
  std::vector<PropEntry> pending(nodes_[f].props.begin(),
                                 nodes_[f].props.end());
  for (const auto& p : pending) {
    if (nodes_[t].props.insert(p).second) {
      changed = true;
      auto it = record_idx_.find(rel);
      if (it != record_idx_.end())
        log_[it->second].properties_copied.push_back(
            {p.origin + "." + p.name, display_name(nodes_[f]),
             display_name(nodes_[t])});
    }
  }
  return changed;
}

bool WorkingSchema::mirror_edges(NodeId from_id, NodeId to_id,
                                 bool include_structural,
                                 const std::string& rel) {
  NodeId f = resolve(from_id);
  NodeId t = resolve(to_id);
  if (f == t) return false;
  bool changed = false;
  std::vector<std::pair<EdgeKey, EdgeRec>> sources;
  for (const auto& [key, rec] : edges_) {
    if (key.src != f && key.dst != f) continue;
    if (rec.type == RelType::Union) continue;
    // Parent-to-child copies replicate only the retained functional kinds;
    // transient 1:1 and inheritance edges would re-trigger merges twice.
    if (!include_structural && rec.type != RelType::OneToMany &&
        rec.type != RelType::ManyToMany)
      continue;
    sources.emplace_back(key, rec);
  }
  for (const auto& [key, rec] : sources) {
    EdgeKey copy = key;
    if (copy.src == f) copy.src = t;
    if (copy.dst == f) copy.dst = t;
    EdgeRec fresh = rec;
    fresh.alive = true;
    if (edge_insert(copy, fresh)) {
      changed = true;
      if (edges_[copy].alive) {
        auto it = record_idx_.find(rel);
        if (it != record_idx_.end())
          log_[it->second].edges_added.push_back(edge_str(copy));
      }
    }
  }
  return changed;
}

bool WorkingSchema::deliver_lists() {
  bool changed = false;
  for (const auto& [kind, rel] : applied_) {
    bool forward;
    if (kind == RuleKind::OneToMany || kind == RuleKind::MnForward)
      forward = true;
    else if (kind == RuleKind::MnBackward)
      forward = false;
    else
      continue;
    std::vector<std::pair<NodeId, NodeId>> pairs;  // gainer, source
    for (const auto& [key, rec] : edges_) {
      if (key.rel != rel) continue;
      NodeId s = resolve(key.src);
      NodeId d = resolve(key.dst);
      pairs.emplace_back(forward ? s : d, forward ? d : s);
    }
    for (auto [gainer, source] : pairs) {
      std::vector<PropEntry> scalars;
      for (const auto& p : nodes_[source].props)
        if (!p.list) scalars.push_back(p);
      for (const auto& p : scalars) {
        PropEntry lp;
        lp.origin = p.origin;
        lp.name = p.name;
        lp.type = p.type;
        lp.list = true;
        lp.origin_rel = rel;
        if (nodes_[gainer].props.insert(lp).second) {
          changed = true;
          auto it = record_idx_.find(rel);
          if (it != record_idx_.end())
            log_[it->second].properties_copied.push_back(
                {lp.origin + "." + lp.name, display_name(nodes_[source]),
                 display_name(nodes_[gainer])});
        }
      }
    }
  }
  return changed;
}

bool WorkingSchema::run_flows() {
  bool any = false;
  for (int guard = 0;; ++guard) {
    assert(guard < 4096 && "flow delivery failed to stabilize");
    bool changed = false;
    for (const auto& f : flows_) {
      if (f.kind == FlowKind::UnionMirror) {
        changed |= copy_props(f.from, f.to, f.rel);
        changed |= mirror_edges(f.from, f.to, /*include_structural=*/true,
                                f.rel);
      } else {
        changed |= copy_props(f.from, f.to, f.rel);
        changed |= mirror_edges(f.from, f.to, /*include_structural=*/false,
                                f.rel);
      }
    }
    changed |= deliver_lists();
    if (!changed) break;
    any = true;
  }
  return any;
}

bool WorkingSchema::applied(RuleKind kind, const std::string& rel) const {
  return applied_.count({kind, rel}) > 0;
}

std::optional<InheritanceBranch> WorkingSchema::branch_of(
    const std::string& rel) const {
  auto it = branch_.find(rel);
  if (it == branch_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::pair<RuleKind, std::string>> WorkingSchema::applied_rules()
    const {
  return {applied_.begin(), applied_.end()};
}

bool WorkingSchema::applicable(RuleKind kind, const std::string& rel) const {
  const Relationship* r = ontology_.find_relationship(rel);
  if (r == nullptr) return false;
  switch (kind) {
    case RuleKind::Union:
      if (r->type != RelType::Union) return false;
      break;
    case RuleKind::Inheritance:
      if (r->type != RelType::Inheritance) return false;
      break;
    case RuleKind::OneToOne:
      if (r->type != RelType::OneToOne) return false;
      break;
    case RuleKind::OneToMany:
      if (r->type != RelType::OneToMany) return false;
      break;
    case RuleKind::MnForward:
    case RuleKind::MnBackward:
      if (r->type != RelType::ManyToMany) return false;
      break;
  }
  if (applied(kind, rel)) return false;

  std::vector<EdgeKey> instances;
  for (const auto& [key, rec] : edges_)
    if (key.rel == rel && rec.alive) instances.push_back(key);
  if (instances.empty()) return false;

  if (kind == RuleKind::Union) {
    // Outermost first: wait until no enclosing union still points here.
    NodeId u = concept_node_.at(r->src);
    for (const auto& [key, rec] : edges_)
      if (rec.alive && rec.type == RelType::Union && key.dst == u)
        return false;
  }
  if (kind == RuleKind::OneToOne) {
    // Merging a live union concept would destroy it before its members get
    // rewired; wait for the union rules to resolve the endpoint.
    for (const auto& key : instances) {
      const NodeRec& s = nodes_[resolve(key.src)];
      const NodeRec& d = nodes_[resolve(key.dst)];
      if ((s.union_origin && s.alive) || (d.union_origin && d.alive))
        return false;
    }
  }
  return true;
}

Result<void> WorkingSchema::apply(RuleKind kind, const std::string& rel,
                                  double theta1, double theta2) {
  const Relationship* r = ontology_.find_relationship(rel);
  if (r == nullptr)
    return make_error(ErrorCode::RuleNotApplicable,
                      "unknown relationship " + rel);
  if (applied(kind, rel))
    return make_error(ErrorCode::RuleNotApplicable, rel + " already applied");
  if (!applicable(kind, rel))
    return make_error(ErrorCode::RuleNotApplicable,
                      rel + " is not applicable");

  RewriteRecord record;
  record.kind = kind;
  record.rel = rel;

  Result<void> outcome;
  switch (kind) {
    case RuleKind::Union:
      outcome = apply_union_rule(*r, record);
      break;
    case RuleKind::Inheritance:
      outcome = apply_inheritance_rule(*r, theta1, theta2, record);
      break;
    case RuleKind::OneToOne:
      outcome = apply_one_to_one_rule(*r, record);
      break;
    case RuleKind::OneToMany:
    case RuleKind::MnForward:
    case RuleKind::MnBackward:
      break;  // pure flow rules; marking them applied activates delivery
  }
  if (!outcome.ok()) return outcome;

  applied_.insert({kind, rel});
  log_.push_back(std::move(record));
  record_idx_[rel] = log_.size() - 1;
  run_flows();
  return {};
}

Result<void> WorkingSchema::apply_union_rule(const Relationship& r,
                                             RewriteRecord& record) {
  NodeId u = concept_node_.at(r.src);
  std::vector<EdgeKey> instances;
  for (const auto& [key, rec] : edges_)
    if (key.rel == r.name && rec.alive) instances.push_back(key);

  for (const auto& key : instances) {
    NodeId member = resolve(key.dst);
    flows_.push_back({FlowKind::UnionMirror, u, member, r.name});
    record.edges_removed.push_back(edge_str(key));
    edges_.erase(key);
  }

  bool members_left = false;
  for (const auto& [key, rec] : edges_)
    if (rec.alive && rec.type == RelType::Union && key.src == u)
      members_left = true;
  if (!members_left) {
    record.nodes_removed.push_back(display_name(nodes_[u]));
    nodes_[u].alive = false;
    kill_incident_edges(u, &record);
  }
  return {};
}

Result<void> WorkingSchema::apply_inheritance_rule(const Relationship& r,
                                                   double theta1,
                                                   double theta2,
                                                   RewriteRecord& record) {
  double j = jaccard_.at(r.name);
  InheritanceBranch branch = j > theta1   ? InheritanceBranch::Fold
                             : j < theta2 ? InheritanceBranch::CopyDown
                                          : InheritanceBranch::Keep;
  branch_[r.name] = branch;
  record.branch = branch;

  if (branch == InheritanceBranch::Keep) return {};

  if (branch == InheritanceBranch::CopyDown) {
    std::vector<EdgeKey> instances;
    for (const auto& [key, rec] : edges_)
      if (key.rel == r.name && rec.alive) instances.push_back(key);
    for (const auto& key : instances) {
      flows_.push_back({FlowKind::InhCopy, key.src, key.dst, r.name});
      record.edges_removed.push_back(edge_str(key));
      edges_.erase(key);
    }
    return {};
  }

  // Fold: every merge re-keys sibling instances, so rescan until none live.
  while (true) {
    std::optional<EdgeKey> next;
    for (const auto& [key, rec] : edges_)
      if (key.rel == r.name && rec.alive) {
        next = key;
        break;
      }
    if (!next) break;
    const EdgeKey key = *next;
    NodeId parent = key.src;
    NodeId child = key.dst;
    record.edges_removed.push_back(edge_str(key));
    // Even when an earlier merge already united the pair, the child name is
    // absorbed by the fold; hiding it keeps naming order-independent.
    fold_hidden_.insert(r.dst);
    if (parent == child) {
      edges_.erase(key);
      continue;
    }
    record.nodes_removed.push_back(display_name(nodes_[child]));
    rehome_edges(child, parent, key, &record);
    merge_nodes(parent, child, &record);
    nodes_[parent].merge_events += 1;
    nodes_[parent].lone_pair.reset();
  }
  return {};
}

Result<void> WorkingSchema::apply_one_to_one_rule(const Relationship& r,
                                                  RewriteRecord& record) {
  if (r.src == r.dst)
    return make_error(ErrorCode::SelfMerge,
                      r.name + " relates " + r.src + " to itself");

  // Merges re-key sibling instances of the same rel; rescan until none live.
  while (true) {
    std::optional<EdgeKey> next;
    for (const auto& [key, rec] : edges_)
      if (key.rel == r.name && rec.alive) {
        next = key;
        break;
      }
    if (!next) break;
    const EdgeKey key = *next;
    NodeId s = key.src;
    NodeId d = key.dst;
    record.edges_removed.push_back(edge_str(key));
    if (s == d) {
      edges_.erase(key);
      continue;
    }
    int events = nodes_[s].merge_events + nodes_[d].merge_events;
    record.nodes_removed.push_back(display_name(nodes_[s]));
    record.nodes_removed.push_back(display_name(nodes_[d]));
    rehome_edges(d, s, key, &record);
    merge_nodes(s, d, &record);
    nodes_[s].merge_events = events + 1;
    if (events == 0)
      nodes_[s].lone_pair = std::make_pair(r.src, r.dst);
    else
      nodes_[s].lone_pair.reset();
  }
  return {};
}

std::map<std::string, SchemaNodeView> WorkingSchema::nodes() const {
  std::map<std::string, SchemaNodeView> out;
  for (const auto& n : nodes_) {
    if (!n.alive || resolve(n.id) != n.id) continue;
    SchemaNodeView v;
    v.name = display_name(n);
    for (int ci : n.constituents) v.constituents.push_back(ontology_.concepts[ci].name);
    for (const auto& p : n.props) {
      DataProperty dp;
      dp.name = render_prop(n, p);
      dp.type = p.type;
      dp.cardinality = p.list ? PropCardinality::List : PropCardinality::Scalar;
      dp.origin = p.origin;
      if (p.list) dp.origin_rel = p.origin_rel;
      v.properties.push_back(std::move(dp));
    }
    std::set<std::string> rels;
    for (const auto& [key, rec] : edges_)
      if (rec.alive && (resolve(key.src) == n.id || resolve(key.dst) == n.id))
        rels.insert(key.rel);
    v.incident_rels.assign(rels.begin(), rels.end());
    out[v.name] = std::move(v);
  }
  return out;
}

std::vector<SchemaEdgeView> WorkingSchema::edges() const {
  std::vector<SchemaEdgeView> out;
  for (const auto& [key, rec] : edges_) {
    if (!rec.alive) continue;
    SchemaEdgeView v;
    v.rel = key.rel;
    v.src = display_name(nodes_[resolve(key.src)]);
    v.dst = display_name(nodes_[resolve(key.dst)]);
    v.type = rec.type;
    v.jaccard = rec.jaccard;
    auto it = branch_.find(key.rel);
    v.kept_isa = it != branch_.end() && it->second == InheritanceBranch::Keep;
    out.push_back(std::move(v));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::tie(a.rel, a.src, a.dst) < std::tie(b.rel, b.src, b.dst);
  });
  return out;
}

std::string WorkingSchema::canonical_state() const {
  std::ostringstream os;
  std::vector<std::string> lines;
  for (const auto& n : nodes_) {
    if (resolve(n.id) != n.id) continue;
    std::ostringstream ln;
    ln << "n|" << display_name(n) << '|' << (n.alive ? 1 : 0) << '|';
    for (const auto& p : n.props)
      ln << render_prop(n, p) << ':' << to_string(p.type) << ':'
         << (p.list ? "L" : "S") << ';';
    lines.push_back(ln.str());
  }
  for (const auto& [key, rec] : edges_) {
    std::ostringstream ln;
    ln << "e|" << key.rel << '|' << display_name(nodes_[resolve(key.src)])
       << '|' << display_name(nodes_[resolve(key.dst)]) << '|'
       << (rec.alive ? 1 : 0) << '|' << to_string(rec.type);
    lines.push_back(ln.str());
  }
  for (const auto& f : flows_) {
    std::ostringstream ln;
    ln << "f|" << (f.kind == FlowKind::UnionMirror ? "U" : "I") << '|'
       << display_name(nodes_[resolve(f.from)]) << '|'
       << display_name(nodes_[resolve(f.to)]) << '|' << f.rel;
    lines.push_back(ln.str());
  }
  for (const auto& [kind, rel] : applied_) {
    std::string ln = std::string("a|") + to_string(kind) + "|" + rel;
    auto it = branch_.find(rel);
    if (kind == RuleKind::Inheritance && it != branch_.end())
      ln += std::string("|") + to_string(it->second);
    lines.push_back(ln);
  }
  std::sort(lines.begin(), lines.end());
  for (const auto& ln : lines) os << ln << '\n';
  return os.str();
}

Result<WorkingSchema> WorkingSchema::replay(
    const Ontology& o, const std::vector<RewriteRecord>& log, double theta1,
    double theta2) {
  auto fresh = from_ontology(o);
  if (!fresh.ok()) return fresh;
  WorkingSchema s = std::move(fresh).value();
  for (const auto& record : log) {
    auto res = s.apply(record.kind, record.rel, theta1, theta2);
    if (!res.ok()) return res.error();
  }
  return s;
}

}  // namespace pgso
