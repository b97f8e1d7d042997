#include "pgso/optimizer.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

namespace pgso {

using nlohmann::ordered_json;

const char* to_string(EdgeKind k) {
  switch (k) {
    case EdgeKind::Relationship: return "RELATIONSHIP";
    case EdgeKind::Isa: return "ISA";
    case EdgeKind::Union: return "UNION";
  }
  return "UNKNOWN";
}

RuleSeq rule_agenda(const Ontology& o) {
  RuleSeq agenda;
  for (const auto& r : o.relationships) {
    switch (r.type) {
      case RelType::Union:
        agenda.emplace_back(RuleKind::Union, r.name);
        break;
      case RelType::Inheritance:
        agenda.emplace_back(RuleKind::Inheritance, r.name);
        break;
      case RelType::OneToOne:
        agenda.emplace_back(RuleKind::OneToOne, r.name);
        break;
      case RelType::OneToMany:
        agenda.emplace_back(RuleKind::OneToMany, r.name);
        break;
      case RelType::ManyToMany:
        agenda.emplace_back(RuleKind::MnForward, r.name);
        agenda.emplace_back(RuleKind::MnBackward, r.name);
        break;
    }
  }
  return agenda;
}

std::vector<std::string> apply_free_rules(WorkingSchema& s, double theta1,
                                          double theta2) {
  for (const auto& r : s.ontology().relationships) {
    if (r.type != RelType::Inheritance) continue;
    double j = s.jaccard_of(r.name);
    if (j >= theta2 && j <= theta1 && !s.applied(RuleKind::Inheritance, r.name))
      s.apply(RuleKind::Inheritance, r.name, theta1, theta2);
  }
  // A merge can unblock another 1:1; sweep until a pass applies nothing.
  bool progressed = true;
  while (progressed) {
    progressed = false;
    for (const auto& r : s.ontology().relationships) {
      if (r.type != RelType::OneToOne) continue;
      if (s.applicable(RuleKind::OneToOne, r.name))
        progressed |= s.apply(RuleKind::OneToOne, r.name).ok();
    }
  }
  std::vector<std::string> blocked;
  for (const auto& r : s.ontology().relationships)
    if (r.type == RelType::OneToOne && !s.applied(RuleKind::OneToOne, r.name) &&
        r.src != r.dst)
      blocked.push_back(r.name);
  return blocked;
}

Result<WorkingSchema> optimize_unconstrained(const Ontology& o,
                                             const OptimizeOptions& opts) {
  auto fresh = WorkingSchema::from_ontology(o);
  if (!fresh.ok()) return fresh;
  WorkingSchema s = std::move(fresh).value();

  RuleSeq agenda = rule_agenda(o);
  std::optional<std::mt19937_64> rng;
  if (opts.shuffle_seed) rng.emplace(*opts.shuffle_seed);

  const std::size_t max_passes = o.relationships.size() + 1;
  std::string prev = s.canonical_state();
  for (std::size_t pass = 0; pass < max_passes; ++pass) {
    if (rng) std::shuffle(agenda.begin(), agenda.end(), *rng);
    for (const auto& [kind, rel] : agenda) {
      if (!s.applicable(kind, rel)) continue;
      auto res = s.apply(kind, rel, opts.theta1, opts.theta2);
      if (!res.ok()) return res.error();
    }
    std::string cur = s.canonical_state();
    if (cur == prev) return s;
    prev = std::move(cur);
  }
  return make_error(ErrorCode::NonConvergence,
                    "no fixpoint within " + std::to_string(max_passes) +
                        " passes");
}

PropertyGraphSchema generate_pgs(const WorkingSchema& s) {
  PropertyGraphSchema p;
  p.origin_fingerprint = ontology_fingerprint(s.ontology());

  for (const auto& [name, node] : s.nodes()) {
    PgsNodeType nt;
    nt.name = name;
    for (const auto& dp : node.properties) {
      PropertySchema ps;
      ps.name = dp.name;
      ps.value_type = dp.type;
      ps.cardinality = dp.cardinality;
      bool local = std::find(node.constituents.begin(),
                             node.constituents.end(),
                             dp.origin) != node.constituents.end();
      if (dp.is_list() || !local) ps.provenance = dp.origin;
      nt.property_schemas.push_back(std::move(ps));
    }
    std::sort(nt.property_schemas.begin(), nt.property_schemas.end(),
              [](const PropertySchema& a, const PropertySchema& b) {
                return std::tie(a.name, a.provenance) <
                       std::tie(b.name, b.provenance);
              });
    p.node_types.push_back(std::move(nt));
  }

  for (const auto& e : s.edges()) {
    PgsEdgeType et;
    et.name = e.rel;
    et.src_type = e.src;
    et.dst_type = e.dst;
    et.kind = e.type == RelType::Union         ? EdgeKind::Union
              : e.type == RelType::Inheritance ? EdgeKind::Isa
                                               : EdgeKind::Relationship;
    p.edge_types.push_back(std::move(et));
  }

  for (const auto& rec : s.provenance_log()) {
    std::string entry = std::string(to_string(rec.kind)) + " " + rec.rel;
    if (rec.branch) entry += std::string(" ") + to_string(*rec.branch);
    p.budget_report.applied_rules.push_back(std::move(entry));
  }
  return p;
}

PropertyGraphSchema direct_schema(const Ontology& o) {
  PropertyGraphSchema p;
  p.origin_fingerprint = ontology_fingerprint(o);
  for (const auto& c : o.concepts) {
    PgsNodeType nt;
    nt.name = c.name;
    for (const auto& dp : c.properties) {
      PropertySchema ps;
      ps.name = dp.name;
      ps.value_type = dp.type;
      ps.cardinality = dp.cardinality;
      nt.property_schemas.push_back(std::move(ps));
    }
    p.node_types.push_back(std::move(nt));
  }
  for (const auto& r : o.relationships) {
    PgsEdgeType et;
    et.name = r.name;
    et.src_type = r.src;
    et.dst_type = r.dst;
    et.kind = r.type == RelType::Union         ? EdgeKind::Union
              : r.type == RelType::Inheritance ? EdgeKind::Isa
                                               : EdgeKind::Relationship;
    p.edge_types.push_back(std::move(et));
  }
  return p;
}

std::string canonicalize(const PropertyGraphSchema& p) {
  std::vector<std::string> node_lines;
  for (const auto& nt : p.node_types) {
    std::ostringstream os;
    os << "node|" << nt.name;
    std::vector<std::string> props;
    for (const auto& ps : nt.property_schemas) {
      std::ostringstream ps_os;
      ps_os << ps.name << ':' << to_string(ps.value_type) << ':'
            << (ps.cardinality == PropCardinality::List ? "LIST" : "SCALAR")
            << ':' << ps.provenance;
      props.push_back(ps_os.str());
    }
    std::sort(props.begin(), props.end());
    for (const auto& pr : props) os << '|' << pr;
    node_lines.push_back(os.str());
  }
  std::sort(node_lines.begin(), node_lines.end());

  std::vector<std::string> edge_lines;
  for (const auto& et : p.edge_types) {
    std::ostringstream os;
    os << "edge|" << et.name << '|' << et.src_type << '|' << et.dst_type
       << '|' << to_string(et.kind);
    edge_lines.push_back(os.str());
  }
  std::sort(edge_lines.begin(), edge_lines.end());

  std::ostringstream out;
  for (const auto& l : node_lines) out << l << '\n';
  for (const auto& l : edge_lines) out << l << '\n';
  return out.str();
}

std::string serialize_pgs(const PropertyGraphSchema& p) {
  ordered_json j;
  j["nodeTypes"] = ordered_json::array();
  for (const auto& nt : p.node_types) {
    ordered_json n;
    n["name"] = nt.name;
    n["propertySchemas"] = ordered_json::array();
    for (const auto& ps : nt.property_schemas) {
      ordered_json pj;
      pj["name"] = ps.name;
      pj["valueType"] = to_string(ps.value_type);
      pj["cardinality"] =
          ps.cardinality == PropCardinality::List ? "LIST" : "SCALAR";
      if (!ps.provenance.empty()) pj["provenance"] = ps.provenance;
      n["propertySchemas"].push_back(std::move(pj));
    }
    j["nodeTypes"].push_back(std::move(n));
  }
  j["edgeTypes"] = ordered_json::array();
  for (const auto& et : p.edge_types) {
    ordered_json e;
    e["name"] = et.name;
    e["srcType"] = et.src_type;
    e["dstType"] = et.dst_type;
    e["kind"] = to_string(et.kind);
    j["edgeTypes"].push_back(std::move(e));
  }
  ordered_json br;
  br["costBytes"] = p.budget_report.cost_bytes;
  br["benefitScore"] = p.budget_report.benefit_score;
  br["appliedRules"] = p.budget_report.applied_rules;
  j["budgetReport"] = std::move(br);
  if (!p.origin_fingerprint.empty()) j["origin"] = p.origin_fingerprint;
  return j.dump(2) + "\n";
}

Result<PropertyGraphSchema> parse_pgs(const std::string& json_text) {
  ordered_json j = ordered_json::parse(json_text, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    return make_error(ErrorCode::MalformedJson, "schema is not a JSON object");

  PropertyGraphSchema p;
  try {
    for (const auto& n : j.value("nodeTypes", ordered_json::array())) {
      PgsNodeType nt;
      nt.name = n.at("name").get<std::string>();
      for (const auto& pj : n.value("propertySchemas", ordered_json::array())) {
        PropertySchema ps;
        ps.name = pj.at("name").get<std::string>();
        auto vt = value_type_from(pj.at("valueType").get<std::string>());
        if (!vt)
          return make_error(ErrorCode::MalformedJson,
                            "unknown valueType in " + nt.name);
        ps.value_type = *vt;
        ps.cardinality = pj.value("cardinality", "SCALAR") == "LIST"
                             ? PropCardinality::List
                             : PropCardinality::Scalar;
        ps.provenance = pj.value("provenance", "");
        nt.property_schemas.push_back(std::move(ps));
      }
      p.node_types.push_back(std::move(nt));
    }
    for (const auto& e : j.value("edgeTypes", ordered_json::array())) {
      PgsEdgeType et;
      et.name = e.at("name").get<std::string>();
      et.src_type = e.at("srcType").get<std::string>();
      et.dst_type = e.at("dstType").get<std::string>();
      std::string kind = e.value("kind", "RELATIONSHIP");
      et.kind = kind == "ISA"     ? EdgeKind::Isa
                : kind == "UNION" ? EdgeKind::Union
                                  : EdgeKind::Relationship;
      p.edge_types.push_back(std::move(et));
    }
    if (j.contains("budgetReport")) {
      const auto& br = j["budgetReport"];
      p.budget_report.cost_bytes = br.value("costBytes", std::int64_t{0});
      p.budget_report.benefit_score = br.value("benefitScore", 0.0);
      for (const auto& r : br.value("appliedRules", ordered_json::array()))
        p.budget_report.applied_rules.push_back(r.get<std::string>());
    }
    p.origin_fingerprint = j.value("origin", "");
  } catch (const ordered_json::exception& e) {
    return make_error(ErrorCode::MalformedJson, e.what());
  }
  return p;
}

}  // namespace pgso
