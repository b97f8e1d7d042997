#include "pgso/ddl.hpp"

#include <algorithm>
#include <vector>

namespace pgso {

namespace {

std::string tick(const std::string& s) { return "`" + s + "`"; }

std::string prop_type(const PropertySchema& ps) {
  std::string base = to_string(ps.value_type);
  if (ps.cardinality == PropCardinality::List) return "LIST<" + base + ">";
  return base;
}

}  // namespace

std::string emit_ddl(const PropertyGraphSchema& p) {
  std::vector<const PgsNodeType*> nodes;
  for (const auto& n : p.node_types) nodes.push_back(&n);
  std::sort(nodes.begin(), nodes.end(),
            [](const PgsNodeType* a, const PgsNodeType* b) {
              return a->name < b->name;
            });

  std::vector<const PgsEdgeType*> edges;
  for (const auto& e : p.edge_types) edges.push_back(&e);
  std::sort(edges.begin(), edges.end(),
            [](const PgsEdgeType* a, const PgsEdgeType* b) {
              auto ka = std::tie(a->name, a->src_type, a->dst_type);
              auto kb = std::tie(b->name, b->src_type, b->dst_type);
              return ka < kb;
            });

  std::string out;
  for (const PgsNodeType* n : nodes) {
    out += "CREATE NODE TYPE " + tick(n->name);
    if (n->property_schemas.empty()) {
      out += " ();\n";
      continue;
    }
    out += " (\n";
    std::vector<const PropertySchema*> props;
    for (const auto& ps : n->property_schemas) props.push_back(&ps);
    std::sort(props.begin(), props.end(),
              [](const PropertySchema* a, const PropertySchema* b) {
                return std::tie(a->name, a->provenance) <
                       std::tie(b->name, b->provenance);
              });
    for (std::size_t i = 0; i < props.size(); ++i) {
      out += "  " + tick(props[i]->name) + " " + prop_type(*props[i]);
      out += i + 1 < props.size() ? ",\n" : "\n";
    }
    out += ");\n";
  }
  if (!nodes.empty() && !edges.empty()) out += "\n";
  for (const PgsEdgeType* e : edges) {
    out += "CREATE";
    if (e->kind == EdgeKind::Isa) out += " ISA";
    if (e->kind == EdgeKind::Union) out += " UNION";
    out += " EDGE TYPE " + tick(e->name) + " FROM " + tick(e->src_type) +
           " TO " + tick(e->dst_type) + ";\n";
  }
  return out;
}

}  // namespace pgso
