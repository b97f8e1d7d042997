#pragma once

#include <string>

#include "pgso/optimizer.hpp"

namespace pgso {

// Cypher-flavored rendering of a schema: one CREATE statement per node type
// and per edge type, list properties as LIST<type>, everything backticked and
// canonically ordered so equal schemas emit byte-identical text. An empty
// schema emits an empty string.
std::string emit_ddl(const PropertyGraphSchema& p);

}  // namespace pgso
