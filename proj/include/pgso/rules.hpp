#pragma once

#include <string>
#include <vector>

#include "pgso/common.hpp"
#include "pgso/ontology.hpp"
#include "pgso/working_schema.hpp"

namespace pgso {

// Jaccard similarity of two property sets, compared by name. Two concepts
// with no properties at all count as dissimilar (0), not identical.
double jaccard(const std::vector<DataProperty>& a,
               const std::vector<DataProperty>& b);

// Pure single-rule applications: each returns a transformed copy and leaves
// the input untouched. The copy has all replication flows run to fixpoint.
Result<WorkingSchema> apply_union(const WorkingSchema& s,
                                  const std::string& rel);
Result<WorkingSchema> apply_inheritance(const WorkingSchema& s,
                                        const std::string& rel, double theta1,
                                        double theta2);
Result<WorkingSchema> apply_one_to_one(const WorkingSchema& s,
                                       const std::string& rel);
Result<WorkingSchema> apply_one_to_many(const WorkingSchema& s,
                                        const std::string& rel);
Result<WorkingSchema> apply_many_to_many(const WorkingSchema& s,
                                         const std::string& rel,
                                         MnDirection dir);

}  // namespace pgso
