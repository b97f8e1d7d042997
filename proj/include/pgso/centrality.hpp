#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "pgso/common.hpp"
#include "pgso/ontology.hpp"
#include "pgso/optimizer.hpp"

namespace pgso {

struct CentralityResult {
  // Final scores after inheritance propagation (child >= its raw score).
  std::map<std::string, double> scores;
  // Plain PageRank over the processed graph; sums to 1 when nonempty.
  std::map<std::string, double> raw_scores;
  int iterations = 0;
  bool converged = true;
};

// PageRank tailored to ontologies: union concepts are dissolved into their
// members, inheritance edges are set aside, every remaining edge gains a
// reverse edge, and after convergence each concept's score is raised to the
// highest score among its inheritance ancestors. Union concepts do not
// appear in the result maps. Damping 0.85, L1 tolerance 1e-6, at most 100
// iterations; `converged=false` carries the best-effort scores.
CentralityResult ontology_pagerank(const Ontology& o);

// pr * access-frequency / size-in-bytes; a zero size counts as one byte.
double concept_score(const ConceptDef& c, double pr, const Ontology& o,
                     const Workload& w, const OntologyStats& st,
                     Warnings* warnings = nullptr);

// Budgeted optimization driven by concept importance: concepts are visited
// in descending score order and each incident rule is bought when its cost
// still fits the remaining budget. Rules that fit but are blocked by an
// enclosing rule stay reserved until they unblock; reservations that never
// unblock are refunded and reported as warnings.
Result<PropertyGraphSchema> optimize_concept_centric(
    const Ontology& o, std::int64_t budget, double theta1, double theta2,
    const Workload& w, const OntologyStats& st, Warnings* warnings = nullptr,
    WorkingSchema* schema_out = nullptr);

}  // namespace pgso
