#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pgso/common.hpp"
#include "pgso/ontology.hpp"
#include "pgso/optimizer.hpp"

namespace pgso {

// One budget unit is a byte. Rule costs that count copied edges are
// normalized through this width so edge and property overheads share a unit.
inline constexpr std::int64_t kEdgeBytes = 16;

struct RuleCandidate {
  std::string rel;
  RuleKind kind = RuleKind::OneToMany;
  double benefit = 0.0;
  std::int64_t cost_bytes = 0;

  std::string label() const { return std::string(to_string(kind)) + " " + rel; }
};

// Benefit/cost of applying one rule, evaluated statically on the declared
// ontology. Callers must not pass ONE_TO_ONE (free, pre-applied) or an
// INHERITANCE relationship whose similarity falls inside [theta2, theta1]
// (kept as isA, never a budget item). For MANY_TO_MANY the direction picks
// which endpoint's properties are replicated; other types ignore it.
RuleCandidate benefit_cost(const Ontology& o, const Relationship& r,
                           MnDirection dir, const OntologyStats& st,
                           const Workload& w, double theta1, double theta2,
                           Warnings* warnings = nullptr);

// Every budget-consuming candidate in declaration order; M:N contributes a
// forward and a backward entry. Zero-benefit candidates with positive cost
// are dropped (they can never pay for themselves).
std::vector<RuleCandidate> rule_candidates(const Ontology& o,
                                           const OntologyStats& st,
                                           const Workload& w, double theta1,
                                           double theta2,
                                           Warnings* warnings = nullptr);

// (1-epsilon)-optimal 0/1 knapsack via the profit-scaled minimum-weight DP.
// Returns indices into `items`, ascending. Zero-cost items are always
// selected; ties break deterministically by (benefit desc, cost asc, label
// asc). Selected benefit is nondecreasing in the budget.
std::vector<std::size_t> knapsack_fptas(const std::vector<RuleCandidate>& items,
                                        std::int64_t budget, double epsilon);

// Knapsack-selected rule application under a byte budget. When `schema_out`
// is given it receives the working schema behind the returned snapshot (for
// materializing instance data under it).
Result<PropertyGraphSchema> optimize_relation_centric(
    const Ontology& o, std::int64_t budget, double theta1, double theta2,
    double epsilon, const Workload& w, const OntologyStats& st,
    Warnings* warnings = nullptr, WorkingSchema* schema_out = nullptr);

// Sum of all candidates' benefits and costs: what the unconstrained schema
// "spends" in this model, and the BR denominator.
struct ModelTotals {
  double benefit = 0.0;
  std::int64_t cost_bytes = 0;
};
ModelTotals model_totals(const Ontology& o, const OntologyStats& st,
                         const Workload& w, double theta1, double theta2);

// candidate.benefit / reference.benefit with 0/0 -> 1. Both schemas must
// stem from the same ontology.
Result<double> benefit_ratio(const PropertyGraphSchema& candidate,
                             const PropertyGraphSchema& reference);

}  // namespace pgso
