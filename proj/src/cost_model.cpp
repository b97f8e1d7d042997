#include "pgso/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "pgso/rules.hpp"

namespace pgso {

namespace {

// Eq-style edge totals: every non-`excluded_type` relationship incident to
// `concept_name`, weighted by edge count, in edge-byte units.
double incident_edge_bytes(const Ontology& o, const std::string& concept_name,
                           RelType excluded_type, const OntologyStats& st,
                           const std::set<std::string>* excluded_neighbors,
                           Warnings* warnings) {
  double bytes = 0;
  for (const auto& r : o.relationships) {
    if (r.type == excluded_type) continue;
    std::string other;
    if (r.src == concept_name)
      other = r.dst;
    else if (r.dst == concept_name)
      other = r.src;
    else
      continue;
    if (excluded_neighbors != nullptr && excluded_neighbors->count(other))
      continue;
    bytes += static_cast<double>(st.edge_count(r.name, warnings)) * kEdgeBytes;
  }
  return bytes;
}

RuleCandidate list_candidate(const Ontology& o, const Relationship& r,
                             bool forward, RuleKind kind,
                             const OntologyStats& st, const Workload& w,
                             Warnings* warnings) {
  RuleCandidate c;
  c.rel = r.name;
  c.kind = kind;
  const std::string& gainer = forward ? r.src : r.dst;
  const std::string& source = forward ? r.dst : r.src;
  const ConceptDef* sc = o.find_concept(source);
  double edges = static_cast<double>(st.edge_count(r.name, warnings));
  double bytes = 0;
  for (const auto& p : sc->properties) {
    c.benefit += af_rel_property(w, gainer, r.name, source + "." + p.name);
    bytes += edges * property_byte_size(p, source, o, st, warnings);
  }
  c.cost_bytes = std::llround(bytes);
  return c;
}

}  // namespace

RuleCandidate benefit_cost(const Ontology& o, const Relationship& r,
                           MnDirection dir, const OntologyStats& st,
                           const Workload& w, double theta1, double theta2,
                           Warnings* warnings) {
  RuleCandidate c;
  c.rel = r.name;
  switch (r.type) {
    case RelType::Union: {
      c.kind = RuleKind::Union;
      c.benefit = af_relationship(w, r.src, r.name);
      std::set<std::string> members;
      for (const auto& u : o.relationships)
        if (u.type == RelType::Union && u.src == r.src) members.insert(u.dst);
      double bytes = incident_edge_bytes(o, r.src, RelType::Union, st,
                                         &members, warnings);
      // Union concepts are normally property-free; when they do carry
      // properties, the rule copies them onto the member and that
      // replication is charged too.
      const ConceptDef* un = o.find_concept(r.src);
      if (!un->properties.empty()) {
        double card = static_cast<double>(st.cardinality(un->name, warnings));
        for (const auto& p : un->properties)
          bytes += card * property_byte_size(p, un->name, o, st, warnings);
      }
      c.cost_bytes = std::llround(bytes);
      break;
    }
    case RelType::Inheritance: {
      c.kind = RuleKind::Inheritance;
      const ConceptDef* parent = o.find_concept(r.src);
      const ConceptDef* child = o.find_concept(r.dst);
      double j = jaccard(parent->properties, child->properties);
      c.benefit = af_relationship(w, r.src, r.name) * j;
      // The side whose properties and edges get replicated: the child when it
      // folds into the parent, the parent when it is copied down. In-band
      // similarities are excluded by the precondition.
      (void)theta2;
      const ConceptDef* side = j > theta1 ? child : parent;
      double bytes = 0;
      double card = static_cast<double>(st.cardinality(side->name, warnings));
      for (const auto& p : side->properties)
        bytes += card * property_byte_size(p, side->name, o, st, warnings);
      bytes += incident_edge_bytes(o, side->name, RelType::Inheritance, st,
                                   nullptr, warnings);
      c.cost_bytes = std::llround(bytes);
      break;
    }
    case RelType::OneToMany:
      return list_candidate(o, r, true, RuleKind::OneToMany, st, w, warnings);
    case RelType::ManyToMany:
      return list_candidate(o, r, dir != MnDirection::Backward,
                            dir == MnDirection::Backward
                                ? RuleKind::MnBackward
                                : RuleKind::MnForward,
                            st, w, warnings);
    case RelType::OneToOne:
      c.kind = RuleKind::OneToOne;  // free: merges consume no extra space
      break;
  }
  return c;
}

std::vector<RuleCandidate> rule_candidates(const Ontology& o,
                                           const OntologyStats& st,
                                           const Workload& w, double theta1,
                                           double theta2, Warnings* warnings) {
  std::vector<RuleCandidate> out;
  for (const auto& r : o.relationships) {
    if (r.type == RelType::OneToOne) continue;
    if (r.type == RelType::Inheritance) {
      double j = jaccard(o.find_concept(r.src)->properties,
                         o.find_concept(r.dst)->properties);
      if (j >= theta2 && j <= theta1) continue;  // kept as isA, never a cost
    }
    if (r.type == RelType::ManyToMany) {
      out.push_back(benefit_cost(o, r, MnDirection::Forward, st, w, theta1,
                                 theta2, warnings));
      out.push_back(benefit_cost(o, r, MnDirection::Backward, st, w, theta1,
                                 theta2, warnings));
    } else {
      out.push_back(benefit_cost(o, r, MnDirection::Forward, st, w, theta1,
                                 theta2, warnings));
    }
  }
  out.erase(std::remove_if(out.begin(), out.end(),
                           [](const RuleCandidate& c) {
                             return c.benefit <= 0.0 && c.cost_bytes > 0;
                           }),
            out.end());
  return out;
}

std::vector<std::size_t> knapsack_fptas(const std::vector<RuleCandidate>& items,
                                        std::int64_t budget, double epsilon) {
  if (budget < 0) budget = 0;
  std::vector<std::size_t> selected;
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].cost_bytes == 0)
      selected.push_back(i);  // free riders, never in the DP
    else if (items[i].cost_bytes <= budget && items[i].benefit > 0)
      pool.push_back(i);
  }
  if (!pool.empty()) {
    std::sort(pool.begin(), pool.end(), [&](std::size_t a, std::size_t b) {
      const auto& x = items[a];
      const auto& y = items[b];
      if (x.benefit != y.benefit) return x.benefit > y.benefit;
      if (x.cost_bytes != y.cost_bytes) return x.cost_bytes < y.cost_bytes;
      return x.label() < y.label();
    });
    const std::size_t n = pool.size();
    double pmax = 0;
    for (std::size_t i : pool) pmax = std::max(pmax, items[i].benefit);
    const double scale = epsilon * pmax / static_cast<double>(n);
    std::vector<std::size_t> profit(n);
    std::size_t total = 0;
    for (std::size_t t = 0; t < n; ++t) {
      profit[t] =
          static_cast<std::size_t>(std::floor(items[pool[t]].benefit / scale));
      total += profit[t];
    }

    constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();
    std::vector<std::int64_t> weight(total + 1, kInf);
    std::vector<double> gain(total + 1, 0.0);  // exact benefit at each cell
    weight[0] = 0;
    std::vector<std::vector<bool>> take(n, std::vector<bool>(total + 1, false));
    for (std::size_t t = 0; t < n; ++t) {
      const std::int64_t wti = items[pool[t]].cost_bytes;
      const double bi = items[pool[t]].benefit;
      const std::size_t pi = profit[t];
      if (pi == 0) continue;  // truncated away; the epsilon bound absorbs it
      for (std::size_t j = total; j >= pi; --j) {
        if (weight[j - pi] == kInf) continue;
        std::int64_t cw = weight[j - pi] + wti;
        double cg = gain[j - pi] + bi;
        if (cw < weight[j] || (cw == weight[j] && cg > gain[j])) {
          weight[j] = cw;
          gain[j] = cg;
          take[t][j] = true;
        }
      }
    }

    // Best feasible cell by exact benefit; scanning every feasible profit
    // keeps the choice monotone in the budget.
    std::size_t best = 0;
    for (std::size_t j = 1; j <= total; ++j) {
      if (weight[j] > budget) continue;
      if (gain[j] > gain[best] ||
          (gain[j] == gain[best] && weight[j] < weight[best]))
        best = j;
    }
    std::size_t j = best;
    for (std::size_t t = n; t-- > 0;) {
      if (j >= profit[t] && take[t][j]) {
        selected.push_back(pool[t]);
        j -= profit[t];
      }
    }
  }
  std::sort(selected.begin(), selected.end());
  return selected;
}

Result<PropertyGraphSchema> optimize_relation_centric(
    const Ontology& o, std::int64_t budget, double theta1, double theta2,
    double epsilon, const Workload& w, const OntologyStats& st,
    Warnings* warnings, WorkingSchema* schema_out) {
  auto fresh = WorkingSchema::from_ontology(o);
  if (!fresh.ok()) return fresh.error();
  WorkingSchema s = std::move(fresh).value();

  std::vector<std::string> blocked = apply_free_rules(s, theta1, theta2);
  std::vector<RuleCandidate> cands =
      rule_candidates(o, st, w, theta1, theta2, warnings);
  std::vector<std::size_t> picked = knapsack_fptas(cands, budget, epsilon);

  std::vector<char> done(picked.size(), 0);
  bool progressed = true;
  while (progressed) {
    progressed = false;
    for (std::size_t k = 0; k < picked.size(); ++k) {
      const RuleCandidate& c = cands[picked[k]];
      if (done[k] || !s.applicable(c.kind, c.rel)) continue;
      auto res = s.apply(c.kind, c.rel, theta1, theta2);
      if (!res.ok()) return res.error();
      done[k] = 1;
      progressed = true;
    }
    if (progressed) blocked = apply_free_rules(s, theta1, theta2);
  }

  double benefit = 0;
  std::int64_t cost = 0;
  for (std::size_t k = 0; k < picked.size(); ++k) {
    const RuleCandidate& c = cands[picked[k]];
    if (done[k]) {
      benefit += c.benefit;
      cost += c.cost_bytes;
    } else if (warnings != nullptr) {
      warnings->push_back("skipped " + c.label() +
                          ": blocked by an unapplied enclosing rule");
    }
  }
  if (warnings != nullptr)
    for (const auto& rel : blocked)
      warnings->push_back("skipped ONE_TO_ONE " + rel +
                          ": endpoint held by an unapplied union");

  PropertyGraphSchema pgs = generate_pgs(s);
  pgs.budget_report.cost_bytes = cost;
  pgs.budget_report.benefit_score = benefit;
  if (schema_out != nullptr) *schema_out = std::move(s);
  return pgs;
}

ModelTotals model_totals(const Ontology& o, const OntologyStats& st,
                         const Workload& w, double theta1, double theta2) {
  ModelTotals t;
  for (const auto& c : rule_candidates(o, st, w, theta1, theta2)) {
    t.benefit += c.benefit;
    t.cost_bytes += c.cost_bytes;
  }
  return t;
}

Result<double> benefit_ratio(const PropertyGraphSchema& candidate,
                             const PropertyGraphSchema& reference) {
  if (candidate.origin_fingerprint != reference.origin_fingerprint)
    return make_error(ErrorCode::MismatchedOrigin,
                      "schemas stem from different ontologies");
  double b = candidate.budget_report.benefit_score;
  double ref = reference.budget_report.benefit_score;
  if (ref == 0.0) return b == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return b / ref;
}

}  // namespace pgso
