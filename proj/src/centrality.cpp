#include "pgso/centrality.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <tuple>
#include <vector>

#include "pgso/cost_model.hpp"

namespace pgso {

namespace {

constexpr double kDamping = 0.85;
constexpr double kTolerance = 1e-6;
constexpr int kMaxIterations = 100;

using EdgeTuple = std::tuple<std::string, std::string, std::string>;

}  // namespace

CentralityResult ontology_pagerank(const Ontology& o) {
  CentralityResult result;

  std::map<std::string, RelType> rel_type;
  for (const auto& r : o.relationships) rel_type[r.name] = r.type;

  std::set<EdgeTuple> edges;
  for (const auto& r : o.relationships) edges.insert({r.name, r.src, r.dst});

  // Dissolve union concepts outermost-first so nested unions relay the outer
  // concept's relationships all the way down to concrete members.
  std::set<std::string> pending;
  for (const auto& r : o.relationships)
    if (r.type == RelType::Union) pending.insert(r.src);
  std::set<std::string> removed;
  while (!pending.empty()) {
    std::string chosen;
    for (const auto& u : pending) {
      bool nested = false;
      for (const auto& r : o.relationships)
        if (r.type == RelType::Union && r.dst == u && pending.count(r.src)) {
          nested = true;
          break;
        }
      if (!nested) {
        chosen = u;
        break;
      }
    }
    if (chosen.empty()) chosen = *pending.begin();  // cycle guard; cannot hit
    std::vector<EdgeTuple> incident;
    for (const auto& e : edges)
      if (std::get<1>(e) == chosen || std::get<2>(e) == chosen)
        incident.push_back(e);
    for (const auto& r : o.relationships) {
      if (r.type != RelType::Union || r.src != chosen) continue;
      for (const auto& [rel, s, d] : incident) {
        if (rel_type[rel] == RelType::Union) continue;
        edges.insert({rel, s == chosen ? r.dst : s, d == chosen ? r.dst : d});
      }
    }
    for (const auto& e : incident) edges.erase(e);
    removed.insert(chosen);
    pending.erase(chosen);
  }

  std::set<std::pair<std::string, std::string>> inh;  // parent -> child
  for (auto it = edges.begin(); it != edges.end();) {
    if (rel_type[std::get<0>(*it)] == RelType::Inheritance) {
      inh.insert({std::get<1>(*it), std::get<2>(*it)});
      it = edges.erase(it);
    } else {
      ++it;
    }
  }

  std::vector<std::string> nodes;
  for (const auto& c : o.concepts)
    if (!removed.count(c.name)) nodes.push_back(c.name);
  const std::size_t n = nodes.size();
  if (n == 0) return result;
  std::map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < n; ++i) idx[nodes[i]] = i;

  // Every surviving edge contributes its reverse as well; a self-loop is its
  // own reverse.
  std::map<std::pair<std::size_t, std::size_t>, double> wgt;
  for (const auto& [rel, s, d] : edges) {
    std::size_t si = idx.at(s);
    std::size_t di = idx.at(d);
    wgt[{si, di}] += 1.0;
    if (si != di) wgt[{di, si}] += 1.0;
  }
  std::vector<double> outw(n, 0.0);
  for (const auto& [key, v] : wgt) outw[key.first] += v;

  std::vector<double> pr(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n, 0.0);
  result.converged = false;
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    double dangling = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (outw[i] == 0.0) dangling += pr[i];
    const double base =
        (1.0 - kDamping + kDamping * dangling) / static_cast<double>(n);
    std::fill(next.begin(), next.end(), base);
    for (const auto& [key, v] : wgt)
      next[key.second] += kDamping * pr[key.first] * v / outw[key.first];
    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) delta += std::abs(next[i] - pr[i]);
    pr.swap(next);
    result.iterations = iter + 1;
    if (delta < kTolerance) {
      result.converged = true;
      break;
    }
  }

  for (std::size_t i = 0; i < n; ++i) result.raw_scores[nodes[i]] = pr[i];

  // Children rise to the best score found anywhere up their isA chains.
  std::map<std::string, std::vector<std::string>> parents;
  for (const auto& [p, c] : inh) parents[c].push_back(p);
  std::map<std::string, double> memo;
  std::function<double(const std::string&)> best =
      [&](const std::string& c) -> double {
    auto it = memo.find(c);
    if (it != memo.end()) return it->second;
    double b = result.raw_scores.at(c);
    memo[c] = b;  // breaks accidental cycles; validated ontologies are acyclic
    auto pit = parents.find(c);
    if (pit != parents.end())
      for (const auto& p : pit->second) b = std::max(b, best(p));
    memo[c] = b;
    return b;
  };
  for (const auto& name : nodes) result.scores[name] = best(name);
  return result;
}

double concept_score(const ConceptDef& c, double pr, const Ontology& o,
                     const Workload& w, const OntologyStats& st,
                     Warnings* warnings) {
  double size = size_of_concept(c, o, st, warnings);
  if (size <= 0.0) size = 1.0;
  return pr * af_concept(w, c.name) / size;
}

Result<PropertyGraphSchema> optimize_concept_centric(
    const Ontology& o, std::int64_t budget, double theta1, double theta2,
    const Workload& w, const OntologyStats& st, Warnings* warnings,
    WorkingSchema* schema_out) {
  auto fresh = WorkingSchema::from_ontology(o);
  if (!fresh.ok()) return fresh.error();
  WorkingSchema s = std::move(fresh).value();

  std::vector<std::string> blocked_free = apply_free_rules(s, theta1, theta2);

  CentralityResult pr = ontology_pagerank(o);
  std::vector<std::pair<double, std::string>> order;
  for (const auto& c : o.concepts) {
    auto it = pr.scores.find(c.name);
    double score =
        it == pr.scores.end()
            ? 0.0  // dissolved union concepts rank last
            : concept_score(c, it->second, o, w, st, warnings);
    order.emplace_back(score, c.name);
  }
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });

  std::map<std::pair<RuleKind, std::string>, RuleCandidate> index;
  for (auto& c : rule_candidates(o, st, w, theta1, theta2, warnings))
    index.emplace(std::make_pair(c.kind, c.rel), std::move(c));

  std::int64_t remaining = budget < 0 ? 0 : budget;
  double total_benefit = 0.0;
  std::int64_t total_cost = 0;
  std::set<std::pair<RuleKind, std::string>> committed;
  std::vector<RuleCandidate> deferred;

  // Applies whatever reserved rules have become applicable; a union apply can
  // unblock nested unions and held-back 1:1 merges. The free-rule sweep runs
  // every round: the rule just bought may itself have unblocked a merge even
  // when nothing was reserved.
  auto drain = [&]() -> Result<void> {
    bool progressed = true;
    while (progressed) {
      progressed = false;
      blocked_free = apply_free_rules(s, theta1, theta2);
      for (auto it = deferred.begin(); it != deferred.end();) {
        if (s.applicable(it->kind, it->rel)) {
          auto res = s.apply(it->kind, it->rel, theta1, theta2);
          if (!res.ok()) return res.error();
          it = deferred.erase(it);
          progressed = true;
        } else {
          ++it;
        }
      }
    }
    return {};
  };

  for (const auto& [score, cname] : order) {
    (void)score;
    for (const auto& r : o.relationships) {
      if (r.src != cname && r.dst != cname) continue;
      RuleKind kinds[2];
      std::size_t nk = 1;
      switch (r.type) {
        case RelType::Union: kinds[0] = RuleKind::Union; break;
        case RelType::Inheritance: kinds[0] = RuleKind::Inheritance; break;
        case RelType::OneToMany: kinds[0] = RuleKind::OneToMany; break;
        case RelType::ManyToMany:
          kinds[0] = RuleKind::MnForward;
          kinds[1] = RuleKind::MnBackward;
          nk = 2;
          break;
        case RelType::OneToOne: continue;  // free, handled up front
      }
      for (std::size_t k = 0; k < nk; ++k) {
        auto key = std::make_pair(kinds[k], r.name);
        auto it = index.find(key);
        if (it == index.end() || committed.count(key)) continue;
        const RuleCandidate& cand = it->second;
        if (cand.cost_bytes > remaining) continue;  // skip, keep scanning
        committed.insert(key);
        remaining -= cand.cost_bytes;
        total_cost += cand.cost_bytes;
        total_benefit += cand.benefit;
        if (s.applicable(cand.kind, cand.rel)) {
          auto res = s.apply(cand.kind, cand.rel, theta1, theta2);
          if (!res.ok()) return res.error();
          auto dr = drain();
          if (!dr.ok()) return dr.error();
        } else {
          deferred.push_back(cand);
        }
      }
    }
  }

  auto dr = drain();
  if (!dr.ok()) return dr.error();
  for (const auto& cand : deferred) {
    remaining += cand.cost_bytes;
    total_cost -= cand.cost_bytes;
    total_benefit -= cand.benefit;
    if (warnings != nullptr)
      warnings->push_back("skipped " + cand.label() +
                          ": blocked by an unapplied enclosing rule");
  }
  if (warnings != nullptr)
    for (const auto& rel : blocked_free)
      warnings->push_back("skipped ONE_TO_ONE " + rel +
                          ": endpoint held by an unapplied union");

  PropertyGraphSchema pgs = generate_pgs(s);
  pgs.budget_report.cost_bytes = total_cost;
  pgs.budget_report.benefit_score = total_benefit;
  if (schema_out != nullptr) *schema_out = std::move(s);
  return pgs;
}

}  // namespace pgso
