#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <gtest/gtest.h>

#include "pgso/centrality.hpp"
#include "pgso/cost_model.hpp"
#include "pgso/graph_bench.hpp"
#include "pgso/optimizer.hpp"
#include "support/generators.hpp"

namespace pgso {
namespace {

// One acceptance criterion: collects failed checks, enforces a wall-clock
// limit, and always prints exactly one PASS/FAIL line.
class Criterion {
 public:
  Criterion(int number, std::string label)
      : number_(number),
        label_(std::move(label)),
        start_(std::chrono::steady_clock::now()) {}

  void expect(bool ok, const std::string& what) {
    if (!ok) problems_.push_back(what);
  }

  void finish(double limit_seconds) {
    double elapsed = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start_)
                         .count();
    if (elapsed >= limit_seconds)
      problems_.push_back("took " + std::to_string(elapsed) + "s, limit " +
                          std::to_string(limit_seconds) + "s");
    bool pass = problems_.empty();
    std::printf("ACCEPTANCE %d %s: %s\n", number_, label_.c_str(),
                pass ? "PASS" : "FAIL");
    std::fflush(stdout);
    std::string detail;
    for (const auto& p : problems_) detail += p + "\n";
    EXPECT_TRUE(pass) << detail;
  }

 private:
  int number_;
  std::string label_;
  std::vector<std::string> problems_;
  std::chrono::steady_clock::time_point start_;
};

std::string fixture(const std::string& name) {
  std::ifstream in(std::string(FIXTURE_DIR) + "/" + name);
  EXPECT_TRUE(in.good()) << name;
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Ontology med_ontology() {
  auto o = parse_ontology(fixture("med_ontology.json"));
  EXPECT_TRUE(o.ok());
  return std::move(o).value();
}

// The uniqueness claim is about the produced schema: working-state internals
// (ghost relays, flow instancing) may record different application histories.
std::string canon(const WorkingSchema& ws) {
  return canonicalize(generate_pgs(ws));
}

TEST(Acceptance, C1RewriteOrderIndependence) {
  Criterion c(1, "rewrite order independence");
  int pairs = 0;
  for (std::uint64_t seed = 0; seed < 70; ++seed) {
    Ontology o = testgen::random_ontology(seed);
    auto base = optimize_unconstrained(o);
    c.expect(base.ok(), "seed " + std::to_string(seed) + " failed to converge");
    if (!base.ok()) continue;
    std::string want = canon(base.value());
    for (std::uint64_t k = 1; k <= 3; ++k) {
      OptimizeOptions opts;
      opts.shuffle_seed = seed * 97 + k;
      auto got = optimize_unconstrained(o, opts);
      c.expect(got.ok() && canon(got.value()) == want,
               "seed " + std::to_string(seed) + " permutation " +
                   std::to_string(k) + " produced a different schema");
      ++pairs;
    }
  }
  for (const auto& f : testgen::interleaving_fixtures()) {
    auto base = optimize_unconstrained(f.ontology);
    c.expect(base.ok(), f.name + " failed to converge");
    if (!base.ok()) continue;
    std::string want = canon(base.value());
    for (std::uint64_t k = 1; k <= 6; ++k) {
      OptimizeOptions opts;
      opts.shuffle_seed = 1000 + k;
      auto got = optimize_unconstrained(f.ontology, opts);
      c.expect(got.ok() && canon(got.value()) == want,
               f.name + " permutation " + std::to_string(k) +
                   " produced a different schema");
      ++pairs;
    }
  }
  c.expect(pairs >= 200, "only " + std::to_string(pairs) + " pairs exercised");
  c.finish(30.0);
}

TEST(Acceptance, C2FullBudgetConvergence) {
  Criterion c(2, "full-budget convergence");
  std::vector<std::pair<std::string, Ontology>> cases;
  cases.emplace_back("med", med_ontology());
  cases.emplace_back("fin", testgen::fin_scale_ontology());
  for (const auto& [name, o] : cases) {
    ModelTotals totals = model_totals(o, {}, {}, 0.66, 0.33);
    auto nsc = optimize_unconstrained(o);
    c.expect(nsc.ok(), name + ": unconstrained run failed");
    if (!nsc.ok()) continue;
    std::string want = canonicalize(generate_pgs(nsc.value()));

    auto rc = optimize_relation_centric(o, totals.cost_bytes, 0.66, 0.33, 0.1,
                                        {}, {});
    c.expect(rc.ok() && canonicalize(rc.value()) == want,
             name + ": knapsack strategy at full budget != fixpoint schema");

    auto cc = optimize_concept_centric(o, totals.cost_bytes, 0.66, 0.33, {},
                                       {});
    c.expect(cc.ok() && canonicalize(cc.value()) == want,
             name + ": centrality strategy at full budget != fixpoint schema");
  }
  c.finish(5.0);
}

TEST(Acceptance, C3KnapsackApproximationBound) {
  Criterion c(3, "knapsack approximation bound");
  std::mt19937_64 rng(20240817);
  std::uniform_real_distribution<double> benefit_dist(0.05, 8.0);
  for (int trial = 0; trial < 100; ++trial) {
    int n = 1 + static_cast<int>(rng() % 15);
    std::vector<RuleCandidate> items(n);
    std::int64_t total = 0;
    for (int i = 0; i < n; ++i) {
      items[i].rel = "r" + std::to_string(trial) + "_" + std::to_string(i);
      items[i].benefit = benefit_dist(rng);
      items[i].cost_bytes = static_cast<std::int64_t>(rng() % 51);
      total += items[i].cost_bytes;
    }
    std::int64_t budget =
        total > 0 ? static_cast<std::int64_t>(rng() % (total + 1)) : 0;

    double best = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      double b = 0.0;
      std::int64_t w = 0;
      for (int i = 0; i < n; ++i)
        if (mask & (1u << i)) {
          b += items[i].benefit;
          w += items[i].cost_bytes;
        }
      if (w <= budget) best = std::max(best, b);
    }

    for (double eps : {0.3, 0.1, 0.01}) {
      auto sel = knapsack_fptas(items, budget, eps);
      double got = 0.0;
      std::int64_t spent = 0;
      for (std::size_t i : sel) {
        got += items[i].benefit;
        spent += items[i].cost_bytes;
      }
      c.expect(spent <= budget, "trial " + std::to_string(trial) +
                                    ": selection exceeds the budget");
      c.expect(got >= (1.0 - eps) * best - 1e-9,
               "trial " + std::to_string(trial) + " eps " +
                   std::to_string(eps) + ": " + std::to_string(got) + " < (1-" +
                   std::to_string(eps) + ")*" + std::to_string(best));
    }
  }
  c.finish(60.0);
}

struct MedRun {
  Ontology ontology;
  InstanceData data;
  std::vector<QueryTemplate> templates;
  BenchReport report;
  bool ok = false;
};

MedRun run_med_bench(const Ontology& o, const InstanceData& data) {
  MedRun r;
  r.ontology = o;
  r.data = data;
  auto t = parse_templates(fixture("med_templates.json"));
  if (!t.ok()) return r;
  r.templates = std::move(t).value();
  auto plain = WorkingSchema::from_ontology(o);
  auto opt = optimize_unconstrained(o);
  if (!plain.ok() || !opt.ok()) return r;
  auto dir_graph = load_instances(data, plain.value());
  auto opt_graph = load_instances(data, opt.value());
  if (!dir_graph.ok() || !opt_graph.ok()) return r;
  auto rep = compare(dir_graph.value(), opt_graph.value(), r.templates);
  if (!rep.ok()) return r;
  r.report = std::move(rep).value();
  r.ok = true;
  return r;
}

const BenchRow* row_named(const BenchReport& rep, const std::string& name) {
  for (const auto& row : rep.rows)
    if (row.name == name) return &row;
  return nullptr;
}

TEST(Acceptance, C4TraversalReduction) {
  Criterion c(4, "traversal reduction");
  auto d = parse_instances(fixture("med_instances.json"));
  ASSERT_TRUE(d.ok());
  MedRun r = run_med_bench(med_ontology(), d.value());
  c.expect(r.ok, "bench pipeline failed");
  if (r.ok) {
    const BenchRow* parent = row_named(r.report, "parent_lookup");
    const BenchRow* fanout = row_named(r.report, "fanout_count");
    const BenchRow* two_hop = row_named(r.report, "union_2hop");
    const BenchRow* self = row_named(r.report, "self_lookup");
    c.expect(parent && parent->trav_dir > 0 && parent->trav_opt == 0,
             "parent property lookup still traverses after rewriting");
    c.expect(fanout && fanout->trav_opt == 0,
             "aggregation over a replicated list still traverses");
    c.expect(two_hop && two_hop->trav_opt < two_hop->trav_dir,
             "2-hop through a dissolved union did not get cheaper");
    c.expect(self && self->trav_dir == 0 && self->trav_opt == 0,
             "self property lookup should traverse nothing");
  }
  c.finish(5.0);
}

// Nested-loop evaluation straight off the instance rows; no schemas, no
// materialization. The baseline graph must agree with it exactly.
std::string naive_answer(const Ontology& o, const InstanceData& d,
                         const QueryTemplate& q) {
  std::map<std::string, std::map<std::string, const RawVertex*>> rows_of;
  for (const auto& v : d.vertices) rows_of[v.concept_name][v.id] = &v;
  std::set<std::tuple<std::string, std::string, std::string>> edges;
  for (const auto& e : d.edges) edges.insert({e.rel, e.src, e.dst});

  auto neighbors = [&](const std::string& rel, HopDir dir,
                       const std::string& concept_name, const std::string& id) {
    std::vector<std::pair<std::string, std::string>> out;  // (concept, id)
    const Relationship* r = o.find_relationship(rel);
    if (!r) return out;
    for (const auto& [er, es, ed] : edges) {
      if (er != rel) continue;
      if (dir == HopDir::ToDst) {
        if (r->src == concept_name && es == id) out.emplace_back(r->dst, ed);
      } else {
        if (r->dst == concept_name && ed == id) out.emplace_back(r->src, es);
      }
    }
    return out;
  };

  if (q.kind == QueryKind::Pattern2Hop) {
    std::set<std::pair<std::string, std::string>> bindings;
    for (const auto& [id, row] : rows_of[q.start]) {
      (void)row;
      for (const auto& [c1, id1] : neighbors(q.hops[0].rel, q.hops[0].dir,
                                             q.start, id))
        for (const auto& [c2, id2] :
             neighbors(q.hops[1].rel, q.hops[1].dir, c1, id1)) {
          (void)c2;
          bindings.insert({id, id2});
        }
    }
    return std::to_string(bindings.size());
  }

  std::string owner, prop;
  if (!q.property.empty()) {
    auto dot = q.property.find('.');
    owner = q.property.substr(0, dot);
    prop = q.property.substr(dot + 1);
  }

  std::map<std::string, std::string> rows;
  for (const auto& [id, row] : rows_of[q.start]) {
    if (q.kind == QueryKind::AggregateCount) {
      rows[id] = std::to_string(neighbors(q.rel, q.dir, q.start, id).size());
      continue;
    }
    std::vector<std::string> vals;
    auto add_value = [&](const RawVertex* v) {
      auto it = v->properties.find(prop);
      if (it != v->properties.end() && !it->second.is_null())
        vals.push_back(it->second.dump());
    };
    if (q.rel.empty()) {
      if (q.start == owner) add_value(row);
    } else {
      for (const auto& [nc, nid] : neighbors(q.rel, q.dir, q.start, id)) {
        if (nc != owner) continue;
        add_value(rows_of[nc][nid]);
      }
    }
    std::sort(vals.begin(), vals.end());
    std::string s = "[";
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (i) s += ",";
      s += vals[i];
    }
    rows[id] = s + "]";
  }

  std::string out;
  for (const auto& [k, v] : rows) {
    if (!out.empty()) out += "; ";
    out += k + "=" + v;
  }
  return out;
}

TEST(Acceptance, C5AnswerEquivalence) {
  Criterion c(5, "answer equivalence");
  Ontology o = med_ontology();
  std::vector<std::pair<std::string, InstanceData>> datasets;
  auto shipped = parse_instances(fixture("med_instances.json"));
  ASSERT_TRUE(shipped.ok());
  datasets.emplace_back("shipped", std::move(shipped).value());
  datasets.emplace_back("synthetic small", testgen::synth_instances(o, 40, 3));
  datasets.emplace_back("synthetic medium",
                        testgen::synth_instances(o, 120, 5));

  for (const auto& [name, data] : datasets) {
    c.expect(data.edges.size() <= 10000,
             name + ": oracle needs <= 10^4 edges, got " +
                 std::to_string(data.edges.size()));
    c.expect(validate_instances(data, o).ok(), name + ": invalid data");
    MedRun r = run_med_bench(o, data);
    c.expect(r.ok, name + ": bench pipeline failed");
    if (!r.ok) continue;
    for (const auto& row : r.report.rows) {
      c.expect(!row.mismatch, name + " " + row.name +
                                  ": optimized answer diverges (dir=" +
                                  row.answer_dir + " opt=" + row.answer_opt +
                                  ")");
      const QueryTemplate* q = nullptr;
      for (const auto& t : r.templates)
        if (t.name == row.name) q = &t;
      ASSERT_NE(q, nullptr);
      std::string want = naive_answer(o, data, *q);
      c.expect(row.answer_dir == want,
               name + " " + row.name + ": baseline answer " + row.answer_dir +
                   " != join oracle " + want);
    }
  }
  c.finish(30.0);
}

TEST(Acceptance, C6BudgetMonotonicity) {
  Criterion c(6, "budget monotonicity");
  Ontology fin = testgen::fin_scale_ontology();
  auto items = rule_candidates(fin, {}, {}, 0.66, 0.33);
  c.expect(!items.empty(), "no candidates priced");
  std::int64_t total = 0;
  for (const auto& it : items) total += it.cost_bytes;
  double prev = -1.0;
  for (int step = 0; step < 20; ++step) {
    std::int64_t budget = total * step / 19;
    auto sel = knapsack_fptas(items, budget, 0.1);
    double benefit = 0.0;
    std::int64_t spent = 0;
    for (std::size_t i : sel) {
      benefit += items[i].benefit;
      spent += items[i].cost_bytes;
    }
    c.expect(spent <= budget, "step " + std::to_string(step) +
                                  ": selection exceeds the budget");
    c.expect(benefit >= prev - 1e-9,
             "step " + std::to_string(step) + ": benefit dropped from " +
                 std::to_string(prev) + " to " + std::to_string(benefit));
    prev = std::max(prev, benefit);
  }
  c.finish(10.0);
}

TEST(Acceptance, C7PagerankProperties) {
  Criterion c(7, "pagerank properties");
  // Symmetric two-concept case has the closed-form split.
  {
    Ontology o;
    o.concepts.push_back(testgen::concept_def("A", {}));
    o.concepts.push_back(testgen::concept_def("B", {}));
    o.relationships.push_back(testgen::rel("r", "A", "B", RelType::ManyToMany));
    CentralityResult pr = ontology_pagerank(o);
    c.expect(std::abs(pr.raw_scores.at("A") - 0.5) <= 1e-9 &&
                 std::abs(pr.raw_scores.at("B") - 0.5) <= 1e-9,
             "symmetric pair should split the mass evenly");
  }
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Ontology o = testgen::random_ontology(seed);
    CentralityResult pr = ontology_pagerank(o);
    double sum = 0.0;
    for (const auto& [name, v] : pr.raw_scores) sum += v;
    c.expect(std::abs(sum - 1.0) <= 1e-9,
             "seed " + std::to_string(seed) + ": raw scores sum to " +
                 std::to_string(sum));
    for (const auto& [name, v] : pr.scores) {
      c.expect(v >= pr.raw_scores.at(name) - 1e-12,
               "seed " + std::to_string(seed) + ": propagation lowered " +
                   name);
    }
  }
  c.finish(5.0);
}

TEST(Acceptance, C8OptimizerRuntime) {
  Criterion c(8, "optimizer runtime");
  Ontology fin = testgen::fin_scale_ontology();
  ModelTotals totals = model_totals(fin, {}, {}, 0.66, 0.33);
  std::int64_t budget = totals.cost_bytes / 2;

  auto t0 = std::chrono::steady_clock::now();
  auto rc = optimize_relation_centric(fin, budget, 0.66, 0.33, 0.1, {}, {});
  auto t1 = std::chrono::steady_clock::now();
  auto cc = optimize_concept_centric(fin, budget, 0.66, 0.33, {}, {});
  auto t2 = std::chrono::steady_clock::now();

  double rc_s = std::chrono::duration<double>(t1 - t0).count();
  double cc_s = std::chrono::duration<double>(t2 - t1).count();
  c.expect(rc.ok(), "knapsack strategy failed");
  c.expect(cc.ok(), "centrality strategy failed");
  c.expect(rc_s < 1.0, "knapsack strategy took " + std::to_string(rc_s) + "s");
  c.expect(cc_s < 1.0,
           "centrality strategy took " + std::to_string(cc_s) + "s");
  c.finish(5.0);
}

}  // namespace
}  // namespace pgso
