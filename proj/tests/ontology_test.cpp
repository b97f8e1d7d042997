#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "pgso/ontology.hpp"
#include "support/generators.hpp"

namespace pgso {
namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fixture(const std::string& name) {
  return slurp(std::string(FIXTURE_DIR) + "/" + name);
}

TEST(OntologyParse, MedFixture) {
  auto r = parse_ontology(fixture("med_ontology.json"));
  ASSERT_TRUE(r.ok()) << r.error().message;
  const Ontology& o = r.value();
  EXPECT_EQ(o.concepts.size(), 9u);
  EXPECT_EQ(o.relationships.size(), 8u);

  const ConceptDef* drug = o.find_concept("Drug");
  ASSERT_NE(drug, nullptr);
  ASSERT_EQ(drug->properties.size(), 2u);
  EXPECT_EQ(drug->properties[1].name, "rxcui");
  EXPECT_EQ(drug->properties[1].type, ValueType::Int);
  EXPECT_EQ(drug->properties[1].origin, "Drug");
  EXPECT_FALSE(drug->properties[1].is_list());

  const Relationship* takes = o.find_relationship("takes");
  ASSERT_NE(takes, nullptr);
  EXPECT_EQ(takes->src, "Person");
  EXPECT_EQ(takes->dst, "Consumable");
  EXPECT_EQ(takes->type, RelType::ManyToMany);

  EXPECT_EQ(o.concept_index("Person"), 0);
  EXPECT_EQ(o.concept_index("Nope"), -1);
  EXPECT_EQ(o.find_relationship("nope"), nullptr);
}

TEST(OntologyParse, MalformedJson) {
  EXPECT_EQ(parse_ontology("{nope").error().code, ErrorCode::MalformedJson);
  EXPECT_EQ(parse_ontology("{}").error().code, ErrorCode::MalformedJson);
  EXPECT_EQ(parse_ontology("[1,2]").error().code, ErrorCode::MalformedJson);
}

TEST(OntologyParse, UnknownEndpoint) {
  auto r = parse_ontology(R"({
    "concepts": [{"name": "A", "properties": []}],
    "relationships": [{"name": "r", "src": "A", "dst": "Ghost", "type": "ONE_TO_MANY"}]})");
  EXPECT_EQ(r.error().code, ErrorCode::UnknownConceptRef);
}

TEST(OntologyParse, DuplicateNames) {
  auto dup_concept = parse_ontology(R"({
    "concepts": [{"name": "A"}, {"name": "A"}],
    "relationships": []})");
  EXPECT_EQ(dup_concept.error().code, ErrorCode::DuplicateName);

  auto dup_rel = parse_ontology(R"({
    "concepts": [{"name": "A"}, {"name": "B"}],
    "relationships": [
      {"name": "r", "src": "A", "dst": "B", "type": "ONE_TO_MANY"},
      {"name": "r", "src": "B", "dst": "A", "type": "ONE_TO_MANY"}]})");
  EXPECT_EQ(dup_rel.error().code, ErrorCode::DuplicateName);
}

TEST(OntologyParse, BadTypeStrings) {
  auto bad_prop = parse_ontology(R"({
    "concepts": [{"name": "A", "properties": [{"name": "p", "type": "BLOB"}]}],
    "relationships": []})");
  EXPECT_EQ(bad_prop.error().code, ErrorCode::BadRelType);

  auto bad_rel = parse_ontology(R"({
    "concepts": [{"name": "A"}, {"name": "B"}],
    "relationships": [{"name": "r", "src": "A", "dst": "B", "type": "FRIEND"}]})");
  EXPECT_EQ(bad_rel.error().code, ErrorCode::BadRelType);
}

TEST(OntologyParse, CycleDetection) {
  auto isa_cycle = parse_ontology(R"({
    "concepts": [{"name": "A"}, {"name": "B"}],
    "relationships": [
      {"name": "r1", "src": "A", "dst": "B", "type": "INHERITANCE"},
      {"name": "r2", "src": "B", "dst": "A", "type": "INHERITANCE"}]})");
  EXPECT_EQ(isa_cycle.error().code, ErrorCode::CycleDetected);

  auto union_cycle = parse_ontology(R"({
    "concepts": [{"name": "A"}, {"name": "B"}],
    "relationships": [
      {"name": "r1", "src": "A", "dst": "B", "type": "UNION"},
      {"name": "r2", "src": "B", "dst": "A", "type": "UNION"}]})");
  EXPECT_EQ(union_cycle.error().code, ErrorCode::CycleDetected);
}

TEST(OntologyParse, UnionConceptPropertyPolicy) {
  const char* text = R"({
    "concepts": [
      {"name": "U", "properties": [{"name": "p", "type": "STRING"}]},
      {"name": "M"}],
    "relationships": [{"name": "u", "src": "U", "dst": "M", "type": "UNION"}]})";
  EXPECT_EQ(parse_ontology(text).error().code, ErrorCode::ConstraintViolation);

  ParseOptions opts;
  opts.allow_union_props = true;
  EXPECT_TRUE(parse_ontology(text, opts).ok());
}

TEST(OntologyParse, RoundTrip) {
  auto med = parse_ontology(fixture("med_ontology.json"));
  ASSERT_TRUE(med.ok());
  auto again = parse_ontology(serialize_ontology(med.value()));
  ASSERT_TRUE(again.ok());
  EXPECT_EQ(ontology_fingerprint(med.value()),
            ontology_fingerprint(again.value()));
}

TEST(OntologyParse, FingerprintSeparatesOntologies) {
  auto med = parse_ontology(fixture("med_ontology.json"));
  ASSERT_TRUE(med.ok());
  Ontology tweaked = med.value();
  tweaked.concepts[0].properties.push_back(
      testgen::prop("Person", "age", ValueType::Int));
  EXPECT_NE(ontology_fingerprint(med.value()), ontology_fingerprint(tweaked));
}

// The generators feed the order-independence sweeps; everything they emit
// must survive the full parser (cycles, duplicates, union-property policy).
TEST(Generators, EmitParseableOntologies) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Ontology o = testgen::random_ontology(seed);
    auto back = parse_ontology(serialize_ontology(o));
    ASSERT_TRUE(back.ok()) << "seed " << seed << ": " << back.error().message;
    EXPECT_EQ(ontology_fingerprint(o), ontology_fingerprint(back.value()));
  }
}

TEST(Generators, FinScaleShape) {
  Ontology o = testgen::fin_scale_ontology();
  EXPECT_EQ(o.concepts.size(), 28u);
  ASSERT_EQ(o.relationships.size(), 138u);
  int unions = 0, inh = 0, otm = 0, mn = 0, oto = 0;
  for (const auto& r : o.relationships) {
    switch (r.type) {
      case RelType::Union: ++unions; break;
      case RelType::Inheritance: ++inh; break;
      case RelType::OneToMany: ++otm; break;
      case RelType::ManyToMany: ++mn; break;
      case RelType::OneToOne: ++oto; break;
    }
  }
  EXPECT_EQ(unions, 4);
  EXPECT_EQ(inh, 69);
  EXPECT_EQ(otm, 30);
  EXPECT_EQ(mn, 30);
  EXPECT_EQ(oto, 5);
  EXPECT_TRUE(parse_ontology(serialize_ontology(o)).ok());
}

TEST(Sizes, ScalarWidths) {
  EXPECT_DOUBLE_EQ(scalar_byte_size(ValueType::Int), 8.0);
  EXPECT_DOUBLE_EQ(scalar_byte_size(ValueType::Double), 8.0);
  EXPECT_DOUBLE_EQ(scalar_byte_size(ValueType::Bool), 1.0);
  EXPECT_DOUBLE_EQ(scalar_byte_size(ValueType::Date), 8.0);
  EXPECT_DOUBLE_EQ(scalar_byte_size(ValueType::String), 32.0);
}

TEST(Sizes, ConceptWithIntAndString) {
  Ontology o;
  o.concepts.push_back(testgen::concept_def(
      "A", {{"k", ValueType::Int}, {"s", ValueType::String}}));
  EXPECT_DOUBLE_EQ(size_of_concept(o.concepts[0], o, OntologyStats{}), 40.0);
}

TEST(Sizes, EmptyConceptIsZero) {
  Ontology o;
  o.concepts.push_back(testgen::concept_def("A"));
  EXPECT_DOUBLE_EQ(size_of_concept(o.concepts[0], o, OntologyStats{}), 0.0);
}

// 100 edges spread over 2 holders = average list length 50; 50 strings at
// 32 bytes each.
TEST(Sizes, ListWeighsAverageLength) {
  Ontology o;
  o.concepts.push_back(testgen::concept_def("H"));
  o.concepts.push_back(testgen::concept_def("D", {{"v", ValueType::String}}));
  o.relationships.push_back(
      testgen::rel("r", "H", "D", RelType::OneToMany));
  DataProperty list = testgen::prop("D", "v", ValueType::String);
  list.cardinality = PropCardinality::List;
  list.origin_rel = "r";
  o.concepts[0].properties.push_back(list);

  OntologyStats st;
  st.rel_edge_count["r"] = 100;
  st.concept_cardinality["H"] = 2;
  EXPECT_DOUBLE_EQ(size_of_concept(o.concepts[0], o, st), 1600.0);
}

TEST(Sizes, StatsOverrideHolderBeforeOrigin) {
  Ontology o;
  o.concepts.push_back(testgen::concept_def("H"));
  DataProperty p = testgen::prop("O", "p", ValueType::String);

  OntologyStats st;
  st.property_avg_bytes["O.p"] = 100;
  EXPECT_DOUBLE_EQ(property_byte_size(p, "H", o, st), 100.0);
  st.property_avg_bytes["H.p"] = 200;
  EXPECT_DOUBLE_EQ(property_byte_size(p, "H", o, st), 200.0);
}

TEST(AccessFrequency, UniformWhenEmpty) {
  Workload w;
  EXPECT_TRUE(w.uniform());
  EXPECT_DOUBLE_EQ(af_concept(w, "Drug"), 1.0);
  EXPECT_DOUBLE_EQ(af_relationship(w, "Drug", "treat"), 1.0);
  EXPECT_DOUBLE_EQ(af_rel_property(w, "Drug", "treat", "Indication.desc"), 1.0);
}

TEST(AccessFrequency, SumsMatchingEntries) {
  Workload w;
  w.entries.push_back({"Drug", "treat", std::nullopt, 120.0});
  EXPECT_DOUBLE_EQ(af_relationship(w, "Drug", "treat"), 120.0);
  EXPECT_DOUBLE_EQ(af_relationship(w, "Drug", "other"), 0.0);
  // An entry without a dstProperty speaks for every property of the rel.
  EXPECT_DOUBLE_EQ(af_rel_property(w, "Drug", "treat", "Indication.desc"),
                   120.0);

  w.entries.push_back({"Drug", "treat", std::string("Indication.desc"), 30.0});
  EXPECT_DOUBLE_EQ(af_rel_property(w, "Drug", "treat", "Indication.desc"),
                   150.0);
  EXPECT_DOUBLE_EQ(af_rel_property(w, "Drug", "treat", "Indication.other"),
                   120.0);
}

TEST(AccessFrequency, ConceptCountsSourceAndPropertyOwner) {
  Workload w;
  w.entries.push_back({"A", std::nullopt, std::nullopt, 5.0});
  w.entries.push_back({"B", std::string("r"), std::string("A.x"), 7.0});
  EXPECT_DOUBLE_EQ(af_concept(w, "A"), 12.0);
  EXPECT_DOUBLE_EQ(af_concept(w, "B"), 7.0);
  EXPECT_DOUBLE_EQ(af_concept(w, "C"), 0.0);
}

TEST(Stats, ParsesMedFixture) {
  auto r = parse_stats(fixture("med_stats.json"));
  ASSERT_TRUE(r.ok()) << r.error().message;
  const OntologyStats& st = r.value();
  EXPECT_EQ(st.cardinality("Drug"), 120);
  EXPECT_EQ(st.edge_count("takes"), 140000);
  EXPECT_EQ(st.property_avg_bytes.at("DrugFoodInteraction.note"), 64);
}

TEST(Stats, DefaultsWithWarning) {
  OntologyStats st;
  Warnings w;
  EXPECT_EQ(st.cardinality("Ghost", &w), OntologyStats::kDefaultCardinality);
  EXPECT_EQ(st.edge_count("ghost", &w), OntologyStats::kDefaultEdgeCount);
  ASSERT_EQ(w.size(), 2u);
  EXPECT_NE(w[0].find("default 1000"), std::string::npos);
  EXPECT_NE(w[1].find("default 1000"), std::string::npos);
}

TEST(Stats, RejectsNegativeValues) {
  auto r = parse_stats(R"({"concepts": {"A": {"cardinality": -3}}})");
  EXPECT_EQ(r.error().code, ErrorCode::ConstraintViolation);
  auto r2 = parse_stats(R"({"relationships": {"r": {"edgeCount": -1}}})");
  EXPECT_EQ(r2.error().code, ErrorCode::ConstraintViolation);
}

TEST(WorkloadParse, ParsesMedFixture) {
  auto r = parse_workload(fixture("med_workload.json"));
  ASSERT_TRUE(r.ok()) << r.error().message;
  const Workload& w = r.value();
  ASSERT_EQ(w.entries.size(), 6u);
  EXPECT_FALSE(w.uniform());
  EXPECT_EQ(w.entries[0].src, "Drug");
  ASSERT_TRUE(w.entries[0].rel.has_value());
  EXPECT_EQ(*w.entries[0].rel, "hasIndication");
  ASSERT_TRUE(w.entries[0].dst_property.has_value());
  EXPECT_EQ(*w.entries[0].dst_property, "Indication.desc");
  EXPECT_DOUBLE_EQ(w.entries[0].frequency, 120.0);
  EXPECT_FALSE(w.entries[4].rel.has_value());
}

TEST(WorkloadParse, RejectsNegativeFrequency) {
  auto r = parse_workload(
      R"({"entries": [{"src": "A", "frequency": -2}]})");
  EXPECT_EQ(r.error().code, ErrorCode::ConstraintViolation);
}

}  // namespace
}  // namespace pgso
