// Copyright 2026 The lodbridge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <random>

#include "lodbridge/catalog/model.hpp"
#include "lodbridge/common/error.hpp"
#include "lodbridge/common/json.hpp"
#include "lodbridge/dcat/graph.hpp"
#include "lodbridge/dcat/mapping.hpp"
#include "lodbridge/dcat/shapes.hpp"
#include "oracles.hpp"

using namespace lodbridge;
using namespace lodbridge::dcat;

namespace {

const std::string kFixtures = LODBRIDGE_FIXTURES_DIR;
constexpr std::string_view kPortal = "http://catalog.santander.example";

Term p(std::string_view curie) { return Term::iri(expand(curie)); }

Graph small_graph() {
  Graph g;
  const auto s = Term::iri("http://ex.org/d/1");
  g.add(s, p("rdf:type"), p("dcat:Dataset"));
  g.add(s, p("dct:title"), Term::literal("A \"q\"\nb"));
  g.add(s, p("dcat:keyword"), Term::literal("x", "", "en"));
  g.add(s, p("dcat:byteSize"), Term::literal("12", std::string(ns::xsd) + "decimal"));
  g.add(s, p("dct:publisher"), Term::blank("a"));
  g.add(Term::blank("a"), p("foaf:name"), Term::literal("City"));
  for (const auto& [prefix, iri] : standard_namespaces()) g.bind(prefix, iri);
  return g;
}

// The dataset behind the weather listing.
catalog::DatasetRecord listing_dataset() {
  catalog::DatasetRecord ds;
  ds.id = "santander-aemet-weather";
  ds.title = "Santander AEMET Weather";
  ds.description = "Santander weather in real time";
  ds.organization_id = "aemet";
  ds.tags = {"weather", "aemet"};
  ds.themes = {"http://publications.europa.eu/resource/authority/data-theme/ENVI"};
  ds.issued = parse_timestamp("2021-11-10T15:00:00Z");
  ds.modified = parse_timestamp("2021-11-10T15:05:00Z");
  catalog::Resource r;
  r.id = "urn-weatherobserved-santander";
  r.title = "Santander WeatherObserved Entity";
  r.access_url = "http://broker.santander.example/ngsi-ld/v1/entities/urn%3AWeatherObserved%3ASantander";
  r.format = "JSON";
  r.media_type = "application/ld+json";
  ds.resources = {r};
  return ds;
}

const catalog::Organization kAemet{"aemet", "AEMET", std::nullopt};

}  // namespace

TEST(Graph, RejectsIllFormedTriples) {
  Graph g;
  EXPECT_THROW(g.add(Term::literal("s"), p("dct:title"), Term::literal("x")), Error);
  EXPECT_THROW(g.add(Term::iri("http://s"), Term::blank("p"), Term::literal("x")), Error);
  EXPECT_THROW(g.add(Term::iri("http://s"), p("dct:title"), Term::literal("x", "http://dt", "en")), Error);
  EXPECT_TRUE(g.add(Term::iri("http://s"), p("dct:title"), Term::literal("x")));
  EXPECT_FALSE(g.add(Term::iri("http://s"), p("dct:title"), Term::literal("x")));
}

TEST(Serialize, TurtleGolden) {
  EXPECT_EQ(serialize_turtle(small_graph()),
            "@prefix dcat: <http://www.w3.org/ns/dcat#> .\n"
            "@prefix dct: <http://purl.org/dc/terms/> .\n"
            "@prefix foaf: <http://xmlns.com/foaf/0.1/> .\n"
            "@prefix rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#> .\n"
            "@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .\n"
            "\n"
            "<http://ex.org/d/1>\n"
            "    dct:publisher _:b0 ;\n"
            "    dct:title \"A \\\"q\\\"\\nb\" ;\n"
            "    a dcat:Dataset ;\n"
            "    dcat:byteSize \"12\"^^xsd:decimal ;\n"
            "    dcat:keyword \"x\"@en .\n"
            "\n"
            "_:b0\n"
            "    foaf:name \"City\" .\n");
}

TEST(Serialize, RdfXmlGolden) {
  EXPECT_EQ(serialize_rdfxml(small_graph()),
            "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n"
            "<rdf:RDF\n"
            "  xmlns:dcat=\"http://www.w3.org/ns/dcat#\"\n"
            "  xmlns:dct=\"http://purl.org/dc/terms/\"\n"
            "  xmlns:foaf=\"http://xmlns.com/foaf/0.1/\"\n"
            "  xmlns:rdf=\"http://www.w3.org/1999/02/22-rdf-syntax-ns#\"\n"
            "  xmlns:xsd=\"http://www.w3.org/2001/XMLSchema#\">\n"
            "  <dcat:Dataset rdf:about=\"http://ex.org/d/1\">\n"
            "    <dct:publisher rdf:nodeID=\"b0\"/>\n"
            "    <dct:title>A \"q\"\nb</dct:title>\n"
            "    <dcat:byteSize rdf:datatype=\"http://www.w3.org/2001/XMLSchema#decimal\">12</dcat:byteSize>\n"
            "    <dcat:keyword xml:lang=\"en\">x</dcat:keyword>\n"
            "  </dcat:Dataset>\n"
            "  <rdf:Description rdf:nodeID=\"b0\">\n"
            "    <foaf:name>City</foaf:name>\n"
            "  </rdf:Description>\n"
            "</rdf:RDF>\n");
}

TEST(Serialize, OutputIsDeterministic) {
  const auto g = small_graph();
  Graph reversed;
  for (auto it = g.triples().rbegin(); it != g.triples().rend(); ++it) reversed.add(*it);
  for (const auto& [prefix, iri] : g.namespaces()) reversed.bind(prefix, iri);
  EXPECT_EQ(serialize_turtle(reversed), serialize_turtle(g));
  EXPECT_EQ(serialize_rdfxml(reversed), serialize_rdfxml(g));
}

TEST(Serialize, RandomGraphsRoundTripInBothFormats) {
  std::mt19937 rng(5);
  for (int n = 0; n < 150; ++n) {
    const auto g = lodbridge::testing::random_graph(rng, 12);
    for (const auto f : {Format::turtle, Format::rdfxml}) {
      const auto back = parse(serialize(g, f), f);
      EXPECT_EQ(back.size(), g.size()) << n;
      EXPECT_TRUE(isomorphic(back, g)) << n << "\n" << serialize(g, f);
      EXPECT_TRUE(lodbridge::testing::brute_isomorphic(back, g)) << n;
    }
  }
}

TEST(Isomorphism, AgreesWithBruteForce) {
  std::mt19937 rng(8);
  for (int n = 0; n < 200; ++n) {
    const auto a = lodbridge::testing::random_graph(rng, 8);
    auto b = a;
    if (n % 2 && !b.empty()) {
      // Perturb one triple's object.
      auto t = *b.begin();
      b.remove(t);
      t.object = Term::literal("perturbed");
      b.add(t);
    }
    EXPECT_EQ(isomorphic(a, b), lodbridge::testing::brute_isomorphic(a, b)) << n;
  }
}

TEST(Parse, SyntaxErrorsCarryPositions) {
  try {
    parse_turtle("@prefix ex: <http://ex.org/> .\nex:a ex:b \"open .\n");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_GT(e.column(), 0u);
  }
  EXPECT_THROW(parse_turtle("undeclared:a <http://x> <http://y> ."), SyntaxError);
  EXPECT_THROW(parse_rdfxml("<rdf:RDF xmlns:rdf=\"http://www.w3.org/1999/02/22-rdf-syntax-ns#\">"), SyntaxError);
}

TEST(Parse, ListingLiteralsAreTrimmed) {
  const auto g = parse_rdfxml(read_text_file(kFixtures + "/weather.rdf"));
  const auto ds = Term::iri(dataset_iri(kPortal, "santander-aemet-weather"));
  EXPECT_EQ(g.objects(ds, p("dct:title")), std::vector<Term>{Term::literal("Santander AEMET Weather")});
  EXPECT_EQ(g.objects(ds, p("dcat:keyword")).size(), 2u);
}

TEST(Mapping, ApProfileContainsTheListing) {
  const auto listing = parse_rdfxml(read_text_file(kFixtures + "/weather.rdf"));
  const auto ours = dataset_to_dcat(listing_dataset(), kAemet, Profile::dcat_ap, kPortal);
  std::vector<Triple> extra;
  for (const auto& t : ours) {
    if (!listing.contains(t)) extra.push_back(t);
  }
  for (const auto& t : listing) EXPECT_TRUE(ours.contains(t)) << t.subject.to_ntriples() << " " << t.predicate.to_ntriples();
  // Only the AP dates are added.
  ASSERT_EQ(extra.size(), 2u);
  EXPECT_EQ(extra[0].predicate, p("dct:issued"));
  EXPECT_EQ(extra[1].predicate, p("dct:modified"));
  EXPECT_EQ(extra[0].object.to_ntriples(), "\"2021-11-10T15:00:00.00Z\"^^<http://www.w3.org/2001/XMLSchema#dateTime>");
}

TEST(Mapping, PlainProfileUsesLiteralFormats) {
  const auto g = dataset_to_dcat(listing_dataset(), kAemet, Profile::dcat, kPortal);
  const auto dist = Term::iri(distribution_iri(kPortal, "santander-aemet-weather", "urn-weatherobserved-santander"));
  EXPECT_EQ(g.objects(dist, p("dct:format")), std::vector<Term>{Term::literal("JSON")});
  EXPECT_TRUE(g.objects(Term::iri(dataset_iri(kPortal, "santander-aemet-weather")), p("dct:issued")).empty());
}

TEST(Mapping, LicenseLookup) {
  auto ds = listing_dataset();
  ds.license_id = "cc-by-4.0";
  const auto node = Term::iri(dataset_iri(kPortal, ds.id));
  auto licenses = dataset_to_dcat(ds, kAemet, Profile::dcat_ap, kPortal).objects(node, p("dct:license"));
  ASSERT_EQ(licenses.size(), 1u);
  EXPECT_EQ(licenses[0].value, *LicenseTable::bundled().iri("cc-by-4.0"));
  ds.license_id = "made-up";
  EXPECT_TRUE(dataset_to_dcat(ds, kAemet, Profile::dcat_ap, kPortal).objects(node, p("dct:license")).empty());
}

TEST(Mapping, CatalogGraphContainsEachDatasetGraph) {
  auto second = listing_dataset();
  second.id = "traffic";
  second.title = "Traffic";
  const std::vector<catalog::DatasetRecord> datasets = {listing_dataset(), second};
  const std::map<std::string, catalog::Organization> orgs = {{"aemet", kAemet}};
  const PortalIdentity portal{std::string(kPortal), "Portal", "Open data", "City"};
  for (const auto profile : {Profile::dcat, Profile::dcat_ap}) {
    const auto cat = catalog_to_dcat(datasets, orgs, portal, profile);
    for (const auto& ds : datasets) {
      for (const auto& t : dataset_to_dcat(ds, kAemet, profile, kPortal)) EXPECT_TRUE(cat.contains(t));
      EXPECT_TRUE(cat.contains({Term::iri(catalog_iri(kPortal)), p("dcat:dataset"), Term::iri(dataset_iri(kPortal, ds.id))}));
    }
    EXPECT_TRUE(validate_shapes(cat, ShapeSet::bundled()).conforms());
  }
}

TEST(Shapes, MinCountMaxCountAndNodeKind) {
  const auto good = dataset_to_dcat(listing_dataset(), kAemet, Profile::dcat_ap, kPortal);
  ASSERT_TRUE(validate_shapes(good, ShapeSet::bundled()).conforms());
  const auto ds = Term::iri(dataset_iri(kPortal, "santander-aemet-weather"));

  auto no_title = good;
  no_title.remove({ds, p("dct:title"), Term::literal("Santander AEMET Weather")});
  auto report = validate_shapes(no_title, ShapeSet::bundled());
  ASSERT_EQ(report.failures(), 1u);

  auto literal_title_iri = good;
  literal_title_iri.add(ds, p("dct:title"), Term::iri("http://not-a-literal"));
  report = validate_shapes(literal_title_iri, ShapeSet::bundled());
  ASSERT_EQ(report.failures(), 1u);

  Graph catalog_graph;
  const auto cat = Term::iri(catalog_iri(kPortal));
  catalog_graph.add(cat, p("rdf:type"), p("dcat:Catalog"));
  catalog_graph.add(cat, p("dct:title"), Term::literal("t"));
  catalog_graph.add(cat, p("dct:description"), Term::literal("d"));
  catalog_graph.add(cat, p("dct:publisher"), Term::iri("http://a"));
  EXPECT_TRUE(validate_shapes(catalog_graph, ShapeSet::bundled()).conforms());
  catalog_graph.add(cat, p("dct:publisher"), Term::iri("http://b"));
  report = validate_shapes(catalog_graph, ShapeSet::bundled());
  ASSERT_EQ(report.failures(), 1u);
  for (const auto& r : report.results) {
    if (!r.passed) {
      EXPECT_EQ(r.component, "maxCount");
      EXPECT_EQ(r.value_count, 2u);
    }
  }
}

TEST(Shapes, FocusRestrictsTheCheck) {
  Graph g;
  const auto a = Term::iri("http://ex.org/a");
  const auto b = Term::iri("http://ex.org/b");
  g.add(a, p("rdf:type"), p("dcat:Dataset"));
  g.add(b, p("rdf:type"), p("dcat:Dataset"));
  g.add(a, p("dct:title"), Term::literal("t"));
  g.add(a, p("dct:description"), Term::literal("d"));
  EXPECT_TRUE(validate_shapes(g, ShapeSet::bundled(), a).conforms());
  EXPECT_EQ(validate_shapes(g, ShapeSet::bundled(), b).failures(), 2u);
}

TEST(Shapes, InvertedBoundsAreRejected) {
  ShapeSet set;
  set.shapes.push_back({"s", expand("dcat:Dataset"), {{expand("dct:title"), 2, 1, std::nullopt, std::nullopt}}});
  EXPECT_THROW(set.check(), Error);
}
