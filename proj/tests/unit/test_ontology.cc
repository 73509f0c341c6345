/*!
 *  Copyright (c) 2026 by Contributors
 * \file test_ontology.cc
 */
#include <dialtree/error.h>
#include <dialtree/ontology.h>
#include <doctest.h>

#include <algorithm>

#include "../support.h"

using namespace dialtree;

namespace {

OntologySpec Seed() { return LoadOntology(SeedOntologyText()); }

std::vector<OntologyErrorKind> Kinds(const std::vector<OntologyError>& errors) {
  std::vector<OntologyErrorKind> out;
  for (const auto& e : errors) out.push_back(e.kind);
  return out;
}

}  // namespace

TEST_CASE("seed ontology declarations") {
  OntologySpec spec = Seed();
  CHECK(spec.concepts().size() == 7);
  CHECK(spec.concepts().at("hotel") == ConceptCategory::kDomain);
  CHECK(spec.concepts().at("et") == ConceptCategory::kOperator);
  CHECK(spec.concepts().at("adresse") == ConceptCategory::kGeneralPurpose);
  CHECK(spec.AllowedRelations("adresse") == std::set<std::string>{"ville", "quartier"});
  CHECK(spec.AllowedChildren("chambre", "type") == std::set<std::string>{std::string(kLiteralKind)});
  CHECK(spec.AllowedChildren("hotel", "lieu") == std::set<std::string>{"adresse"});
  CHECK_THROWS_AS(spec.AllowedRelations("zzz"), UnknownConceptError);
  CHECK_THROWS_AS(spec.AllowedChildren("hotel", "zzz"), UnknownRelationError);
  CHECK_THROWS_AS(spec.AllowedChildren("zzz", "lieu"), UnknownConceptError);
}

TEST_CASE("the shipped ontology file equals the embedded seed") {
  OntologySpec file = LoadOntologyFile(testing::FixturePath("../../data/ontology/media_seed.onto"));
  CHECK(file.ToText() == Seed().ToText());
}

TEST_CASE("a concept without relations") {
  OntologySpec spec = LoadOntology(std::string(SeedOntologyText()) + "\nconcept prix general-purpose\n");
  CHECK(spec.AllowedRelations("prix").empty());
}

TEST_CASE("empty and malformed documents") {
  OntologySpec empty = LoadOntology("");
  CHECK(empty.concepts().empty());
  CHECK(Kinds(ValidateTree(empty, ParseAnnotation("(r1 / reservation)"))) ==
        std::vector<OntologyErrorKind>{OntologyErrorKind::kUnknownConcept});
  CHECK_THROWS_AS(LoadOntology("relation hotel lieu adresse\n"), DanglingConceptError);
  CHECK_THROWS_AS(LoadOntology("concept hotel domain\nrelation hotel lieu adresse\n"), DanglingConceptError);
  try {
    LoadOntology("# header\nconcept hotel domain\nconcept x nonsense\n");
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(LoadOntology("concept a domain extra\n"), FormatError);
  CHECK_THROWS_AS(LoadOntology("thing a b\n"), FormatError);
}

TEST_CASE("validation findings") {
  OntologySpec spec = Seed();
  CHECK(ValidateTree(spec, ParseAnnotation(testing::BookingText())).empty());
  CHECK(ValidateTree(spec, MrTree{}).empty());
  CHECK(Kinds(ValidateTree(spec, ParseAnnotation("(x1 / zzz)"))) ==
        std::vector<OntologyErrorKind>{OntologyErrorKind::kUnknownConcept});
  auto rel = ValidateTree(spec, ParseAnnotation("(h1 / hotel :couleur \"rouge\")"));
  REQUIRE(rel.size() == 1);
  CHECK(rel[0].kind == OntologyErrorKind::kUnknownRelation);
  CHECK(rel[0].node == "h1");
  CHECK(Kinds(ValidateTree(spec, ParseAnnotation("(h1 / hotel :lieu (c1 / chambre))"))) ==
        std::vector<OntologyErrorKind>{OntologyErrorKind::kBadChild});
  CHECK(Kinds(ValidateTree(spec, ParseAnnotation("(h1 / hotel :lieu \"Paris\")"))) ==
        std::vector<OntologyErrorKind>{OntologyErrorKind::kBadLiteralSlot});
  CHECK(Kinds(ValidateTree(spec, ParseAnnotation("(a1 / adresse :ville (c1 / chambre))"))) ==
        std::vector<OntologyErrorKind>{OntologyErrorKind::kBadChild});
}

TEST_CASE("references are admissible wherever a concept child is") {
  OntologySpec spec = Seed();
  CHECK(spec.AdmitsRef("reservation", "objet"));
  CHECK_FALSE(spec.AdmitsRef("chambre", "type"));
  CHECK(ValidateTree(spec, ParseAnnotation("(r2 / reservation :objet h1)")).empty());
  CHECK(Kinds(ValidateTree(spec, ParseAnnotation("(c2 / chambre :type c1)"))) ==
        std::vector<OntologyErrorKind>{OntologyErrorKind::kBadChild});
}

TEST_CASE("property: removing an edge never adds findings about the remaining nodes") {
  OntologySpec spec = Seed();
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    MrTree t = testing::RandomTree(rng);
    auto before = ValidateTree(spec, t);
    if (t.root->edges.empty()) continue;
    MrTree pruned = t;
    std::size_t drop = rng.Below(pruned.root->edges.size());
    pruned.root->edges.erase(pruned.root->edges.begin() + static_cast<std::ptrdiff_t>(drop));
    for (const OntologyError& e : ValidateTree(spec, pruned)) {
      CHECK(std::find(before.begin(), before.end(), e) != before.end());
    }
  }
}
