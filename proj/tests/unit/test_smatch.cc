/*!
 *  Copyright (c) 2026 by Contributors
 * \file test_smatch.cc
 */
#include <dialtree/error.h>
#include <dialtree/smatch.h>
#include <doctest.h>

#include "../support.h"

using namespace dialtree;

namespace {

MrTree P(const std::string& s) { return ParseAnnotation(s); }

}  // namespace

TEST_CASE("one differing literal") {
  SmatchScore s = Smatch(P("(a1 / adresse :ville \"Paris\")"), P("(a1 / adresse :ville \"Lyon\")"));
  CHECK(s.matched == 2);
  CHECK(s.total_a == 3);
  CHECK(s.total_b == 3);
  CHECK(s.precision == doctest::Approx(200.0 / 3));
  CHECK(s.recall == doctest::Approx(200.0 / 3));
  CHECK(s.f1 == doctest::Approx(66.67).epsilon(1e-4));
}

TEST_CASE("different root concepts still share the top triple") {
  SmatchScore s = Smatch(P("(h1 / hotel)"), P("(c1 / chambre)"));
  CHECK(s.matched == 1);
  CHECK(s.f1 == doctest::Approx(50.0));
}

TEST_CASE("empty trees") {
  CHECK(Smatch(MrTree{}, MrTree{}).f1 == 100.0);
  CHECK(Smatch(MrTree{}, P("(h1 / hotel)")).f1 == 0.0);
  CHECK(Smatch(P("(h1 / hotel)"), MrTree{}).f1 == 0.0);
  CHECK(ScoreFromCounts(0, 0, 0).f1 == 100.0);
  CHECK(ScoreFromCounts(0, 3, 0).f1 == 0.0);
}

TEST_CASE("reference example against itself and a renamed copy") {
  MrTree t = P(testing::BookingText());
  CHECK(Smatch(t, t).f1 == 100.0);
  std::string renamed = SerializeAnnotation(t);
  for (auto [from, to] : std::vector<std::pair<std::string, std::string>>{
           {"(r1 ", "(q7 "}, {"(h1 ", "(z3 "}, {"(c1 ", "(k9 "}, {"(c2 ", "(c1 "}}) {
    renamed.replace(renamed.find(from), from.size(), to);
  }
  SmatchScore s = Smatch(t, P(renamed));
  CHECK(s.f1 == 100.0);
  CHECK(s.alignment.IsInjective());
}

TEST_CASE("scores are bounded and the alignment is injective") {
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    MrTree a = testing::RandomTree(rng);
    MrTree b = testing::RandomTree(rng);
    SmatchScore s = Smatch(a, b, 4, i);
    CHECK(s.f1 >= 0.0);
    CHECK(s.f1 <= 100.0);
    CHECK(s.alignment.IsInjective());
    CHECK(s.matched == CountMatches(ExtractTriples(a), ExtractTriples(b), s.alignment));
  }
}

TEST_CASE("property: symmetry of f1 under the brute-force optimum") {
  Rng rng(12);
  testing::TreeShape shape;
  shape.max_nodes = 5;
  for (int i = 0; i < 100; ++i) {
    MrTree a = testing::RandomTree(rng, shape);
    MrTree b = testing::RandomTree(rng, shape);
    SmatchScore ab = BruteForceSmatch(a, b);
    SmatchScore ba = BruteForceSmatch(b, a);
    CHECK(ab.matched == ba.matched);
    CHECK(ab.f1 == doctest::Approx(ba.f1));
    CHECK(ab.precision == doctest::Approx(ba.recall));
  }
}

TEST_CASE("property: the hill climber never beats the exhaustive search") {
  Rng rng(13);
  testing::TreeShape shape;
  shape.max_nodes = 6;
  for (int i = 0; i < 100; ++i) {
    MrTree a = testing::RandomTree(rng, shape);
    MrTree b = testing::RandomTree(rng, shape);
    CHECK(Smatch(a, b, 8, i).matched <= BruteForceSmatch(a, b).matched);
  }
}

TEST_CASE("property: more restarts never lower the score") {
  Rng rng(14);
  for (int i = 0; i < 50; ++i) {
    MrTree a = testing::RandomTree(rng);
    MrTree b = testing::RandomTree(rng);
    CHECK(Smatch(a, b, 1, 3).matched <= Smatch(a, b, 6, 3).matched);
  }
}

TEST_CASE("brute force refuses large trees") {
  std::string big = "(e1 / et";
  for (int i = 1; i <= 9; ++i) big += " :arg1 (c" + std::to_string(i) + " / chambre)";
  big += ")";
  CHECK_THROWS_AS(BruteForceSmatch(P(big), P(big)), TooLargeError);
}

TEST_CASE("pairwise distribution") {
  AnnotationSet a, b;
  a[{"d1", 0}] = {"(a1 / adresse :ville \"Paris\")"};
  b[{"d1", 0}] = {"(a1 / adresse :ville \"Lyon\")"};
  a[{"d1", 1}] = {"(h1 / hotel)"};
  b[{"d1", 1}] = {"(h1 / hotel)"};
  a[{"d2", 0}] = {""};
  b[{"d2", 0}] = {""};
  ScoreHistogram h = PairwiseDistribution(a, b);
  CHECK(h.counts.size() == ScoreHistogram::kBins);
  CHECK(h.bin_edges.size() == ScoreHistogram::kBins + 1);
  CHECK(h.counts.back() == 2);
  CHECK(h.counts[13] == 1);
  CHECK(h.mean == doctest::Approx((200.0 / 3 + 200.0) / 3));
  CHECK(h.dialogue_mean == doctest::Approx(((200.0 / 3 + 100.0) / 2 + 100.0) / 2));
  b.erase({"d2", 0});
  CHECK_THROWS_AS(PairwiseDistribution(a, b), KeyMismatchError);
}

TEST_CASE("unparseable text scores zero") {
  CHECK(SmatchF1OrZero("(h1 / hotel", "(h1 / hotel)", 4, 0) == 0.0);
  CHECK(SmatchF1OrZero("(h1 / hotel)", "(h1 / hotel)", 4, 0) == 100.0);
}
