/*!
 *  Copyright (c) 2026 by Contributors
 * \file test_quality_estimator.cc
 */
#include <dialtree/error.h>
#include <dialtree/quality_estimator.h>
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "../support.h"

using namespace dialtree;

namespace {

struct Row {
  std::string turn, annotation;
  double target;
};

std::vector<Row> QePairs() {
  std::vector<Row> rows;
  std::istringstream in(testing::ReadFixture("qe/pairs.tsv"));
  std::string line;
  while (std::getline(in, line)) {
    std::size_t a = line.find('\t'), b = line.find('\t', a + 1);
    rows.push_back({line.substr(0, a), line.substr(a + 1, b - a - 1), std::stod(line.substr(b + 1))});
  }
  return rows;
}

std::vector<double> ParseRow(const std::string& line) {
  std::vector<double> out;
  std::istringstream in(line);
  double v;
  while (in >> v) out.push_back(v);
  return out;
}

}  // namespace

TEST_CASE("hashing embedder matches the golden vectors") {
  std::vector<Row> rows = QePairs();
  std::istringstream golden(testing::ReadFixture("qe/embeddings.golden"));
  HashingEmbedder emb;
  CHECK(emb.Dim() == 256);
  CHECK(emb.Id() == "hash-ngram-2-4-d256");
  for (const Row& r : rows) {
    for (const std::string& text : {r.turn, r.annotation}) {
      std::string line;
      REQUIRE(std::getline(golden, line));
      std::vector<double> want = ParseRow(line);
      std::vector<double> got = emb.Embed(text);
      REQUIRE(got.size() == want.size());
      for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("featurize concatenates both embeddings") {
  HashingEmbedder emb(8);
  FeatureVector f = Featurize("une chambre", "(c1 / chambre)", emb);
  CHECK(f.size() == 16);
  CHECK(f == Featurize("une chambre", "(c1 / chambre)", emb));
  CHECK(f == Featurize("une chambre", "(c1/chambre)", emb));
  std::vector<double> turn = emb.Embed("une chambre");
  CHECK(std::equal(turn.begin(), turn.end(), f.begin()));
  double n = 0.0;
  for (double v : turn) n += v * v;
  CHECK(n == doctest::Approx(1.0));
}

TEST_CASE("embedding provider specs") {
  CHECK(MakeEmbeddingProvider("hash")->Dim() == 256);
  CHECK(MakeEmbeddingProvider("hash:64")->Dim() == 64);
  CHECK_THROWS_AS(MakeEmbeddingProvider("hash:x"), ConfigError);
  CHECK_THROWS_AS(MakeEmbeddingProvider("gte"), ConfigError);
  auto proc = MakeEmbeddingProvider("proc:python3 " + testing::FixturePath("echo_lm.py"));
  CHECK(proc->Dim() == 3);
  CHECK(proc->Embed("chambre") == std::vector<double>{7.0, 2.0, 1.0});
  CHECK(Featurize("oui", "", *proc).size() == 6);
  CHECK_THROWS_AS(MakeEmbeddingProvider("proc:true"), ProviderError);
}

TEST_CASE("trained model matches the golden predictions") {
  std::vector<Row> rows = QePairs();
  std::istringstream golden(testing::ReadFixture("qe/svr.golden"));
  std::string header;
  std::getline(golden, header);
  CHECK(header == "dim=32 C=50 epsilon=2 max_iters=300 seed=3");
  HashingEmbedder emb(32);
  std::vector<std::pair<FeatureVector, double>> pairs;
  for (const Row& r : rows) pairs.push_back({Featurize(r.turn, r.annotation, emb), r.target});
  TrainedSvr t = TrainSvr(pairs, {50.0, 2.0, 300, 3}, emb.Id());
  std::string tag;
  double value;
  golden >> tag >> value;
  CHECK(tag == "bias");
  CHECK(t.model.bias == doctest::Approx(value).epsilon(1e-9));
  for (const auto& [x, y] : pairs) {
    golden >> tag >> value;
    CHECK(tag == "predict");
    CHECK(PredictRaw(t.model, x) == doctest::Approx(value).epsilon(1e-9));
  }
  golden >> tag >> value;
  CHECK(tag == "probe");
  CHECK(PredictRaw(t.model, Featurize("une chambre à Paris", "(c1 / chambre)", emb)) ==
        doctest::Approx(value).epsilon(1e-9));
  for (std::size_t i = 1; i < t.objective.size(); ++i) CHECK(t.objective[i] <= t.objective[i - 1]);
}

TEST_CASE("constant targets give a bias-only fit") {
  HashingEmbedder emb(16);
  std::vector<std::pair<FeatureVector, double>> pairs;
  for (const char* s : {"a", "bb", "ccc", "dddd"}) pairs.push_back({Featurize(s, "", emb), 50.0});
  SvrModel m = TrainSvr(pairs).model;
  for (const auto& [x, y] : pairs) CHECK(std::abs(PredictScore(m, x) - 50.0) <= m.epsilon);
}

TEST_CASE("two clusters are ordered") {
  std::vector<std::pair<FeatureVector, double>> pairs;
  for (int i = 0; i < 3; ++i) pairs.push_back({FeatureVector(4, 0.0), 0.0});
  for (int i = 0; i < 3; ++i) pairs.push_back({FeatureVector(4, 1.0), 100.0});
  SvrModel m = TrainSvr(pairs, {100.0, 1.0, 5000, 0}).model;
  CHECK(PredictScore(m, FeatureVector(4, 1.0)) > PredictScore(m, FeatureVector(4, 0.0)));
}

TEST_CASE("one pair predicts its own target") {
  FeatureVector x = {0.3, -0.2, 0.9};
  SvrModel m = TrainSvr({{x, 42.0}}).model;
  CHECK(std::abs(PredictScore(m, x) - 42.0) <= m.epsilon);
}

TEST_CASE("training determinism and errors") {
  HashingEmbedder emb(16);
  std::vector<std::pair<FeatureVector, double>> pairs = {{Featurize("a", "", emb), 10.0},
                                                          {Featurize("b", "(h1 / hotel)", emb), 90.0}};
  CHECK(TrainSvr(pairs, {1, 5, 100, 4}).model.weights == TrainSvr(pairs, {1, 5, 100, 4}).model.weights);
  CHECK_THROWS_AS(TrainSvr({}), DegenerateDataError);
  CHECK_THROWS_AS(TrainSvr({{FeatureVector{1.0}, 10.0}, {FeatureVector{1.0, 2.0}, 10.0}}), DimMismatchError);
  CHECK_THROWS_AS(TrainSvr({{FeatureVector{1.0}, 120.0}}), DegenerateDataError);
  SvrModel flagged = TrainSvr({{FeatureVector{1.0}, 10.0}, {FeatureVector{1.0}, 90.0}}).model;
  CHECK(flagged.degenerate);
}

TEST_CASE("prediction clamps") {
  SvrModel m;
  m.weights = {0.0, 0.0};
  m.bias = 70.0;
  CHECK(PredictScore(m, {5.0, -3.0}) == 70.0);
  m.bias = 130.0;
  CHECK(PredictRaw(m, {0.0, 0.0}) == 130.0);
  CHECK(PredictScore(m, {0.0, 0.0}) == 100.0);
  m.bias = -4.0;
  CHECK(PredictScore(m, {0.0, 0.0}) == 0.0);
  CHECK_THROWS_AS(PredictScore(m, {1.0}), DimMismatchError);
}

TEST_CASE("model persistence round-trips exactly") {
  SvrModel m;
  m.weights = {0.1, -1.0 / 3.0, 1e-300};
  m.bias = 61.25;
  m.C = 2.5;
  m.epsilon = 0.5;
  m.provider_id = "hash-ngram-2-4-d256";
  std::string text = SaveSvr(m);
  CHECK(text.rfind("dialtree-svr 1 dim=3 provider=hash-ngram-2-4-d256", 0) == 0);
  SvrModel back = LoadSvr(text);
  CHECK(back.weights == m.weights);
  CHECK(back.bias == m.bias);
  CHECK(back.C == m.C);
  CHECK(back.epsilon == m.epsilon);
  CHECK(back.provider_id == m.provider_id);
  CHECK(SaveSvr(back) == text);
  CHECK_THROWS_AS(LoadSvr("nonsense\n"), FormatError);
  CHECK_THROWS_AS(LoadSvr("dialtree-svr 1 dim=3 provider=x C=1 epsilon=5 degenerate=0\n1\n2\n"), FormatError);
}

TEST_CASE("threshold filtering") {
  std::map<TurnKey, double> p = {{{"a", 0}, 30.0}, {{"b", 0}, 60.0}, {{"c", 0}, 90.0}};
  FilterResult r = FilterByThreshold(p, 50.0);
  CHECK(r.kept == std::vector<TurnKey>{{"b", 0}, {"c", 0}});
  CHECK(r.dropped == std::vector<TurnKey>{{"a", 0}});
  CHECK(FilterByThreshold(p, 0.0).kept.size() == 3);
  CHECK(FilterByThreshold(p, 100.0 + 1e-9).kept.empty());
  CHECK(FilterByThreshold(p, 60.0).kept.size() == 2);
}

TEST_CASE("property: filtering is monotone in the threshold") {
  Rng rng(21);
  std::map<TurnKey, double> p;
  for (std::size_t i = 0; i < 50; ++i) p[{"d", i}] = 100.0 * rng.Uniform();
  for (int i = 0; i < 100; ++i) {
    double d1 = 100.0 * rng.Uniform(), d2 = 100.0 * rng.Uniform();
    if (d1 > d2) std::swap(d1, d2);
    FilterResult a = FilterByThreshold(p, d1), b = FilterByThreshold(p, d2);
    CHECK(std::includes(a.kept.begin(), a.kept.end(), b.kept.begin(), b.kept.end()));
    CHECK(b.kept.size() + b.dropped.size() == p.size());
  }
}

TEST_CASE("percentile calibration returns an order statistic") {
  std::vector<double> s = {50, 10, 40, 20, 30};
  CHECK(CalibrateDelta(s, 20) == 10);
  CHECK(CalibrateDelta(s, 40) == 20);
  CHECK(CalibrateDelta(s, 50) == 30);
  CHECK(CalibrateDelta(s, 100) == 50);
  CHECK(CalibrateDelta(s, 0) == 10);
  std::vector<double> ten;
  for (int i = 10; i >= 1; --i) ten.push_back(i);
  CHECK(CalibrateDelta(ten) == 2);
  CHECK_THROWS_AS(CalibrateDelta({}, 20), DegenerateDataError);
}
