/*!
 *  Copyright (c) 2026 by Contributors
 * \file test_language_model.cc
 */
#include <dialtree/error.h>
#include <dialtree/grammar_decoder.h>
#include <dialtree/language_model.h>
#include <doctest.h>

#include <cmath>

#include "../support.h"

using namespace dialtree;

namespace {

std::string EchoCommand(const std::string& answer = "") {
  std::string cmd = "python3 " + testing::FixturePath("echo_lm.py");
  if (!answer.empty()) cmd += " '" + answer + "'";
  return cmd;
}

}  // namespace

TEST_CASE("prompt rendering") {
  std::string p = RenderPrompt({{"bonjour", "je voudrais un hotel", 0}, {"où ?", "à Paris", 1}});
  CHECK(p.find("### Instruction:") != std::string::npos);
  CHECK(p.find("### Input: agent: bonjour; user: je voudrais un hotel agent: où ?; user: à Paris") !=
        std::string::npos);
  CHECK(p.size() > 14);
  CHECK(p.substr(p.size() - 14) == "### Response:\n");
  CHECK_THROWS_AS(RenderPrompt({}), EmptyHistoryError);
}

TEST_CASE("history window keeps the current pair plus the window") {
  std::vector<DialogueTurnPair> h;
  for (std::size_t i = 0; i < 9; ++i) h.push_back({"a", "u" + std::to_string(i), i});
  auto kept = TruncateHistory(h, 5);
  REQUIRE(kept.size() == 6);
  CHECK(kept.front().index == 3);
  CHECK(kept.back().index == 8);
  CHECK(TruncateHistory(h, 0).size() == 1);
  CHECK(TruncateHistory({h[0]}, 5).size() == 1);
}

TEST_CASE("replay model follows its script and falls back to closers") {
  auto tok = std::make_shared<ByteTokenizer>();
  ReplayLm lm = ReplayLm::FromResponses(tok, {{"P", "ab"}});
  std::vector<TokenId> ctx = tok->Encode("P");
  auto lp = NextTokenLogprobs(lm, ctx);
  CHECK(lp.size() == 257);
  double total = 0.0;
  for (double v : lp) total += std::exp(v);
  CHECK(total == doctest::Approx(1.0));
  auto argmax = [](const std::vector<double>& v) {
    return static_cast<TokenId>(std::max_element(v.begin(), v.end()) - v.begin());
  };
  CHECK(argmax(lp) == 'a');
  ctx.push_back('a');
  CHECK(argmax(NextTokenLogprobs(lm, ctx)) == 'b');
  ctx.push_back('b');
  CHECK(argmax(NextTokenLogprobs(lm, ctx)) == tok->Eos());
  std::vector<TokenId> other = tok->Encode("Q");
  lp = NextTokenLogprobs(lm, other);
  CHECK(argmax(lp) == tok->Eos());
  CHECK(lp[')'] > lp['x']);
  CHECK_THROWS_AS(NextTokenLogprobs(lm, std::vector<TokenId>{}), SessionError);
}

TEST_CASE("replay files") {
  ReplayLm a = ReplayLm::LoadWithVocabulary("{\"prompt\":\"P\",\"response\":\"(h1 / hotel)\"}\n");
  CHECK(a.VocabSize() == 257);
  CHECK(a.entries().size() == 1);
  CHECK(a.entries()[0].steps.size() == 13);
  ReplayLm b = ReplayLm::LoadWithVocabulary(
      "{\"pieces\":[\" / hotel\"]}\n{\"prompt\":\"P\",\"response\":\"(h1 / hotel)\"}\n"
      "{\"prompt\":\"Q\",\"steps\":[[40],[256,41]]}\n");
  CHECK(b.VocabSize() == 258);
  CHECK(b.entries()[0].steps.size() == 6);
  CHECK(b.entries()[1].steps[1] == std::vector<TokenId>{256, 41});
  CHECK_THROWS_AS(ReplayLm::LoadWithVocabulary("{\"prompt\":\"P\"}\n"), FormatError);
  CHECK_THROWS_AS(ReplayLm::LoadWithVocabulary("{\"prompt\":\"P\",\"response\":\"x\"}\nnot json\n"),
                  FormatError);
  try {
    ReplayLm::LoadWithVocabulary("{\"prompt\":\"P\",\"response\":\"x\"}\nnot json\n");
  } catch (const FormatError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("random model is a deterministic function of its context") {
  auto tok = std::make_shared<ByteTokenizer>();
  RandomLm a(tok, 1), b(tok, 1), c(tok, 2);
  std::vector<TokenId> ctx = {1, 2, 3};
  CHECK(a.NextTokenLogprobs(ctx) == b.NextTokenLogprobs(ctx));
  CHECK(a.NextTokenLogprobs(ctx) != c.NextTokenLogprobs(ctx));
  std::vector<TokenId> ctx2 = {1, 2, 4};
  CHECK(a.NextTokenLogprobs(ctx) != a.NextTokenLogprobs(ctx2));
}

TEST_CASE("model specs") {
  CHECK(MakeLanguageModel("random:3")->VocabSize() == 257);
  CHECK_THROWS_AS(MakeLanguageModel("random:x"), ConfigError);
  CHECK_THROWS_AS(MakeLanguageModel("nothing"), ConfigError);
  CHECK_THROWS_AS(MakeLanguageModel("gpt:4"), ConfigError);
  CHECK_THROWS_AS(MakeLanguageModel("replay:/nonexistent/file.jsonl"), FormatError);
}

TEST_CASE("process model speaks the line protocol") {
  ProcessLm lm(EchoCommand());
  CHECK(lm.VocabSize() == 257);
  CHECK(lm.Eos() == 256);
  CHECK(lm.Encode("hé") == std::vector<TokenId>{'h', 0xc3, 0xa9});
  CHECK(lm.Decode(std::vector<TokenId>{'o', 'k', 256}) == "ok");
  CHECK(lm.TokenText(256).empty());
  std::vector<TokenId> ctx = lm.Encode("x");
  auto lp = NextTokenLogprobs(lm, ctx);
  CHECK(std::isinf(lp[0]));
  CHECK(lp['('] > lp['a']);
}

TEST_CASE("constrained decoding through a process model") {
  ProcessLm lm(EchoCommand("(h1 / hotel :lieu (a1 / adresse :ville \"Paris\"))"));
  OntologySpec onto = LoadOntology(SeedOntologyText());
  std::vector<std::string> turns = {"bonjour", "un hotel à Paris"};
  std::string prompt = RenderPrompt({{turns[0], turns[1], 0}});
  DecodeResult r = ConstrainedDecode(lm, prompt, {&onto, turns, {}});
  CHECK(r.text == "(h1 / hotel :lieu (a1 / adresse :ville \"Paris\"))");
}

TEST_CASE("process failures surface as session errors") {
  CHECK_THROWS_AS(ProcessLm("true"), SessionError);
  CHECK_THROWS_AS(ProcessLm("echo '{\"nope\":1}'"), SessionError);
  CHECK_THROWS_AS(ProcessLm("echo 'garbage'"), SessionError);
}
