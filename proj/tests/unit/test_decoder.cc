/*!
 *  Copyright (c) 2026 by Contributors
 * \file test_decoder.cc
 */
#include <dialtree/error.h>
#include <dialtree/grammar_decoder.h>
#include <dialtree/token_trie.h>
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "../support.h"

using namespace dialtree;

namespace {

const std::vector<std::string> kTurns = {
    "je voudrais une chambre double et une simple",
    "deux chambres pour Noël à Paris dans le huitième arrondissement cinq jours c'est en cours"};

bool Has(const std::vector<TokenId>& v, TokenId t) { return std::find(v.begin(), v.end(), t) != v.end(); }

TokenId B(char c) { return static_cast<unsigned char>(c); }

}  // namespace

TEST_CASE("byte tokenizer") {
  ByteTokenizer tok;
  std::string s = "chambre \"é\"";
  std::vector<TokenId> ids = tok.Encode(s);
  CHECK(ids.size() == s.size());
  CHECK(tok.Decode(ids) == s);
  CHECK(tok.TokenText(tok.Eos()).empty());
  ids.push_back(tok.Eos());
  CHECK(tok.Decode(ids) == s);
}

TEST_CASE("vocabulary tokenizer takes the longest piece") {
  VocabTokenizer tok({" / hotel", " /", "hotel", "ho"});
  CHECK(tok.VocabSize() == 261);
  CHECK(tok.Eos() == 260);
  std::vector<TokenId> ids = tok.Encode("(h1 / hotel)");
  CHECK(ids == std::vector<TokenId>{B('('), B('h'), B('1'), 256, B(')')});
  CHECK(tok.Decode(ids) == "(h1 / hotel)");
  CHECK(tok.Encode(" /hotel") == std::vector<TokenId>{257, 258});
}

TEST_CASE("token trie") {
  ByteTokenizer tok;
  TokenTrie trie = BuildTokenTrie({"ab", "abc", "b"}, tok);
  CHECK(trie.terminals().size() == 3);
  CHECK(trie.num_nodes() == 5);
  auto ab = trie.Walk({B('a'), B('b')});
  REQUIRE(ab);
  CHECK(trie.Completed(*ab) == 0u);
  CHECK_FALSE(trie.IsLeaf(*ab));
  auto abc = trie.Walk({B('a'), B('b'), B('c')});
  REQUIRE(abc);
  CHECK(trie.Completed(*abc) == 1u);
  CHECK(trie.IsLeaf(*abc));
  CHECK_FALSE(trie.Walk({B('c')}));
  CHECK_FALSE(trie.Completed(*trie.Walk({B('a')})));
}

TEST_CASE("empty terminal set gives the end-of-sequence trie") {
  ByteTokenizer tok;
  TokenTrie trie = BuildTokenTrie({}, tok);
  CHECK(trie.eos_only());
  REQUIRE(trie.Children(TokenTrie::kRoot).size() == 1);
  auto leaf = trie.Child(TokenTrie::kRoot, tok.Eos());
  REQUIRE(leaf);
  CHECK(trie.Completed(*leaf) == TokenTrie::kEosTerminal);
}

TEST_CASE("property: every root-to-completion path spells a terminal") {
  VocabTokenizer tok({" :", " / ", "ch", "cham", "bre", "hotel", " (", ")"});
  Rng rng(3);
  const std::vector<std::string> pool = {" :type", " :chambre", " / chambre", " / hotel", " (", ")",
                                         "h1", "c1", "c12", " \"", " h1"};
  for (int i = 0; i < 100; ++i) {
    std::vector<std::string> w;
    for (const auto& s : pool) {
      if (rng.Below(2)) w.push_back(s);
    }
    TokenTrie trie = BuildTokenTrie(w, tok);
    std::size_t completions = 0;
    std::vector<std::pair<TokenTrie::NodeIndex, std::string>> stack{{TokenTrie::kRoot, ""}};
    while (!stack.empty()) {
      auto [node, text] = stack.back();
      stack.pop_back();
      if (auto done = trie.Completed(node)) {
        if (*done == TokenTrie::kEosTerminal) continue;
        CHECK(trie.terminals()[*done] == text);
        ++completions;
      }
      for (auto [t, child] : trie.Children(node)) stack.push_back({child, text + tok.TokenText(t)});
    }
    CHECK(completions == (w.empty() ? 0 : w.size()));
  }
}

TEST_CASE("literal copy constraint") {
  ByteTokenizer tok;
  TokenTextIndex index(tok, "\"\\");
  std::vector<std::string> turns = {"une chambre double"};
  LiteralOptions start = LiteralContinuations(turns, "", index);
  CHECK(Has(start.content, B('u')));
  CHECK(Has(start.content, B('c')));
  CHECK(Has(start.content, B('d')));
  CHECK_FALSE(Has(start.content, B('h')));
  CHECK_FALSE(start.can_close);
  LiteralOptions un = LiteralContinuations(turns, "un", index);
  CHECK(un.content == std::vector<TokenId>{B('e')});
  CHECK_FALSE(un.can_close);
  LiteralOptions une = LiteralContinuations(turns, "une", index);
  CHECK(une.content == std::vector<TokenId>{B(' ')});
  CHECK(une.can_close);
  LiteralOptions space = LiteralContinuations(turns, "une ", index);
  CHECK_FALSE(space.can_close);
  CHECK(Has(space.content, B('c')));
  LiteralOptions end = LiteralContinuations(turns, "une chambre double", index);
  CHECK(end.content.empty());
  CHECK(end.can_close);
  LiteralOptions nowhere = LiteralContinuations(turns, "zz", index);
  CHECK(nowhere.content.empty());
  CHECK_FALSE(nowhere.can_close);
  LiteralOptions no_words = LiteralContinuations({"   "}, "", index);
  CHECK(no_words.content.empty());
  CHECK(no_words.can_close);

  std::set<TokenId> allowed = LiteralAllowedTokens(turns, "une", tok);
  CHECK(allowed == std::set<TokenId>{B(' '), B('"')});
}

TEST_CASE("grammar positions") {
  ByteTokenizer tok;
  OntologySpec onto = LoadOntology(SeedOntologyText());
  GrammarDecoder dec(tok, {&onto, kTurns, {}});
  DecoderState s = dec.Initial(64);
  CHECK(dec.NextTerminals(s) == std::vector<std::string>{"("});
  CHECK(dec.AllowedTokens(s) == std::vector<TokenId>{B('(')});
  CHECK_THROWS_AS(dec.Advance(s, B('x')), IllegalTokenError);
  s = dec.Advance(s, B('('));
  CHECK(s.phase == GrammarPhase::kId);
  std::vector<std::string> ids = dec.NextTerminals(s);
  CHECK(std::find(ids.begin(), ids.end(), "r1") != ids.end());
  CHECK(std::find(ids.begin(), ids.end(), "h1") != ids.end());
  for (char c : std::string("h1")) s = dec.Advance(s, B(c));
  CHECK(s.phase == GrammarPhase::kConcept);
  CHECK(dec.NextTerminals(s) == std::vector<std::string>{" / hotel"});
  for (char c : std::string(" / hotel")) s = dec.Advance(s, B(c));
  std::vector<std::string> edges = dec.NextTerminals(s);
  CHECK(std::find(edges.begin(), edges.end(), " :lieu") != edges.end());
  CHECK(std::find(edges.begin(), edges.end(), ")") != edges.end());
  CHECK(std::find(edges.begin(), edges.end(), " :etat") == edges.end());
  s = dec.Advance(s, B(')'));
  CHECK(s.accepting());
  CHECK(dec.AllowedTokens(s) == std::vector<TokenId>{tok.Eos()});
  s = dec.Advance(s, tok.Eos());
  CHECK(s.finished());
  CHECK(s.text == "(h1 / hotel)");
}

TEST_CASE("mask penalties") {
  ByteTokenizer tok;
  OntologySpec onto = LoadOntology(SeedOntologyText());
  GrammarDecoder dec(tok, {&onto, kTurns, {}});
  VocabularyMask m = dec.Mask(dec.Initial());
  CHECK(m.penalty.size() == tok.VocabSize());
  CHECK(m.Allowed() == std::vector<TokenId>{B('(')});
  CHECK(m.penalty[B('(')] == 0.0);
  CHECK(std::isinf(m.penalty[B('a')]));
  CHECK(m.IsAllowed(B('(')));
  CHECK_FALSE(m.IsAllowed(tok.Eos()));
}

TEST_CASE("references to known and introduced ids") {
  ByteTokenizer tok;
  OntologySpec onto = LoadOntology(SeedOntologyText());
  GrammarDecoder dec(tok, {&onto, kTurns, {"h1"}});
  DecoderState s = dec.Initial();
  for (char c : std::string("(r1 / reservation :objet")) s = dec.Advance(s, B(c));
  std::vector<std::string> targets = dec.NextTerminals(s);
  CHECK(std::find(targets.begin(), targets.end(), " (") != targets.end());
  CHECK(std::find(targets.begin(), targets.end(), " h1") != targets.end());
  CHECK(std::find(targets.begin(), targets.end(), " \"") == targets.end());
  for (char c : std::string(" h1)")) s = dec.Advance(s, B(c));
  CHECK(s.accepting());
}

TEST_CASE("known ids are not reused for new nodes") {
  ByteTokenizer tok;
  OntologySpec onto = LoadOntology(SeedOntologyText());
  GrammarDecoder dec(tok, {&onto, kTurns, {"h1"}});
  DecoderState s = dec.Advance(dec.Initial(), B('('));
  std::vector<std::string> ids = dec.NextTerminals(s);
  CHECK(std::find(ids.begin(), ids.end(), "h1") == ids.end());
  CHECK(std::find(ids.begin(), ids.end(), "h2") != ids.end());
}

TEST_CASE("budget exhaustion") {
  ByteTokenizer tok;
  OntologySpec onto = LoadOntology(SeedOntologyText());
  GrammarDecoder dec(tok, {&onto, kTurns, {}});
  DecoderState s = dec.Advance(dec.Initial(1), B('('));
  CHECK(s.budget_remaining == 0);
  CHECK_THROWS_AS(dec.Advance(s, B('h')), AnnotationTruncatedError);
}

TEST_CASE("replayed reference annotation decodes byte for byte") {
  std::string canon = SerializeAnnotation(ParseAnnotation(testing::BookingText()));
  auto tok = std::make_shared<ByteTokenizer>();
  std::string prompt = RenderPrompt({{kTurns[0], kTurns[1], 0}});
  ReplayLm lm = ReplayLm::FromResponses(tok, {{prompt, canon}});
  OntologySpec onto = LoadOntology(SeedOntologyText());
  DecodeResult r = ConstrainedDecode(lm, prompt, {&onto, kTurns, {}}, {1024});
  CHECK(r.text == canon);
  CHECK(r.tokens.back() == tok->Eos());
  CHECK(r.transcript.size() == r.tokens.size());
  CHECK_THROWS_AS(ConstrainedDecode(lm, prompt, {&onto, kTurns, {}}, {100}), AnnotationTruncatedError);
  DecodeResult raw = UnconstrainedDecode(lm, prompt, {1024});
  CHECK(raw.text == canon);
}

TEST_CASE("constrained decoding repairs a forbidden answer") {
  auto tok = std::make_shared<ByteTokenizer>();
  std::string prompt = RenderPrompt({{"bonjour", "un hotel à Lyon", 0}});
  ReplayLm lm = ReplayLm::FromResponses(tok, {{prompt, "(h1 / hotel :lieu (a1 / adresse :ville \"Lyon\" :pays \"x\"))"}});
  OntologySpec onto = LoadOntology(SeedOntologyText());
  std::vector<std::string> turns = {"bonjour", "un hotel à Lyon"};
  DecodeResult r = ConstrainedDecode(lm, prompt, {&onto, turns, {}});
  MrTree t = ParseAnnotation(r.text);
  CHECK(ValidateTree(onto, t).empty());
  CHECK(r.text.rfind("(h1 / hotel :lieu (a1 / adresse :ville \"Lyon\"", 0) == 0);
  DecodeResult raw = UnconstrainedDecode(lm, prompt);
  CHECK_FALSE(ValidateTree(onto, ParseAnnotation(raw.text)).empty());
}

TEST_CASE("transcript text") {
  CHECK(TranscriptToText({{0, 40, 1}, {1, 104, 6}}) == "0 40 1\n1 104 6\n");
}

TEST_CASE("property: sampled decodes from a random model are well formed") {
  auto tok = std::make_shared<ByteTokenizer>();
  OntologySpec onto = LoadOntology(SeedOntologyText());
  auto index = std::make_shared<TokenTextIndex>(*tok, "");
  std::string prompt = RenderPrompt({{kTurns[0], kTurns[1], 0}});
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    RandomLm lm(tok, seed);
    DecodeOptions opts{kDefaultBudget, seed % 2 ? DecodeMode::kSampled : DecodeMode::kGreedy, seed};
    DecodeResult r;
    try {
      r = ConstrainedDecode(lm, prompt, {&onto, kTurns, {}}, opts, index);
    } catch (const AnnotationTruncatedError&) {
      continue;
    }
    CAPTURE(r.text);
    MrTree t = ParseAnnotation(r.text);
    CHECK_FALSE(t.empty());
    CHECK(ValidateTree(onto, t).empty());
    CHECK(ValidateReferences(t, {}).empty());
  }
}

TEST_CASE("greedy decoding is deterministic") {
  auto tok = std::make_shared<ByteTokenizer>();
  OntologySpec onto = LoadOntology(SeedOntologyText());
  std::string prompt = RenderPrompt({{kTurns[0], kTurns[1], 0}});
  RandomLm a(tok, 9), b(tok, 9);
  CHECK(ConstrainedDecode(a, prompt, {&onto, kTurns, {}}).text ==
        ConstrainedDecode(b, prompt, {&onto, kTurns, {}}).text);
}
