/*!
 *  Copyright (c) 2026 by Contributors
 * \file grammar_decoder.cc
 */
#include <dialtree/error.h>
#include <dialtree/grammar_decoder.h>
#include <dialtree/random.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>

namespace dialtree {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

const std::string kOpenRoot = "(";
const std::string kClose = ")";
const std::string kOpenChild = " (";
const std::string kOpenLiteral = " \"";
const std::string kConceptPrefix = " / ";
const std::string kLabelPrefix = " :";

bool IsBoundary(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v' || c == '"' ||
         c == '\\';
}

}  // namespace

std::vector<TokenId> VocabularyMask::Allowed() const {
  std::vector<TokenId> out;
  for (std::size_t i = 0; i < penalty.size(); ++i) {
    if (penalty[i] == 0.0) out.push_back(static_cast<TokenId>(i));
  }
  return out;
}

bool VocabularyMask::IsAllowed(TokenId t) const {
  return t >= 0 && static_cast<std::size_t>(t) < penalty.size() && penalty[t] == 0.0;
}

// ---------------------------------------------------------------------------

LiteralOptions LiteralContinuations(const std::vector<std::string>& turns, std::string_view partial,
                                    const TokenTextIndex& index, bool close_at_word_boundary) {
  LiteralOptions out;
  bool any_word = false;
  for (const std::string& turn : turns) {
    for (std::size_t p = 0; p < turn.size(); ++p) {
      if (IsBoundary(turn[p]) || (p > 0 && !IsBoundary(turn[p - 1]))) continue;
      any_word = true;
      if (turn.size() - p < partial.size() || turn.compare(p, partial.size(), partial) != 0) continue;
      std::size_t end = p + partial.size();
      index.PrefixTokens(std::string_view(turn).substr(end), &out.content);
      if (partial.empty() || IsBoundary(partial.back())) continue;
      if (!close_at_word_boundary || end == turn.size() || IsBoundary(turn[end])) {
        out.can_close = true;
      }
    }
  }
  if (!any_word) out.can_close = true;
  std::sort(out.content.begin(), out.content.end());
  out.content.erase(std::unique(out.content.begin(), out.content.end()), out.content.end());
  return out;
}

std::set<TokenId> LiteralAllowedTokens(const std::vector<std::string>& turns,
                                       std::string_view partial, const Tokenizer& tokenizer) {
  TokenTextIndex index(tokenizer, "\"\\");
  LiteralOptions opts = LiteralContinuations(turns, partial, index);
  std::set<TokenId> out(opts.content.begin(), opts.content.end());
  if (opts.can_close) {
    for (TokenId t : tokenizer.Encode("\"")) out.insert(t);
  }
  return out;
}

// ---------------------------------------------------------------------------

GrammarDecoder::GrammarDecoder(const Tokenizer& tokenizer, GrammarContext context,
                               std::shared_ptr<const TokenTextIndex> index)
    : tok_(tokenizer), ctx_(std::move(context)), index_(std::move(index)) {
  if (ctx_.ontology == nullptr) throw Error("grammar decoding needs an ontology");
  std::vector<TokenId> quote = tok_.Encode("\"");
  if (quote.size() != 1) throw Error("the quote character must be a single token");
  quote_token_ = quote[0];
  if (!index_) index_ = std::make_shared<TokenTextIndex>(tok_, "\"\\");
}

DecoderState GrammarDecoder::Initial(std::size_t budget) const {
  DecoderState state;
  state.budget_remaining = budget;
  EnterPhase(&state, GrammarPhase::kStart);
  return state;
}

IdAllocator GrammarDecoder::Allocator(const DecoderState& state) const {
  IdAllocator alloc(ctx_.known_ids);
  for (const auto& [id, c] : state.introduced) alloc.Reserve(id);
  return alloc;
}

std::set<std::string> GrammarDecoder::ConceptChoices(const DecoderState& state) const {
  if (state.stack.empty()) {
    std::set<std::string> all;
    for (const auto& [name, category] : ctx_.ontology->concepts()) all.insert(name);
    return all;
  }
  const OpenNode& parent = state.stack.back();
  return ctx_.ontology->AllowedChildConcepts(parent.concept_name, parent.pending_label);
}

std::vector<std::string> GrammarDecoder::TargetTerminals(const DecoderState& state,
                                                         const std::string& parent,
                                                         const std::string& label) const {
  std::vector<std::string> out;
  const OntologySpec& spec = *ctx_.ontology;
  if (!spec.AllowedChildConcepts(parent, label).empty()) out.push_back(kOpenChild);
  if (spec.AdmitsLiteral(parent, label)) out.push_back(kOpenLiteral);
  if (spec.AdmitsRef(parent, label)) {
    IdSet ids = ctx_.known_ids;
    for (const auto& [id, c] : state.introduced) ids.insert(id);
    for (const NodeId& id : ids) out.push_back(" " + id);
  }
  return out;
}

std::vector<std::string> GrammarDecoder::NextTerminals(const DecoderState& state) const {
  std::vector<std::string> out;
  switch (state.phase) {
    case GrammarPhase::kStart:
      out.push_back(kOpenRoot);
      break;
    case GrammarPhase::kId: {
      IdAllocator alloc = Allocator(state);
      std::set<char> letters;
      for (const std::string& c : ConceptChoices(state)) letters.insert(IdLetter(c));
      for (char l : letters) out.push_back(alloc.PeekLetter(l));
      break;
    }
    case GrammarPhase::kConcept: {
      char letter = state.pending_id.empty() ? '\0' : state.pending_id[0];
      for (const std::string& c : ConceptChoices(state)) {
        if (IdLetter(c) == letter) out.push_back(kConceptPrefix + c);
      }
      break;
    }
    case GrammarPhase::kEdgeOrClose: {
      const std::string& parent = state.stack.back().concept_name;
      for (const std::string& label : ctx_.ontology->AllowedRelations(parent)) {
        if (!TargetTerminals(state, parent, label).empty()) out.push_back(kLabelPrefix + label);
      }
      out.push_back(kClose);
      break;
    }
    case GrammarPhase::kTarget: {
      const OpenNode& top = state.stack.back();
      out = TargetTerminals(state, top.concept_name, top.pending_label);
      break;
    }
    case GrammarPhase::kLiteral:
    case GrammarPhase::kDone:
    case GrammarPhase::kFinished:
      break;
  }
  return out;
}

std::shared_ptr<const TokenTrie> GrammarDecoder::TrieFor(
    const std::vector<std::string>& terminals) const {
  std::string key;
  for (const std::string& t : terminals) {
    key += t;
    key += '\x1f';
  }
  auto it = trie_cache_.find(key);
  if (it != trie_cache_.end()) return it->second;
  auto trie = std::make_shared<const TokenTrie>(BuildTokenTrie(terminals, tok_));
  trie_cache_.emplace(std::move(key), trie);
  return trie;
}

void GrammarDecoder::EnterPhase(DecoderState* state, GrammarPhase phase) const {
  state->phase = phase;
  state->trie_node = TokenTrie::kRoot;
  if (phase == GrammarPhase::kLiteral || phase == GrammarPhase::kFinished) {
    state->trie.reset();
    state->literal.clear();
    return;
  }
  std::vector<std::string> terminals = NextTerminals(*state);
  if (terminals.empty() && phase != GrammarPhase::kDone) {
    throw DeadEndError("no admissible continuation after '" + state->text + "'");
  }
  state->trie = TrieFor(terminals);
}

void GrammarDecoder::CompleteTerminal(DecoderState* state, const std::string& terminal) const {
  switch (state->phase) {
    case GrammarPhase::kStart:
      EnterPhase(state, GrammarPhase::kId);
      return;
    case GrammarPhase::kId:
      state->pending_id = terminal;
      EnterPhase(state, GrammarPhase::kConcept);
      return;
    case GrammarPhase::kConcept: {
      std::string name = terminal.substr(kConceptPrefix.size());
      state->introduced.emplace(state->pending_id, name);
      state->pending_id.clear();
      state->stack.push_back(OpenNode{std::move(name), {}});
      EnterPhase(state, GrammarPhase::kEdgeOrClose);
      return;
    }
    case GrammarPhase::kEdgeOrClose:
      if (terminal == kClose) {
        state->stack.pop_back();
        if (state->stack.empty()) {
          EnterPhase(state, GrammarPhase::kDone);
        } else {
          state->stack.back().pending_label.clear();
          EnterPhase(state, GrammarPhase::kEdgeOrClose);
        }
      } else {
        state->stack.back().pending_label = terminal.substr(kLabelPrefix.size());
        EnterPhase(state, GrammarPhase::kTarget);
      }
      return;
    case GrammarPhase::kTarget:
      if (terminal == kOpenChild) {
        EnterPhase(state, GrammarPhase::kId);
      } else if (terminal == kOpenLiteral) {
        EnterPhase(state, GrammarPhase::kLiteral);
      } else {
        state->stack.back().pending_label.clear();
        EnterPhase(state, GrammarPhase::kEdgeOrClose);
      }
      return;
    case GrammarPhase::kDone:
      EnterPhase(state, GrammarPhase::kFinished);
      return;
    case GrammarPhase::kLiteral:
    case GrammarPhase::kFinished:
      break;
  }
  throw Error("terminal completed outside the grammar");
}

void GrammarDecoder::Step(DecoderState* state, TokenId token) const {
  if (state->phase == GrammarPhase::kFinished) {
    throw IllegalTokenError("decoding already finished");
  }
  if (state->phase == GrammarPhase::kLiteral) {
    LiteralOptions opts = LiteralContinuations(ctx_.turns, state->literal, *index_,
                                               ctx_.close_literal_at_word_boundary);
    if (token == quote_token_ && opts.can_close) {
      state->stack.back().pending_label.clear();
      EnterPhase(state, GrammarPhase::kEdgeOrClose);
      return;
    }
    if (std::binary_search(opts.content.begin(), opts.content.end(), token)) {
      state->literal += tok_.TokenText(token);
      return;
    }
    throw IllegalTokenError("token " + std::to_string(token) + " breaks the literal copy constraint");
  }
  const TokenTrie& trie = *state->trie;
  TokenTrie::NodeIndex node = state->trie_node;
  if (auto child = trie.Child(node, token)) {
    state->trie_node = *child;
    auto done = trie.Completed(*child);
    if (done && trie.IsLeaf(*child)) {
      CompleteTerminal(state, *done == TokenTrie::kEosTerminal ? std::string() : trie.terminals()[*done]);
    }
    return;
  }
  if (node != TokenTrie::kRoot) {
    if (auto done = trie.Completed(node)) {
      // A complete terminal that is also a prefix of a longer one: the token decides.
      CompleteTerminal(state, trie.terminals()[*done]);
      Step(state, token);
      return;
    }
  }
  throw IllegalTokenError("token " + std::to_string(token) + " is not allowed after '" +
                          state->text + "'");
}

std::vector<TokenId> GrammarDecoder::FirstTokens(const DecoderState& state) const {
  std::vector<TokenId> out;
  if (state.phase == GrammarPhase::kLiteral) {
    LiteralOptions opts = LiteralContinuations(ctx_.turns, state.literal, *index_,
                                               ctx_.close_literal_at_word_boundary);
    out = std::move(opts.content);
    if (opts.can_close) out.push_back(quote_token_);
    return out;
  }
  if (state.phase == GrammarPhase::kFinished || !state.trie) return out;
  for (const auto& [t, child] : state.trie->Children(state.trie_node)) out.push_back(t);
  return out;
}

std::vector<TokenId> GrammarDecoder::AllowedTokens(const DecoderState& state) const {
  std::vector<TokenId> out = FirstTokens(state);
  if (!state.in_literal() && state.trie && state.trie_node != TokenTrie::kRoot) {
    auto done = state.trie->Completed(state.trie_node);
    if (done && !state.trie->IsLeaf(state.trie_node)) {
      DecoderState next = state;
      try {
        CompleteTerminal(&next, state.trie->terminals()[*done]);
        std::vector<TokenId> more = FirstTokens(next);
        out.insert(out.end(), more.begin(), more.end());
      } catch (const DeadEndError&) {
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty()) throw DeadEndError("no token is allowed after '" + state.text + "'");
  return out;
}

VocabularyMask GrammarDecoder::Mask(const DecoderState& state) const {
  VocabularyMask mask;
  mask.penalty.assign(tok_.VocabSize(), kNegInf);
  for (TokenId t : AllowedTokens(state)) {
    if (t >= 0 && static_cast<std::size_t>(t) < mask.penalty.size()) mask.penalty[t] = 0.0;
  }
  return mask;
}

DecoderState GrammarDecoder::Advance(DecoderState state, TokenId token) const {
  if (state.budget_remaining == 0) {
    throw AnnotationTruncatedError("token budget exhausted after '" + state.text + "'");
  }
  Step(&state, token);
  state.emitted.push_back(token);
  if (token != tok_.Eos()) state.text += tok_.TokenText(token);
  --state.budget_remaining;
  return state;
}

// ---------------------------------------------------------------------------

std::string TranscriptToText(const std::vector<TranscriptStep>& transcript) {
  std::string out;
  char line[96];
  for (const TranscriptStep& s : transcript) {
    std::snprintf(line, sizeof(line), "%zu %d %zu\n", s.step, s.token, s.allowed);
    out += line;
  }
  return out;
}

namespace {

// Picks from `logprobs + penalty`, renormalized over the allowed tokens.
TokenId Choose(const std::vector<double>& logprobs, const std::vector<TokenId>& allowed,
               DecodeMode mode, Rng* rng) {
  double top = kNegInf;
  for (TokenId t : allowed) top = std::max(top, logprobs[t]);
  if (!std::isfinite(top)) {
    // The model gives no mass to any allowed token: fall back to uniform.
    if (mode == DecodeMode::kGreedy) return allowed.front();
    return allowed[static_cast<std::size_t>(rng->Below(allowed.size()))];
  }
  if (mode == DecodeMode::kGreedy) {
    for (TokenId t : allowed) {
      if (logprobs[t] == top) return t;
    }
  }
  double sum = 0.0;
  for (TokenId t : allowed) sum += std::exp(logprobs[t] - top);
  double u = rng->Uniform() * sum;
  for (TokenId t : allowed) {
    u -= std::exp(logprobs[t] - top);
    if (u < 0.0) return t;
  }
  return allowed.back();
}

}  // namespace

DecodeResult ConstrainedDecode(LanguageModel& lm, std::string_view prompt,
                               const GrammarContext& context, const DecodeOptions& options,
                               std::shared_ptr<const TokenTextIndex> index) {
  GrammarDecoder decoder(lm, context, std::move(index));
  DecoderState state = decoder.Initial(options.budget);
  std::vector<TokenId> ctx = lm.Encode(prompt);
  Rng rng(options.seed);
  DecodeResult result;
  while (!state.finished()) {
    if (state.budget_remaining == 0) {
      throw AnnotationTruncatedError("token budget of " + std::to_string(options.budget) +
                                     " exhausted after '" + state.text + "'");
    }
    VocabularyMask mask = decoder.Mask(state);
    std::vector<double> logprobs = NextTokenLogprobs(lm, ctx);
    for (std::size_t i = 0; i < logprobs.size(); ++i) logprobs[i] += mask.penalty[i];
    std::vector<TokenId> allowed = mask.Allowed();
    TokenId token = Choose(logprobs, allowed, options.mode, &rng);
    result.transcript.push_back({result.tokens.size(), token, allowed.size()});
    state = decoder.Advance(std::move(state), token);
    ctx.push_back(token);
    result.tokens.push_back(token);
  }
  result.text = std::move(state.text);
  return result;
}

DecodeResult UnconstrainedDecode(LanguageModel& lm, std::string_view prompt,
                                 const DecodeOptions& options) {
  std::vector<TokenId> ctx = lm.Encode(prompt);
  std::vector<TokenId> all(lm.VocabSize());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<TokenId>(i);
  Rng rng(options.seed);
  DecodeResult result;
  std::vector<TokenId> body;
  while (result.tokens.size() < options.budget) {
    std::vector<double> logprobs = NextTokenLogprobs(lm, ctx);
    TokenId token = Choose(logprobs, all, options.mode, &rng);
    result.transcript.push_back({result.tokens.size(), token, all.size()});
    result.tokens.push_back(token);
    ctx.push_back(token);
    if (token == lm.Eos()) break;
    body.push_back(token);
  }
  result.text = lm.Decode(body);
  return result;
}

}  // namespace dialtree
