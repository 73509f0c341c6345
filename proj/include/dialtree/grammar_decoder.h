/*!
 *  Copyright (c) 2026 by Contributors
 * \file dialtree/grammar_decoder.h
 * \brief Grammar-constrained decoding of annotation notation.
 *
 * The decoder emits the canonical form of the notation as a sequence of grammar terminals:
 *
 *     "("  id  " / concept"  { " :label" ( " (" id ... ")" | " \"" literal "\"" | " id" ) }  ")"
 *
 * At every grammar position the set W of admissible next terminals is derived from the
 * ontology (labels from the parent concept, child concepts from the parent and label), the id
 * convention, and the ids introduced so far. W is turned into a TokenTrie and the model may
 * only pick children of the current trie node. Inside a literal the trie is replaced by the copy
 * constraint: tokens must extend a word-aligned occurrence in the dialogue turns and the closing
 * quote is allowed only at a word boundary.
 */
#ifndef DIALTREE_GRAMMAR_DECODER_H_
#define DIALTREE_GRAMMAR_DECODER_H_

#include <dialtree/language_model.h>
#include <dialtree/meaning_representation.h>
#include <dialtree/ontology.h>
#include <dialtree/token_trie.h>
#include <dialtree/tokenizer.h>

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace dialtree {

inline constexpr std::size_t kDefaultBudget = 256;

/*! \brief Where the decoder stands in the notation grammar. */
enum class GrammarPhase {
  kStart,        // expecting "("
  kId,           // expecting a fresh identifier
  kConcept,      // expecting " / concept"
  kEdgeOrClose,  // expecting " :label" or ")"
  kTarget,       // expecting " (", " \"" or " id"
  kLiteral,      // inside a quoted literal
  kDone,         // root closed; only end-of-sequence remains
  kFinished,     // end-of-sequence emitted
};

/*! \brief An open concept node. */
struct OpenNode {
  std::string concept_name;
  std::string pending_label;  // set while its edge target is being decoded
};

struct DecoderState {
  GrammarPhase phase = GrammarPhase::kStart;
  std::vector<OpenNode> stack;
  NodeId pending_id;                         // between an id and its concept
  std::map<NodeId, std::string> introduced;  // ids of this tree and their concepts
  std::shared_ptr<const TokenTrie> trie;     // allowed-token map for the current terminal set
  TokenTrie::NodeIndex trie_node = TokenTrie::kRoot;
  std::string literal;  // literal text emitted since the opening quote
  std::vector<TokenId> emitted;
  std::string text;
  std::size_t budget_remaining = 0;

  bool in_literal() const { return phase == GrammarPhase::kLiteral; }
  bool finished() const { return phase == GrammarPhase::kFinished; }
  /*! \brief True once the root has been closed. */
  bool accepting() const { return phase == GrammarPhase::kDone || phase == GrammarPhase::kFinished; }
};

/*! \brief Per-token additive penalties: 0 when allowed, -infinity when forbidden. */
struct VocabularyMask {
  std::vector<double> penalty;

  std::vector<TokenId> Allowed() const;
  bool IsAllowed(TokenId t) const;
};

struct GrammarContext {
  const OntologySpec* ontology = nullptr;
  std::vector<std::string> turns;  // transcriptions literals may copy from
  IdSet known_ids;                 // ids introduced in earlier turns of the dialogue
  bool close_literal_at_word_boundary = true;
};

/*! \brief Content tokens that extend `partial` along some occurrence, and whether `"` may close. */
struct LiteralOptions {
  std::vector<TokenId> content;
  bool can_close = false;
};

/*!
 * \brief Copy constraint. Occurrences start at word starts; a token is allowed if
 *  partial + text(token) is still a prefix of the text from some occurrence. Token texts
 *  containing `"` or `\` are never allowed. With no word in any turn only closing is allowed.
 */
LiteralOptions LiteralContinuations(const std::vector<std::string>& turns, std::string_view partial,
                                    const TokenTextIndex& index, bool close_at_word_boundary = true);

/*! \brief Content tokens plus the quote token when closing is allowed. */
std::set<TokenId> LiteralAllowedTokens(const std::vector<std::string>& turns,
                                       std::string_view partial, const Tokenizer& tokenizer);

class GrammarDecoder {
 public:
  /*!
   * \param index token text index of `tokenizer`; built on demand when null.
   * \throws Error if `"` does not encode to a single token.
   */
  GrammarDecoder(const Tokenizer& tokenizer, GrammarContext context,
                 std::shared_ptr<const TokenTextIndex> index = nullptr);

  DecoderState Initial(std::size_t budget = kDefaultBudget) const;

  /*! \brief Terminal set W at the state's grammar position (empty inside literals). */
  std::vector<std::string> NextTerminals(const DecoderState& state) const;

  /*! \brief Sorted allowed tokens. \throws DeadEndError if none. */
  std::vector<TokenId> AllowedTokens(const DecoderState& state) const;

  VocabularyMask Mask(const DecoderState& state) const;

  /*!
   * \throws IllegalTokenError if `token` is not allowed.
   * \throws AnnotationTruncatedError if no budget remains.
   */
  DecoderState Advance(DecoderState state, TokenId token) const;

  const GrammarContext& context() const { return ctx_; }
  const Tokenizer& tokenizer() const { return tok_; }

 private:
  std::set<std::string> ConceptChoices(const DecoderState& state) const;
  std::vector<std::string> TargetTerminals(const DecoderState& state, const std::string& parent,
                                           const std::string& label) const;
  IdAllocator Allocator(const DecoderState& state) const;
  void EnterPhase(DecoderState* state, GrammarPhase phase) const;
  void CompleteTerminal(DecoderState* state, const std::string& terminal) const;
  void Step(DecoderState* state, TokenId token) const;
  std::vector<TokenId> FirstTokens(const DecoderState& state) const;
  std::shared_ptr<const TokenTrie> TrieFor(const std::vector<std::string>& terminals) const;

  const Tokenizer& tok_;
  GrammarContext ctx_;
  std::shared_ptr<const TokenTextIndex> index_;
  TokenId quote_token_;
  mutable std::map<std::string, std::shared_ptr<const TokenTrie>> trie_cache_;
};

enum class DecodeMode { kGreedy, kSampled };

struct DecodeOptions {
  std::size_t budget = kDefaultBudget;
  DecodeMode mode = DecodeMode::kGreedy;
  std::uint64_t seed = 0;
};

struct TranscriptStep {
  std::size_t step;
  TokenId token;
  std::size_t allowed;
};

struct DecodeResult {
  std::string text;
  std::vector<TokenId> tokens;  // generated tokens, end-of-sequence included when emitted
  std::vector<TranscriptStep> transcript;
};

/*! \brief `step token allowed` lines. */
std::string TranscriptToText(const std::vector<TranscriptStep>& transcript);

/*!
 * \brief Decode an annotation for `prompt` under the grammar. The output always parses,
 *  validates against the ontology and copies literals from the turns.
 * \throws AnnotationTruncatedError if the budget runs out before the grammar accepts.
 */
DecodeResult ConstrainedDecode(LanguageModel& lm, std::string_view prompt,
                               const GrammarContext& context, const DecodeOptions& options = {},
                               std::shared_ptr<const TokenTextIndex> index = nullptr);

/*! \brief Raw decoding up to end-of-sequence or the budget. The text may not parse. */
DecodeResult UnconstrainedDecode(LanguageModel& lm, std::string_view prompt,
                                 const DecodeOptions& options = {});

}  // namespace dialtree

#endif  // DIALTREE_GRAMMAR_DECODER_H_
