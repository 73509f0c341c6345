/*!
 *  Copyright (c) 2026 by Contributors
 * \file dialtree/language_model.h
 * \brief The pluggable next-token model boundary, the annotation prompt template and
 *  dialogue-history truncation.
 */
#ifndef DIALTREE_LANGUAGE_MODEL_H_
#define DIALTREE_LANGUAGE_MODEL_H_

#include <dialtree/tokenizer.h>

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dialtree {

class LineJsonProcess;

/*!
 * \brief A next-token language model. Tokenization is part of the model. Logprob vectors have
 *  length VocabSize() and hold finite values or -infinity.
 */
class LanguageModel : public Tokenizer {
 public:
  /*! \throws SessionError when the backing session fails. */
  virtual std::vector<double> NextTokenLogprobs(std::span<const TokenId> context) = 0;
};

/*! \brief Checks the context precondition then forwards to the model. */
std::vector<double> NextTokenLogprobs(LanguageModel& lm, std::span<const TokenId> context);

/*!
 * \brief Scripted model for exactness tests. Each entry pairs an exact prompt with a script:
 *  step k holds the tokens preferred at the k-th generated position, best first. A context is
 *  matched to the entry whose tokenized prompt is its longest prefix.
 *
 * Outside the script (or without a matching entry) the model prefers end-of-sequence, then
 * `)` and `"`, which lets a masked decode finish once the script is exhausted.
 */
class ReplayLm : public LanguageModel {
 public:
  struct Entry {
    std::string prompt;
    std::vector<std::vector<TokenId>> steps;
  };

  ReplayLm(std::shared_ptr<const Tokenizer> tokenizer, std::vector<Entry> entries);

  /*! \brief Script each response as its own tokenization followed by end-of-sequence. */
  static ReplayLm FromResponses(std::shared_ptr<const Tokenizer> tokenizer,
                                const std::vector<std::pair<std::string, std::string>>& responses);

  /*!
   * \brief JSON lines: {"prompt": ..., "response": ...} or {"prompt": ..., "steps": [[id, ...], ...]}.
   * \throws FormatError
   */
  static ReplayLm Load(std::shared_ptr<const Tokenizer> tokenizer, std::string_view jsonl);
  static ReplayLm LoadFile(std::shared_ptr<const Tokenizer> tokenizer, const std::string& path);

  /*!
   * \brief Like Load, with the tokenizer taken from the file: a first line {"pieces": [...]}
   *  selects a VocabTokenizer over those pieces, otherwise bytes are used.
   */
  static ReplayLm LoadWithVocabulary(std::string_view jsonl);
  static ReplayLm LoadFileWithVocabulary(const std::string& path);

  std::vector<TokenId> Encode(std::string_view text) const override { return tok_->Encode(text); }
  std::string Decode(std::span<const TokenId> t) const override { return tok_->Decode(t); }
  std::size_t VocabSize() const override { return tok_->VocabSize(); }
  TokenId Eos() const override { return tok_->Eos(); }
  std::string TokenText(TokenId t) const override { return tok_->TokenText(t); }

  std::vector<double> NextTokenLogprobs(std::span<const TokenId> context) override;

  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::shared_ptr<const Tokenizer> tok_;
  std::vector<Entry> entries_;
  std::vector<std::vector<TokenId>> prompt_tokens_;
  std::vector<TokenId> fallback_;
};

/*!
 * \brief Seeded random model for fuzzing: logits are uniform draws in [0, 1) seeded by the
 *  model seed and a hash of the context, so the same context always gets the same output.
 */
class RandomLm : public LanguageModel {
 public:
  RandomLm(std::shared_ptr<const Tokenizer> tokenizer, std::uint64_t seed)
      : tok_(std::move(tokenizer)), seed_(seed) {}

  std::vector<TokenId> Encode(std::string_view text) const override { return tok_->Encode(text); }
  std::string Decode(std::span<const TokenId> t) const override { return tok_->Decode(t); }
  std::size_t VocabSize() const override { return tok_->VocabSize(); }
  TokenId Eos() const override { return tok_->Eos(); }
  std::string TokenText(TokenId t) const override { return tok_->TokenText(t); }

  std::vector<double> NextTokenLogprobs(std::span<const TokenId> context) override;

 private:
  std::shared_ptr<const Tokenizer> tok_;
  std::uint64_t seed_;
};

/*!
 * \brief Model served by an external process speaking line-delimited JSON on stdin/stdout:
 *
 *     {"op":"tokenize","text":...}      -> {"tokens":[...]}
 *     {"op":"detokenize","tokens":[...]} -> {"text":...}  or {"bytes":[...]} for partial UTF-8
 *     {"op":"logprobs","context":[...]}  -> {"logprobs":[...]}     (null for -infinity)
 *     {"op":"vocab_size"}                -> {"n":..., "eos":...}   ("eos" defaults to n-1)
 */
class ProcessLm : public LanguageModel {
 public:
  /*! \throws SessionError if the process cannot be started or answers malformed. */
  explicit ProcessLm(const std::string& command);
  ~ProcessLm() override;

  std::vector<TokenId> Encode(std::string_view text) const override;
  std::string Decode(std::span<const TokenId> tokens) const override;
  std::size_t VocabSize() const override { return vocab_size_; }
  TokenId Eos() const override { return eos_; }
  std::string TokenText(TokenId token) const override;

  std::vector<double> NextTokenLogprobs(std::span<const TokenId> context) override;

 private:
  std::unique_ptr<LineJsonProcess> proc_;
  std::size_t vocab_size_ = 0;
  TokenId eos_ = 0;
  mutable std::map<TokenId, std::string> text_cache_;
};

/*!
 * \brief Build a model from a spec string: `replay:FILE`, `random:SEED` or `proc:CMD`.
 *  Replay and random models use the byte tokenizer.
 * \throws ConfigError for unknown schemes.
 */
std::unique_ptr<LanguageModel> MakeLanguageModel(const std::string& spec);

// ---------------------------------------------------------------------------

struct DialogueTurnPair {
  std::string agent;
  std::string user;
  std::size_t index = 0;
};

inline constexpr std::size_t kDefaultHistoryWindow = 5;

/*!
 * \brief Render the instruction prompt for annotating the last user turn of `history`.
 * \throws EmptyHistoryError
 */
std::string RenderPrompt(const std::vector<DialogueTurnPair>& history);

/*! \brief Keep the current pair and up to `window` previous pairs. */
std::vector<DialogueTurnPair> TruncateHistory(const std::vector<DialogueTurnPair>& history,
                                              std::size_t window = kDefaultHistoryWindow);

}  // namespace dialtree

#endif  // DIALTREE_LANGUAGE_MODEL_H_
