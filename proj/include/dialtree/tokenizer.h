/*!
 *  Copyright (c) 2026 by Contributors
 * \file dialtree/tokenizer.h
 * \brief Tokenizer abstraction and the two built-in tokenizers.
 */
#ifndef DIALTREE_TOKENIZER_H_
#define DIALTREE_TOKENIZER_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dialtree {

using TokenId = std::int32_t;

class Tokenizer {
 public:
  virtual ~Tokenizer() = default;

  virtual std::vector<TokenId> Encode(std::string_view text) const = 0;
  /*! \brief Concatenated token texts; the end-of-sequence token decodes to nothing. */
  virtual std::string Decode(std::span<const TokenId> tokens) const = 0;
  virtual std::size_t VocabSize() const = 0;
  virtual TokenId Eos() const = 0;

  /*! \brief Surface text of a single token. */
  virtual std::string TokenText(TokenId token) const {
    return Decode(std::span<const TokenId>(&token, 1));
  }
};

/*! \brief One token per byte (0..255), end-of-sequence is 256. */
class ByteTokenizer : public Tokenizer {
 public:
  std::vector<TokenId> Encode(std::string_view text) const override;
  std::string Decode(std::span<const TokenId> tokens) const override;
  std::size_t VocabSize() const override { return 257; }
  TokenId Eos() const override { return 256; }
  std::string TokenText(TokenId token) const override;
};

/*!
 * \brief Greedy longest-match tokenizer over a piece vocabulary. Ids 0..255 are the single
 *  bytes so every text is encodable; extra pieces follow in the given order, then eos.
 */
class VocabTokenizer : public Tokenizer {
 public:
  explicit VocabTokenizer(const std::vector<std::string>& pieces);

  std::vector<TokenId> Encode(std::string_view text) const override;
  std::string Decode(std::span<const TokenId> tokens) const override;
  std::size_t VocabSize() const override { return pieces_.size() + 1; }
  TokenId Eos() const override { return static_cast<TokenId>(pieces_.size()); }
  std::string TokenText(TokenId token) const override;

 private:
  struct Node {
    std::map<unsigned char, std::size_t> next;
    TokenId token = -1;
  };
  std::vector<std::string> pieces_;
  std::vector<Node> nodes_;
};

/*!
 * \brief Byte-level prefix index over token texts. Used to find every token whose text is a
 *  prefix of a given string in one walk.
 */
class TokenTextIndex {
 public:
  /*! \brief Index every token except eos, empty texts and texts containing `exclude` bytes. */
  TokenTextIndex(const Tokenizer& tokenizer, std::string_view exclude = {});

  /*! \brief Append tokens whose text is a non-empty prefix of `text`. */
  void PrefixTokens(std::string_view text, std::vector<TokenId>* out) const;

 private:
  struct Node {
    std::map<unsigned char, std::size_t> next;
    std::vector<TokenId> tokens;
  };
  std::vector<Node> nodes_;
};

}  // namespace dialtree

#endif  // DIALTREE_TOKENIZER_H_
