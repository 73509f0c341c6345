/*!
 *  Copyright (c) 2026 by Contributors
 * \file tokenizer.cc
 */
#include <dialtree/error.h>
#include <dialtree/tokenizer.h>

namespace dialtree {

std::vector<TokenId> ByteTokenizer::Encode(std::string_view text) const {
  std::vector<TokenId> out;
  out.reserve(text.size());
  for (unsigned char c : text) out.push_back(static_cast<TokenId>(c));
  return out;
}

std::string ByteTokenizer::Decode(std::span<const TokenId> tokens) const {
  std::string out;
  out.reserve(tokens.size());
  for (TokenId t : tokens) {
    if (t >= 0 && t < 256) out.push_back(static_cast<char>(t));
  }
  return out;
}

std::string ByteTokenizer::TokenText(TokenId token) const {
  if (token >= 0 && token < 256) return std::string(1, static_cast<char>(token));
  return {};
}

VocabTokenizer::VocabTokenizer(const std::vector<std::string>& pieces) {
  for (int b = 0; b < 256; ++b) pieces_.emplace_back(1, static_cast<char>(b));
  nodes_.emplace_back();
  auto insert = [this](const std::string& piece, TokenId id) {
    std::size_t cur = 0;
    for (unsigned char c : piece) {
      auto it = nodes_[cur].next.find(c);
      if (it == nodes_[cur].next.end()) {
        nodes_.emplace_back();
        it = nodes_[cur].next.emplace(c, nodes_.size() - 1).first;
      }
      cur = it->second;
    }
    if (nodes_[cur].token < 0) nodes_[cur].token = id;
  };
  for (int b = 0; b < 256; ++b) insert(pieces_[b], b);
  for (const std::string& p : pieces) {
    if (p.size() <= 1) continue;  // single bytes are already present
    pieces_.push_back(p);
    insert(p, static_cast<TokenId>(pieces_.size() - 1));
  }
}

std::vector<TokenId> VocabTokenizer::Encode(std::string_view text) const {
  std::vector<TokenId> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t cur = 0, best_len = 0;
    TokenId best = -1;
    for (std::size_t i = pos; i < text.size(); ++i) {
      auto it = nodes_[cur].next.find(static_cast<unsigned char>(text[i]));
      if (it == nodes_[cur].next.end()) break;
      cur = it->second;
      if (nodes_[cur].token >= 0) {
        best = nodes_[cur].token;
        best_len = i - pos + 1;
      }
    }
    out.push_back(best);
    pos += best_len;
  }
  return out;
}

std::string VocabTokenizer::Decode(std::span<const TokenId> tokens) const {
  std::string out;
  for (TokenId t : tokens) {
    if (t >= 0 && static_cast<std::size_t>(t) < pieces_.size()) out += pieces_[t];
  }
  return out;
}

std::string VocabTokenizer::TokenText(TokenId token) const {
  if (token >= 0 && static_cast<std::size_t>(token) < pieces_.size()) return pieces_[token];
  return {};
}

TokenTextIndex::TokenTextIndex(const Tokenizer& tokenizer, std::string_view exclude) {
  nodes_.emplace_back();
  for (std::size_t t = 0; t < tokenizer.VocabSize(); ++t) {
    TokenId id = static_cast<TokenId>(t);
    if (id == tokenizer.Eos()) continue;
    std::string text = tokenizer.TokenText(id);
    if (text.empty() || text.find_first_of(exclude) != std::string::npos) continue;
    std::size_t cur = 0;
    for (unsigned char c : text) {
      auto it = nodes_[cur].next.find(c);
      if (it == nodes_[cur].next.end()) {
        nodes_.emplace_back();
        it = nodes_[cur].next.emplace(c, nodes_.size() - 1).first;
      }
      cur = it->second;
    }
    nodes_[cur].tokens.push_back(id);
  }
}

void TokenTextIndex::PrefixTokens(std::string_view text, std::vector<TokenId>* out) const {
  std::size_t cur = 0;
  for (unsigned char c : text) {
    auto it = nodes_[cur].next.find(c);
    if (it == nodes_[cur].next.end()) return;
    cur = it->second;
    out->insert(out->end(), nodes_[cur].tokens.begin(), nodes_[cur].tokens.end());
  }
}

}  // namespace dialtree
