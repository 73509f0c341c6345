/*!
 *  Copyright (c) 2026 by Contributors
 * \file token_trie.cc
 */
#include <dialtree/token_trie.h>

namespace dialtree {

std::optional<TokenTrie::NodeIndex> TokenTrie::Child(NodeIndex node, TokenId token) const {
  auto it = nodes_[node].next.find(token);
  if (it == nodes_[node].next.end()) return std::nullopt;
  return it->second;
}

std::optional<TokenTrie::NodeIndex> TokenTrie::Walk(const std::vector<TokenId>& tokens) const {
  NodeIndex cur = kRoot;
  for (TokenId t : tokens) {
    auto next = Child(cur, t);
    if (!next) return std::nullopt;
    cur = *next;
  }
  return cur;
}

TokenTrie BuildTokenTrie(const std::vector<std::string>& terminals, const Tokenizer& tokenizer) {
  TokenTrie trie;
  if (terminals.empty()) {
    trie.nodes_.emplace_back();
    trie.nodes_[TokenTrie::kRoot].next.emplace(tokenizer.Eos(), 1);
    trie.nodes_[1].terminal = TokenTrie::kEosTerminal;
    trie.eos_only_ = true;
    return trie;
  }
  for (const std::string& w : terminals) {
    std::vector<TokenId> tokens = tokenizer.Encode(w);
    if (tokens.empty()) continue;
    std::size_t index = trie.terminals_.size();
    trie.terminals_.push_back(w);
    TokenTrie::NodeIndex cur = TokenTrie::kRoot;
    for (TokenId t : tokens) {
      auto it = trie.nodes_[cur].next.find(t);
      if (it == trie.nodes_[cur].next.end()) {
        trie.nodes_.emplace_back();
        it = trie.nodes_[cur].next.emplace(t, trie.nodes_.size() - 1).first;
      }
      cur = it->second;
    }
    if (!trie.nodes_[cur].terminal) trie.nodes_[cur].terminal = index;
  }
  return trie;
}

}  // namespace dialtree
