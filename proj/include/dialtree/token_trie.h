/*!
 *  Copyright (c) 2026 by Contributors
 * \file dialtree/token_trie.h
 * \brief Allowed-token map bridging tokenizer units to grammar terminals.
 *
 * Every terminal of the next-terminal set W is tokenized and inserted as a path; shared
 * prefixes are merged. A node whose path spells a whole terminal is marked complete. When W is
 * empty the map holds a single path: the end-of-sequence token.
 *
 * Unlike a plain nested map, a completed terminal that is also a prefix of a longer terminal
 * (":vi" and ":ville") keeps both: the node is marked complete and keeps its children, so the
 * result does not depend on insertion order.
 */
#ifndef DIALTREE_TOKEN_TRIE_H_
#define DIALTREE_TOKEN_TRIE_H_

#include <dialtree/tokenizer.h>

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dialtree {

class TokenTrie {
 public:
  using NodeIndex = std::size_t;
  static constexpr NodeIndex kRoot = 0;
  /*! \brief Terminal index reported for the end-of-sequence leaf. */
  static constexpr std::size_t kEosTerminal = static_cast<std::size_t>(-1);

  TokenTrie() : nodes_(1) {}

  /*! \brief Children of `node` keyed by token. */
  const std::map<TokenId, NodeIndex>& Children(NodeIndex node) const { return nodes_[node].next; }
  std::optional<NodeIndex> Child(NodeIndex node, TokenId token) const;

  /*! \brief Index into terminals() of the terminal completed at `node`, if any. */
  std::optional<std::size_t> Completed(NodeIndex node) const { return nodes_[node].terminal; }
  bool IsLeaf(NodeIndex node) const { return nodes_[node].next.empty(); }

  /*! \brief The terminal strings, indexed as reported by Completed(). */
  const std::vector<std::string>& terminals() const { return terminals_; }
  bool eos_only() const { return eos_only_; }
  std::size_t num_nodes() const { return nodes_.size(); }

  /*! \brief Walk `tokens` from the root. Returns the node reached, or nullopt. */
  std::optional<NodeIndex> Walk(const std::vector<TokenId>& tokens) const;

 private:
  friend TokenTrie BuildTokenTrie(const std::vector<std::string>&, const Tokenizer&);

  struct Node {
    std::map<TokenId, NodeIndex> next;
    std::optional<std::size_t> terminal;
  };
  std::vector<Node> nodes_;
  std::vector<std::string> terminals_;
  bool eos_only_ = false;
};

/*! \brief Build the allowed-token map for the terminal set `terminals`. */
TokenTrie BuildTokenTrie(const std::vector<std::string>& terminals, const Tokenizer& tokenizer);

}  // namespace dialtree

#endif  // DIALTREE_TOKEN_TRIE_H_
