/*!
 *  Copyright (c) 2026 by Contributors
 * \file meaning_representation.cc
 */
#include <dialtree/error.h>
#include <dialtree/meaning_representation.h>

#include <algorithm>
#include <cctype>
#include <functional>
#include <utility>

namespace dialtree {

namespace {

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool IsAsciiLetter(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool IsAsciiDigit(char c) { return c >= '0' && c <= '9'; }

// Characters allowed in concept names, relation labels and ids.
bool IsNameChar(char c) {
  return !IsSpace(c) && c != '(' && c != ')' && c != '"' && c != ':' && c != '/';
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  MrTree Parse() {
    SkipSpace();
    MrTree tree;
    if (AtEnd()) return tree;
    tree.root = ParseNode();
    SkipSpace();
    if (!AtEnd()) Fail("trailing content after root");
    return tree;
  }

 private:
  [[noreturn]] void Fail(const std::string& what) const { throw SyntaxError(what, pos_); }

  bool AtEnd() const { return pos_ >= text_.size(); }
  char Peek() const { return text_[pos_]; }

  void SkipSpace() {
    while (!AtEnd() && IsSpace(Peek())) ++pos_;
  }

  void Expect(char c) {
    SkipSpace();
    if (AtEnd()) Fail(std::string("expected '") + c + "' but reached end of input");
    if (Peek() != c) Fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string ReadName(const char* what) {
    SkipSpace();
    std::size_t start = pos_;
    while (!AtEnd() && IsNameChar(Peek())) ++pos_;
    if (pos_ == start) Fail(std::string("expected ") + what);
    return std::string(text_.substr(start, pos_ - start));
  }

  ConceptNode ParseNode() {
    Expect('(');
    ConceptNode node;
    std::size_t id_pos = pos_;
    node.id = ReadName("node identifier");
    if (!IsValidNodeId(node.id)) {
      pos_ = id_pos;
      SkipSpace();
      Fail("malformed node identifier '" + node.id + "'");
    }
    if (!seen_.insert(node.id).second) {
      throw DuplicateIdError("node id '" + node.id + "' introduced twice");
    }
    Expect('/');
    node.concept_name = ReadName("concept name");
    while (true) {
      SkipSpace();
      if (AtEnd()) Fail("unterminated node '" + node.id + "'");
      if (Peek() == ')') {
        ++pos_;
        return node;
      }
      if (Peek() != ':') Fail("expected ':' or ')'");
      ++pos_;
      if (AtEnd() || !IsNameChar(Peek())) Fail("expected relation label after ':'");
      RelationEdge edge{ReadName("relation label"), Literal{}};
      SkipSpace();
      if (AtEnd()) Fail("missing edge target");
      if (Peek() == '(') {
        edge.target = Box<ConceptNode>(ParseNode());
      } else if (Peek() == '"') {
        edge.target = Literal{ReadLiteral()};
      } else {
        std::size_t ref_pos = pos_;
        std::string ref = ReadName("edge target");
        if (!IsValidNodeId(ref)) {
          pos_ = ref_pos;
          Fail("edge target '" + ref + "' is neither a tree, a literal nor an identifier");
        }
        edge.target = NodeRef{std::move(ref)};
      }
      node.edges.push_back(std::move(edge));
    }
  }

  std::string ReadLiteral() {
    std::size_t open = pos_;
    ++pos_;  // opening quote
    std::string out;
    while (true) {
      if (AtEnd()) {
        pos_ = open;
        Fail("unterminated literal");
      }
      char c = Peek();
      ++pos_;
      if (c == '"') return out;
      if (c == '\\') {
        if (AtEnd()) {
          pos_ = open;
          Fail("unterminated literal");
        }
        char e = Peek();
        if (e != '"' && e != '\\') Fail("invalid escape in literal");
        out.push_back(e);
        ++pos_;
        continue;
      }
      out.push_back(c);
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  IdSet seen_;
};

void WriteNode(const ConceptNode& node, std::string* out) {
  out->push_back('(');
  out->append(node.id);
  out->append(" / ");
  out->append(node.concept_name);
  for (const RelationEdge& edge : node.edges) {
    out->append(" :");
    out->append(edge.label);
    out->push_back(' ');
    if (edge.IsConcept()) {
      WriteNode(edge.child(), out);
    } else if (edge.IsLiteral()) {
      out->append(QuoteLiteral(edge.literal().span));
    } else {
      out->append(edge.ref().id);
    }
  }
  out->push_back(')');
}

void VisitNodes(const ConceptNode& node, const std::function<void(const ConceptNode&)>& fn) {
  fn(node);
  for (const RelationEdge& edge : node.edges) {
    if (edge.IsConcept()) VisitNodes(edge.child(), fn);
  }
}

std::size_t NodeDepth(const ConceptNode& node) {
  std::size_t deepest = 0;
  for (const RelationEdge& edge : node.edges) {
    if (edge.IsConcept()) deepest = std::max(deepest, NodeDepth(edge.child()));
  }
  return deepest + 1;
}

}  // namespace

bool IsValidNodeId(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size() && IsAsciiLetter(text[i])) ++i;
  if (i == 0 || i == text.size()) return false;
  while (i < text.size() && IsAsciiDigit(text[i])) ++i;
  return i == text.size();
}

MrTree ParseAnnotation(std::string_view text) { return Parser(text).Parse(); }

std::string QuoteLiteral(std::string_view span) {
  std::string out = "\"";
  for (char c : span) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string SerializeAnnotation(const MrTree& tree) {
  std::string out;
  if (tree.root) WriteNode(*tree.root, &out);
  return out;
}

std::size_t TreeDepth(const MrTree& tree) { return tree.root ? NodeDepth(*tree.root) : 0; }

std::size_t TreeWidth(const MrTree& tree) {
  std::size_t width = 0;
  if (tree.root) {
    VisitNodes(*tree.root, [&](const ConceptNode& n) { width = std::max(width, n.edges.size()); });
  }
  return width;
}

std::size_t CountConcepts(const MrTree& tree) {
  std::size_t n = 0;
  if (tree.root) VisitNodes(*tree.root, [&](const ConceptNode&) { ++n; });
  return n;
}

std::size_t CountLiterals(const MrTree& tree) {
  std::size_t n = 0;
  if (tree.root) {
    VisitNodes(*tree.root, [&](const ConceptNode& node) {
      for (const RelationEdge& e : node.edges) n += e.IsLiteral();
    });
  }
  return n;
}

std::size_t CountEdges(const MrTree& tree) {
  std::size_t n = 0;
  if (tree.root) VisitNodes(*tree.root, [&](const ConceptNode& node) { n += node.edges.size(); });
  return n;
}

std::vector<NodeId> IntroducedIds(const MrTree& tree) {
  std::vector<NodeId> ids;
  if (tree.root) VisitNodes(*tree.root, [&](const ConceptNode& n) { ids.push_back(n.id); });
  return ids;
}

std::map<NodeId, std::string> IdConcepts(const MrTree& tree) {
  std::map<NodeId, std::string> out;
  if (tree.root) {
    VisitNodes(*tree.root, [&](const ConceptNode& n) { out.emplace(n.id, n.concept_name); });
  }
  return out;
}

std::vector<NodeId> ValidateReferences(const MrTree& tree, const IdSet& known_ids) {
  std::vector<NodeId> unresolved;
  if (!tree.root) return unresolved;
  std::vector<NodeId> introduced = IntroducedIds(tree);
  IdSet local(introduced.begin(), introduced.end());
  IdSet reported;
  VisitNodes(*tree.root, [&](const ConceptNode& node) {
    for (const RelationEdge& e : node.edges) {
      if (!e.IsRef()) continue;
      const NodeId& id = e.ref().id;
      if (local.count(id) || known_ids.count(id)) continue;
      if (reported.insert(id).second) unresolved.push_back(id);
    }
  });
  return unresolved;
}

char IdLetter(std::string_view concept_name) {
  for (char c : concept_name) {
    if (IsAsciiLetter(c)) return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return 'x';
}

NodeId IdAllocator::PeekLetter(char letter) const {
  for (int n = 1;; ++n) {
    NodeId candidate = std::string(1, letter) + std::to_string(n);
    if (!used_.count(candidate)) return candidate;
  }
}

NodeId IdAllocator::Allocate(std::string_view concept_name) {
  NodeId id = Peek(concept_name);
  used_.insert(id);
  return id;
}

// ---------------------------------------------------------------------------

TripleSet ExtractTriples(const MrTree& tree) {
  TripleSet set;
  if (!tree.root) return set;
  std::map<NodeId, std::size_t> index;
  VisitNodes(*tree.root, [&](const ConceptNode& n) {
    index.emplace(n.id, set.nodes.size());
    set.nodes.push_back(n.id);
    set.concepts.push_back(n.concept_name);
  });
  set.triples.push_back(Triple{TripleKind::kTop, "TOP", 0, Triple::kNoNode, {}});
  for (std::size_t i = 0; i < set.nodes.size(); ++i) {
    set.triples.push_back(Triple{TripleKind::kInstance, set.concepts[i], i, Triple::kNoNode, {}});
  }
  VisitNodes(*tree.root, [&](const ConceptNode& node) {
    std::size_t src = index.at(node.id);
    for (const RelationEdge& e : node.edges) {
      if (e.IsConcept()) {
        set.triples.push_back(Triple{TripleKind::kRelation, e.label, src, index.at(e.child().id), {}});
      } else if (e.IsLiteral()) {
        set.triples.push_back(
            Triple{TripleKind::kAttribute, e.label, src, Triple::kNoNode, e.literal().span});
      } else {
        auto it = index.find(e.ref().id);
        if (it != index.end()) {
          set.triples.push_back(Triple{TripleKind::kRelation, e.label, src, it->second, {}});
        } else {
          set.triples.push_back(
              Triple{TripleKind::kRelation, e.label, src, Triple::kNoNode, e.ref().id});
        }
      }
    }
  });
  return set;
}

TripleSet ExtractTriples(const MrTree& tree, const IdSet& history) {
  std::vector<NodeId> unresolved = ValidateReferences(tree, history);
  if (!unresolved.empty()) {
    throw UnresolvedRefError("reference to '" + unresolved.front() + "' has no antecedent");
  }
  return ExtractTriples(tree);
}

std::string FormatTriple(const TripleSet& set, const Triple& t) {
  const std::string& src = set.nodes.at(t.source);
  switch (t.kind) {
    case TripleKind::kTop:
      return "TOP(" + src + ")";
    case TripleKind::kInstance:
      return "instance(" + src + ", " + t.label + ")";
    case TripleKind::kRelation:
      return t.label + "(" + src + ", " +
             (t.target == Triple::kNoNode ? t.value : set.nodes.at(t.target)) + ")";
    case TripleKind::kAttribute:
      return t.label + "(" + src + ", " + QuoteLiteral(t.value) + ")";
  }
  return {};
}

}  // namespace dialtree
