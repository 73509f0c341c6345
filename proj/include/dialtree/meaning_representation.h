/*!
 *  Copyright (c) 2026 by Contributors
 * \file dialtree/meaning_representation.h
 * \brief Contextual meaning-representation trees: data model, notation reader/writer,
 *  triple decomposition and shape measures.
 *
 * The notation is
 *
 *     tree    := "(" id "/" concept edge* ")"
 *     edge    := ":" label (tree | literal | id)
 *     literal := '"' chars '"'
 *
 * with insignificant whitespace between tokens. Inside literals `\"` and `\\` are escapes.
 * An empty string denotes the empty annotation.
 */
#ifndef DIALTREE_MEANING_REPRESENTATION_H_
#define DIALTREE_MEANING_REPRESENTATION_H_

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dialtree {

using NodeId = std::string;
using IdSet = std::set<NodeId>;

/*! \brief True when `text` matches letter+ digit+ (ASCII). */
bool IsValidNodeId(std::string_view text);

/*! \brief A quoted transcription span. */
struct Literal {
  std::string span;
  bool operator==(const Literal&) const = default;
};

/*! \brief Re-mention of a node introduced earlier in this tree or in an earlier turn. */
struct NodeRef {
  NodeId id;
  bool operator==(const NodeRef&) const = default;
};

struct ConceptNode;

/*!
 * \brief Owning, deep-copying pointer. Lets ConceptNode appear inside a variant held by
 *  its own edges while keeping value semantics and structural equality.
 */
template <typename T>
class Box {
 public:
  Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}  // NOLINT(runtime/explicit)
  Box(const Box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& other) {
    if (this != &other) ptr_ = std::make_unique<T>(*other.ptr_);
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;

  T& operator*() { return *ptr_; }
  const T& operator*() const { return *ptr_; }
  T* operator->() { return ptr_.get(); }
  const T* operator->() const { return ptr_.get(); }

  friend bool operator==(const Box& a, const Box& b) { return *a.ptr_ == *b.ptr_; }

 private:
  std::unique_ptr<T> ptr_;
};

struct RelationEdge {
  std::string label;
  std::variant<Box<ConceptNode>, Literal, NodeRef> target;

  bool IsConcept() const { return target.index() == 0; }
  bool IsLiteral() const { return target.index() == 1; }
  bool IsRef() const { return target.index() == 2; }
  const ConceptNode& child() const { return *std::get<0>(target); }
  ConceptNode& child() { return *std::get<0>(target); }
  const Literal& literal() const { return std::get<1>(target); }
  const NodeRef& ref() const { return std::get<2>(target); }

  bool operator==(const RelationEdge&) const = default;
};

struct ConceptNode {
  NodeId id;
  std::string concept_name;
  std::vector<RelationEdge> edges;

  bool operator==(const ConceptNode&) const = default;
};

/*! \brief A turn annotation. An absent root is the empty annotation. */
struct MrTree {
  std::optional<ConceptNode> root;

  bool empty() const { return !root.has_value(); }
  bool operator==(const MrTree&) const = default;
};

/*!
 * \brief Parse annotation notation.
 * \throws SyntaxError with byte offset on malformed input.
 * \throws DuplicateIdError if an id is introduced twice.
 */
MrTree ParseAnnotation(std::string_view text);

/*! \brief Canonical single-line writer. The empty tree serializes to "". */
std::string SerializeAnnotation(const MrTree& tree);

/*! \brief Quote and escape a literal span the way the writer does. */
std::string QuoteLiteral(std::string_view span);

/*! \brief Max concept nesting, root = 1, empty = 0. */
std::size_t TreeDepth(const MrTree& tree);

/*! \brief Max out-degree over concept nodes, counting every edge. */
std::size_t TreeWidth(const MrTree& tree);

/*! \brief Number of concept nodes (introduced ids). */
std::size_t CountConcepts(const MrTree& tree);
/*! \brief Number of edges whose target is a literal. */
std::size_t CountLiterals(const MrTree& tree);
/*! \brief Total number of edges of all kinds. */
std::size_t CountEdges(const MrTree& tree);

/*! \brief Ids introduced by the tree, in pre-order. */
std::vector<NodeId> IntroducedIds(const MrTree& tree);

/*! \brief Map from introduced id to its concept name. */
std::map<NodeId, std::string> IdConcepts(const MrTree& tree);

/*!
 * \brief NodeRefs that neither resolve within the tree nor against ids from earlier turns.
 *  Reported in pre-order, each id once.
 */
std::vector<NodeId> ValidateReferences(const MrTree& tree, const IdSet& known_ids);

/*! \brief The letter used for ids of `concept_name`: first ASCII letter, lower-cased, else 'x'. */
char IdLetter(std::string_view concept_name);

/*!
 * \brief Hands out ids following the first-letter + smallest-unused-integer convention
 *  across one dialogue.
 */
class IdAllocator {
 public:
  IdAllocator() = default;
  explicit IdAllocator(const IdSet& used) : used_(used) {}

  /*! \brief The id the next node of this concept would receive. Does not reserve it. */
  NodeId Peek(std::string_view concept_name) const { return PeekLetter(IdLetter(concept_name)); }
  NodeId PeekLetter(char letter) const;
  NodeId Allocate(std::string_view concept_name);
  void Reserve(const NodeId& id) { used_.insert(id); }
  bool Contains(const NodeId& id) const { return used_.count(id) != 0; }
  const IdSet& used() const { return used_; }

 private:
  IdSet used_;
};

// ---------------------------------------------------------------------------
// Triples

enum class TripleKind { kTop, kInstance, kRelation, kAttribute };

/*!
 * \brief One triple of the decomposition. Node arguments are indices into
 *  TripleSet::nodes. A relation whose target is a reference to an id outside the tree keeps
 *  the id as a constant in `value` and has `target == kNoNode`.
 */
struct Triple {
  static constexpr std::size_t kNoNode = static_cast<std::size_t>(-1);

  TripleKind kind;
  std::string label;     // concept for instance, relation label otherwise, "TOP" for top
  std::size_t source;    // node index
  std::size_t target = kNoNode;
  std::string value;     // literal text or external id

  bool operator==(const Triple&) const = default;
};

struct TripleSet {
  std::vector<NodeId> nodes;  // introduced ids, pre-order
  std::vector<std::string> concepts;
  std::vector<Triple> triples;

  std::size_t size() const { return triples.size(); }
  bool empty() const { return triples.empty(); }
};

/*!
 * \brief Decompose into TOP / instance / relation / attribute triples. References to ids not
 *  introduced by the tree become constants.
 */
TripleSet ExtractTriples(const MrTree& tree);

/*!
 * \brief As above, additionally requiring every external reference to be in `history`.
 * \throws UnresolvedRefError otherwise.
 */
TripleSet ExtractTriples(const MrTree& tree, const IdSet& history);

/*! \brief Human-readable rendering such as `instance(r1, reservation)`. */
std::string FormatTriple(const TripleSet& set, const Triple& triple);

}  // namespace dialtree

#endif  // DIALTREE_MEANING_REPRESENTATION_H_
