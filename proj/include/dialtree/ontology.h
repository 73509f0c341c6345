/*!
 *  Copyright (c) 2026 by Contributors
 * \file dialtree/ontology.h
 * \brief Concept categories, relation admissibility and ontology validation of trees.
 *
 * File format (UTF-8, one record per line, `#` starts a comment):
 *
 *     concept  <name> <domain|operator|general-purpose>
 *     relation <parent> <label> <child-kind>
 *
 * where child-kind is a declared concept name, LITERAL or REF.
 */
#ifndef DIALTREE_ONTOLOGY_H_
#define DIALTREE_ONTOLOGY_H_

#include <dialtree/meaning_representation.h>

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace dialtree {

enum class ConceptCategory { kDomain, kOperator, kGeneralPurpose };

std::string_view CategoryName(ConceptCategory category);

inline constexpr std::string_view kLiteralKind = "LITERAL";
inline constexpr std::string_view kRefKind = "REF";

struct RelationRule {
  std::string parent;
  std::string label;
  std::string child_kind;  // concept name, LITERAL or REF

  auto operator<=>(const RelationRule&) const = default;
};

class OntologySpec {
 public:
  OntologySpec() = default;

  /*! \brief Build from declarations. \throws DanglingConceptError on undeclared references. */
  OntologySpec(std::map<std::string, ConceptCategory> concepts, std::set<RelationRule> relations);

  const std::map<std::string, ConceptCategory>& concepts() const { return concepts_; }
  const std::set<RelationRule>& relations() const { return relations_; }

  bool HasConcept(std::string_view name) const { return concepts_.count(std::string(name)) != 0; }

  /*! \throws UnknownConceptError */
  std::set<std::string> AllowedRelations(std::string_view parent) const;

  /*! \brief Declared child kinds for (parent, label). \throws UnknownConceptError, UnknownRelationError */
  std::set<std::string> AllowedChildren(std::string_view parent, std::string_view label) const;

  /*! \brief Concept-valued child kinds only. */
  std::set<std::string> AllowedChildConcepts(std::string_view parent, std::string_view label) const;
  bool AdmitsLiteral(std::string_view parent, std::string_view label) const;
  /*! \brief REF is admissible wherever a concept child is, or where declared explicitly. */
  bool AdmitsRef(std::string_view parent, std::string_view label) const;

  /*! \brief Serialize back to the line format, sorted. */
  std::string ToText() const;

 private:
  std::map<std::string, ConceptCategory> concepts_;
  std::set<RelationRule> relations_;
  // parent -> label -> child kinds
  std::map<std::string, std::map<std::string, std::set<std::string>>> index_;
};

/*! \throws FormatError, DanglingConceptError */
OntologySpec LoadOntology(std::string_view document);
OntologySpec LoadOntologyFile(const std::string& path);

enum class OntologyErrorKind { kUnknownConcept, kUnknownRelation, kBadChild, kBadLiteralSlot };

std::string_view OntologyErrorKindName(OntologyErrorKind kind);

struct OntologyError {
  OntologyErrorKind kind;
  NodeId node;
  std::string detail;

  bool operator==(const OntologyError&) const = default;
};

/*! \brief Findings in pre-order; empty iff the tree is admissible. */
std::vector<OntologyError> ValidateTree(const OntologySpec& spec, const MrTree& tree);

/*! \brief The ontology covering every symbol of the reference hotel-booking example. */
std::string_view SeedOntologyText();

}  // namespace dialtree

#endif  // DIALTREE_ONTOLOGY_H_
