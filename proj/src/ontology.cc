/*!
 *  Copyright (c) 2026 by Contributors
 * \file ontology.cc
 */
#include <dialtree/error.h>
#include <dialtree/ontology.h>

#include <fstream>
#include <sstream>
#include <utility>

namespace dialtree {

namespace {

constexpr std::string_view kSeedOntology = R"(# Hotel-booking seed ontology: every symbol of the reference example.
concept reservation domain
concept hotel domain
concept chambre domain
concept et operator
concept adresse general-purpose
concept duree general-purpose
concept evenement general-purpose

relation reservation objet hotel
relation reservation etat LITERAL
relation hotel chambre et
relation hotel date-sejour evenement
relation hotel duree-sejour duree
relation hotel lieu adresse
relation et arg1 chambre
relation et arg2 chambre
relation chambre type LITERAL
relation chambre quantite LITERAL
relation evenement nom LITERAL
relation duree quantite LITERAL
relation duree unite LITERAL
relation adresse ville LITERAL
relation adresse quartier LITERAL
)";

std::vector<std::string> SplitFields(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.emplace_back(line.substr(start, i - start));
  }
  return out;
}

bool ParseCategory(std::string_view text, ConceptCategory* out) {
  if (text == "domain") {
    *out = ConceptCategory::kDomain;
  } else if (text == "operator") {
    *out = ConceptCategory::kOperator;
  } else if (text == "general-purpose") {
    *out = ConceptCategory::kGeneralPurpose;
  } else {
    return false;
  }
  return true;
}

bool IsKindKeyword(std::string_view kind) { return kind == kLiteralKind || kind == kRefKind; }

}  // namespace

std::string_view CategoryName(ConceptCategory category) {
  switch (category) {
    case ConceptCategory::kDomain:
      return "domain";
    case ConceptCategory::kOperator:
      return "operator";
    case ConceptCategory::kGeneralPurpose:
      return "general-purpose";
  }
  return "?";
}

std::string_view OntologyErrorKindName(OntologyErrorKind kind) {
  switch (kind) {
    case OntologyErrorKind::kUnknownConcept:
      return "unknown-concept";
    case OntologyErrorKind::kUnknownRelation:
      return "unknown-relation";
    case OntologyErrorKind::kBadChild:
      return "bad-child";
    case OntologyErrorKind::kBadLiteralSlot:
      return "bad-literal-slot";
  }
  return "?";
}

OntologySpec::OntologySpec(std::map<std::string, ConceptCategory> concepts,
                           std::set<RelationRule> relations)
    : concepts_(std::move(concepts)), relations_(std::move(relations)) {
  for (const RelationRule& rule : relations_) {
    if (!concepts_.count(rule.parent)) {
      throw DanglingConceptError("relation '" + rule.label + "' has undeclared parent '" +
                                 rule.parent + "'");
    }
    if (!IsKindKeyword(rule.child_kind) && !concepts_.count(rule.child_kind)) {
      throw DanglingConceptError("relation '" + rule.parent + " " + rule.label +
                                 "' names undeclared concept '" + rule.child_kind + "'");
    }
    index_[rule.parent][rule.label].insert(rule.child_kind);
  }
}

std::set<std::string> OntologySpec::AllowedRelations(std::string_view parent) const {
  if (!HasConcept(parent)) throw UnknownConceptError("unknown concept '" + std::string(parent) + "'");
  std::set<std::string> labels;
  auto it = index_.find(std::string(parent));
  if (it != index_.end()) {
    for (const auto& [label, kinds] : it->second) labels.insert(label);
  }
  return labels;
}

std::set<std::string> OntologySpec::AllowedChildren(std::string_view parent,
                                                    std::string_view label) const {
  if (!HasConcept(parent)) throw UnknownConceptError("unknown concept '" + std::string(parent) + "'");
  auto it = index_.find(std::string(parent));
  if (it != index_.end()) {
    auto jt = it->second.find(std::string(label));
    if (jt != it->second.end()) return jt->second;
  }
  throw UnknownRelationError("concept '" + std::string(parent) + "' has no relation '" +
                             std::string(label) + "'");
}

std::set<std::string> OntologySpec::AllowedChildConcepts(std::string_view parent,
                                                         std::string_view label) const {
  std::set<std::string> out;
  for (const std::string& kind : AllowedChildren(parent, label)) {
    if (!IsKindKeyword(kind)) out.insert(kind);
  }
  return out;
}

bool OntologySpec::AdmitsLiteral(std::string_view parent, std::string_view label) const {
  return AllowedChildren(parent, label).count(std::string(kLiteralKind)) != 0;
}

bool OntologySpec::AdmitsRef(std::string_view parent, std::string_view label) const {
  for (const std::string& kind : AllowedChildren(parent, label)) {
    if (kind != kLiteralKind) return true;
  }
  return false;
}

std::string OntologySpec::ToText() const {
  std::ostringstream os;
  for (const auto& [name, category] : concepts_) {
    os << "concept " << name << ' ' << CategoryName(category) << '\n';
  }
  for (const RelationRule& rule : relations_) {
    os << "relation " << rule.parent << ' ' << rule.label << ' ' << rule.child_kind << '\n';
  }
  return os.str();
}

OntologySpec LoadOntology(std::string_view document) {
  std::map<std::string, ConceptCategory> concepts;
  std::set<RelationRule> relations;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= document.size()) {
    std::size_t end = document.find('\n', pos);
    if (end == std::string_view::npos) end = document.size();
    std::string_view line = document.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (std::size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::vector<std::string> fields = SplitFields(line);
    if (fields.empty()) continue;
    if (fields[0] == "concept") {
      if (fields.size() != 3) throw FormatError("concept record needs <name> <category>", line_no);
      ConceptCategory category;
      if (!ParseCategory(fields[2], &category)) {
        throw FormatError("unknown concept category '" + fields[2] + "'", line_no);
      }
      if (IsKindKeyword(fields[1])) throw FormatError("reserved concept name '" + fields[1] + "'", line_no);
      auto [it, inserted] = concepts.emplace(fields[1], category);
      if (!inserted && it->second != category) {
        throw FormatError("concept '" + fields[1] + "' declared with two categories", line_no);
      }
    } else if (fields[0] == "relation") {
      if (fields.size() != 4) {
        throw FormatError("relation record needs <parent> <label> <child-kind>", line_no);
      }
      relations.insert(RelationRule{fields[1], fields[2], fields[3]});
    } else {
      throw FormatError("unknown record type '" + fields[0] + "'", line_no);
    }
  }
  return OntologySpec(std::move(concepts), std::move(relations));
}

OntologySpec LoadOntologyFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open ontology file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return LoadOntology(buffer.str());
}

std::string_view SeedOntologyText() { return kSeedOntology; }

namespace {

void ValidateNode(const OntologySpec& spec, const ConceptNode& node,
                  std::vector<OntologyError>* errors) {
  bool known = spec.HasConcept(node.concept_name);
  if (!known) {
    errors->push_back({OntologyErrorKind::kUnknownConcept, node.id,
                       "concept '" + node.concept_name + "' is not declared"});
  }
  for (const RelationEdge& edge : node.edges) {
    if (known) {
      std::set<std::string> labels = spec.AllowedRelations(node.concept_name);
      if (!labels.count(edge.label)) {
        errors->push_back({OntologyErrorKind::kUnknownRelation, node.id,
                           "'" + node.concept_name + "' has no relation '" + edge.label + "'"});
      } else if (edge.IsLiteral()) {
        if (!spec.AdmitsLiteral(node.concept_name, edge.label)) {
          errors->push_back({OntologyErrorKind::kBadLiteralSlot, node.id,
                             "'" + node.concept_name + " :" + edge.label + "' takes no literal"});
        }
      } else if (edge.IsRef()) {
        if (!spec.AdmitsRef(node.concept_name, edge.label)) {
          errors->push_back({OntologyErrorKind::kBadChild, node.id,
                             "'" + node.concept_name + " :" + edge.label +
                                 "' cannot take reference " + edge.ref().id});
        }
      } else {
        const ConceptNode& child = edge.child();
        if (!spec.AllowedChildConcepts(node.concept_name, edge.label).count(child.concept_name)) {
          errors->push_back({OntologyErrorKind::kBadChild, node.id,
                             "'" + node.concept_name + " :" + edge.label + "' cannot take '" +
                                 child.concept_name + "'"});
        }
      }
    }
    if (edge.IsConcept()) ValidateNode(spec, edge.child(), errors);
  }
}

}  // namespace

std::vector<OntologyError> ValidateTree(const OntologySpec& spec, const MrTree& tree) {
  std::vector<OntologyError> errors;
  if (tree.root) ValidateNode(spec, *tree.root, &errors);
  return errors;
}

}  // namespace dialtree
