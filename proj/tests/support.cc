/*!
 *  Copyright (c) 2026 by Contributors
 * \file support.cc
 */
#include "support.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

#ifndef DIALTREE_FIXTURE_DIR
#error "DIALTREE_FIXTURE_DIR must be defined"
#endif

namespace dialtree::testing {

std::string FixturePath(const std::string& name) { return std::string(DIALTREE_FIXTURE_DIR) + "/" + name; }

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string ReadFixture(const std::string& name) { return ReadFile(FixturePath(name)); }

std::string BookingText() { return ReadFixture("booking.mr"); }

namespace {

const std::vector<std::string> kConcepts = {"reservation", "hotel", "chambre", "et", "adresse",
                                            "duree", "evenement", "prix_total", "x-ray", "Ville.2"};
const std::vector<std::string> kLabels = {"objet", "chambre", "arg1", "arg2", "type", "lieu",
                                          "ville", "quantite", "etat", "date-sejour", "ARG0"};
const std::vector<std::string> kPieces = {"a", "b", "z", " ", "é", "Noël", "\"", "\\", "(", ")",
                                          ":", "/", "1", "de Paris", "\t"};

std::string Pick(Rng& rng, const std::vector<std::string>& pool) { return pool[rng.Below(pool.size())]; }

}  // namespace

MrTree RandomTree(Rng& rng, const TreeShape& shape) {
  std::size_t target = 1 + rng.Below(shape.max_nodes);
  IdAllocator ids;
  std::vector<NodeId> introduced;
  std::size_t made = 0;

  auto make_node = [&](auto&& self) -> ConceptNode {
    ConceptNode node;
    node.concept_name = Pick(rng, kConcepts);
    node.id = ids.Allocate(node.concept_name);
    introduced.push_back(node.id);
    ++made;
    std::size_t edges = rng.Below(shape.max_edges + 1);
    for (std::size_t e = 0; e < edges; ++e) {
      RelationEdge edge{Pick(rng, kLabels), Literal{}};
      std::uint64_t kind = rng.Below(10);
      if (kind < 4 && made < target) {
        edge.target = Box<ConceptNode>(self(self));
      } else if (kind < 8 && shape.literals) {
        std::string span;
        std::size_t pieces = rng.Below(4);
        for (std::size_t p = 0; p < pieces; ++p) span += Pick(rng, kPieces);
        edge.target = Literal{span};
      } else if (shape.refs) {
        if (shape.external_refs && rng.Below(3) == 0) {
          edge.target = NodeRef{"q" + std::to_string(1 + rng.Below(3))};
        } else {
          edge.target = NodeRef{introduced[rng.Below(introduced.size())]};
        }
      } else {
        continue;
      }
      node.edges.push_back(std::move(edge));
    }
    return node;
  };
  MrTree tree;
  tree.root = make_node(make_node);
  return tree;
}

std::string TempDir(const std::string& tag) {
  namespace fs = std::filesystem;
  static int counter = 0;
  fs::path dir = fs::temp_directory_path() /
                 ("dialtree-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

}  // namespace dialtree::testing
