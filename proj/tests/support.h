/*!
 *  Copyright (c) 2026 by Contributors
 * \file support.h
 * \brief Shared helpers for the test binaries.
 */
#ifndef DIALTREE_TESTS_SUPPORT_H_
#define DIALTREE_TESTS_SUPPORT_H_

#include <dialtree/meaning_representation.h>
#include <dialtree/random.h>

#include <cstddef>
#include <string>
#include <vector>

namespace dialtree::testing {

std::string FixturePath(const std::string& name);
std::string ReadFile(const std::string& path);
std::string ReadFixture(const std::string& name);

/*! \brief The reference example as a multi-line annotation. */
std::string BookingText();

struct TreeShape {
  std::size_t max_nodes = 8;
  std::size_t max_edges = 4;
  bool literals = true;
  bool refs = true;
  bool external_refs = false;  // refs to ids outside the tree
};

/*!
 * \brief A random well-formed tree. Concepts, labels and literal characters come from small
 *  pools, literals include quotes, backslashes and non-ASCII text, ids follow the allocator.
 */
MrTree RandomTree(Rng& rng, const TreeShape& shape = {});

/*! \brief Fresh temporary directory under the system temp path. */
std::string TempDir(const std::string& tag);

}  // namespace dialtree::testing

#endif  // DIALTREE_TESTS_SUPPORT_H_
