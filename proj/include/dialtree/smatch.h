/*!
 *  Copyright (c) 2026 by Contributors
 * \file dialtree/smatch.h
 * \brief Semantic-match F1 between two annotations, maximized over injective node alignments.
 *
 * Two routes are provided: a seeded hill climber (the production scorer) and an exhaustive
 * enumeration used as an exact oracle on small trees. Both count matches as the multiset
 * intersection of the triples of `a`, renamed through the alignment, with the triples of `b`.
 */
#ifndef DIALTREE_SMATCH_H_
#define DIALTREE_SMATCH_H_

#include <dialtree/annotation_set.h>
#include <dialtree/meaning_representation.h>

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dialtree {

/*!
 * \brief Injective partial mapping from node indices of `a` to node indices of `b`
 *  (indices into TripleSet::nodes). Unmapped entries are std::nullopt.
 */
struct AlignmentMap {
  std::vector<std::optional<std::size_t>> target;

  /*! \brief Pairs as ids, for display. */
  std::vector<std::pair<NodeId, NodeId>> Pairs(const TripleSet& a, const TripleSet& b) const;
  bool IsInjective() const;
};

struct SmatchScore {
  double precision = 0.0;  // percent, matched / total_a
  double recall = 0.0;     // percent, matched / total_b
  double f1 = 0.0;         // percent
  std::size_t matched = 0;
  std::size_t total_a = 0;
  std::size_t total_b = 0;
  AlignmentMap alignment;
};

inline constexpr std::size_t kDefaultRestarts = 8;
inline constexpr std::size_t kBruteForceNodeLimit = 8;

/*!
 * \brief Best score over one concept-matching greedy start plus `restarts` random starts,
 *  each refined by first-improvement hill climbing (reassign and swap moves, order shuffled).
 *  Both empty scores 100, exactly one empty scores 0. Deterministic for a fixed seed.
 */
SmatchScore Smatch(const MrTree& a, const MrTree& b, std::size_t restarts = kDefaultRestarts,
                   std::uint64_t seed = 0);
SmatchScore Smatch(const TripleSet& a, const TripleSet& b, std::size_t restarts = kDefaultRestarts,
                   std::uint64_t seed = 0);

/*!
 * \brief Exact optimum by enumerating every injective mapping of the smaller node set.
 * \throws TooLargeError when min(#nodes(a), #nodes(b)) exceeds kBruteForceNodeLimit.
 */
SmatchScore BruteForceSmatch(const MrTree& a, const MrTree& b);

/*! \brief Number of triples of `a` matched in `b` under `alignment`. */
std::size_t CountMatches(const TripleSet& a, const TripleSet& b, const AlignmentMap& alignment);

/*! \brief F1 from counts with the empty-tree conventions applied. */
SmatchScore ScoreFromCounts(std::size_t matched, std::size_t total_a, std::size_t total_b);

/*!
 * \brief Histogram of per-turn scores between two sets over the same keys.
 *  Unparseable annotations score 0 against anything.
 */
struct ScoreHistogram {
  static constexpr std::size_t kBins = 20;

  std::vector<double> bin_edges;       // kBins + 1 edges over [0, 100]
  std::vector<std::size_t> counts;     // kBins counts; 100 lands in the last bin
  double mean = 0.0;                   // mean over turns
  double dialogue_mean = 0.0;          // mean over dialogues of their per-turn means
  std::map<TurnKey, double> per_turn;

  /*! \brief `bin_low bin_high count` lines then `mean <value>`. */
  std::string ToText() const;
};

/*! \throws KeyMismatchError if the key sets differ. */
ScoreHistogram PairwiseDistribution(const AnnotationSet& set_a, const AnnotationSet& set_b,
                                    std::size_t restarts = kDefaultRestarts,
                                    std::uint64_t seed = 0);

/*! \brief Per-turn smatch seed derived from a run seed and the turn key, independent of order. */
std::uint64_t TurnSeed(std::uint64_t seed, const TurnKey& key);

/*! \brief F1 of two annotation texts, 0 if either fails to parse. */
double SmatchF1OrZero(const std::string& a, const std::string& b, std::size_t restarts,
                      std::uint64_t seed);

}  // namespace dialtree

#endif  // DIALTREE_SMATCH_H_
