/*!
 *  Copyright (c) 2026 by Contributors
 * \file smatch.cc
 */
#include <dialtree/error.h>
#include <dialtree/random.h>
#include <dialtree/smatch.h>

#include <algorithm>
#include <cstdio>
#include <functional>
#include <numeric>
#include <set>
#include <tuple>
#include <unordered_map>

namespace dialtree {

std::vector<std::pair<NodeId, NodeId>> AlignmentMap::Pairs(const TripleSet& a,
                                                           const TripleSet& b) const {
  std::vector<std::pair<NodeId, NodeId>> out;
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (target[i]) out.emplace_back(a.nodes.at(i), b.nodes.at(*target[i]));
  }
  return out;
}

bool AlignmentMap::IsInjective() const {
  std::set<std::size_t> seen;
  for (const auto& t : target) {
    if (t && !seen.insert(*t).second) return false;
  }
  return true;
}

SmatchScore ScoreFromCounts(std::size_t matched, std::size_t total_a, std::size_t total_b) {
  SmatchScore s;
  s.matched = matched;
  s.total_a = total_a;
  s.total_b = total_b;
  if (total_a == 0 && total_b == 0) {
    s.precision = s.recall = s.f1 = 100.0;
    return s;
  }
  if (total_a == 0 || total_b == 0) return s;
  s.precision = 100.0 * static_cast<double>(matched) / static_cast<double>(total_a);
  s.recall = 100.0 * static_cast<double>(matched) / static_cast<double>(total_b);
  if (s.precision + s.recall > 0.0) {
    s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Hill climbing route: triples interned to integer keys, matches counted by sorted merge.

namespace {

using Key = std::tuple<int, int, long long, long long, int>;
constexpr long long kNone = -1;

class Interner {
 public:
  int Id(const std::string& s) {
    auto [it, inserted] = ids_.emplace(s, static_cast<int>(ids_.size()));
    return it->second;
  }

 private:
  std::unordered_map<std::string, int> ids_;
};

struct InternedTriple {
  int kind;
  int label;
  std::size_t source;
  long long target;  // node index or kNone
  int value;         // interned constant, -1 when the target is a node
};

std::vector<InternedTriple> Intern(const TripleSet& set, Interner* interner) {
  std::vector<InternedTriple> out;
  out.reserve(set.triples.size());
  for (const Triple& t : set.triples) {
    InternedTriple it;
    it.kind = static_cast<int>(t.kind);
    it.label = interner->Id(t.label);
    it.source = t.source;
    it.target = t.target == Triple::kNoNode ? kNone : static_cast<long long>(t.target);
    it.value = it.target == kNone ? interner->Id(t.value) : -1;
    out.push_back(it);
  }
  return out;
}

class Climber {
 public:
  Climber(const TripleSet& a, const TripleSet& b) : na_(a.nodes.size()), nb_(b.nodes.size()) {
    Interner interner;
    ta_ = Intern(a, &interner);
    std::vector<InternedTriple> tb = Intern(b, &interner);
    for (const InternedTriple& t : tb) {
      b_keys_.emplace_back(t.kind, t.label, static_cast<long long>(t.source), t.target, t.value);
    }
    std::sort(b_keys_.begin(), b_keys_.end());
    for (std::size_t i = 0; i < na_; ++i) {
      concept_a_.push_back(interner.Id(a.concepts[i]));
    }
    for (std::size_t j = 0; j < nb_; ++j) concept_b_.push_back(interner.Id(b.concepts[j]));
    best_possible_ = std::min(a.triples.size(), b.triples.size());
  }

  std::size_t Count(const std::vector<long long>& map) {
    scratch_.clear();
    for (const InternedTriple& t : ta_) {
      long long src = map[t.source];
      if (src == kNone) continue;
      long long tgt = kNone;
      if (t.target != kNone) {
        tgt = map[static_cast<std::size_t>(t.target)];
        if (tgt == kNone) continue;
      }
      scratch_.emplace_back(t.kind, t.label, src, tgt, t.value);
    }
    std::sort(scratch_.begin(), scratch_.end());
    std::size_t i = 0, j = 0, matched = 0;
    while (i < scratch_.size() && j < b_keys_.size()) {
      if (scratch_[i] < b_keys_[j]) {
        ++i;
      } else if (b_keys_[j] < scratch_[i]) {
        ++j;
      } else {
        ++matched;
        ++i;
        ++j;
      }
    }
    return matched;
  }

  std::vector<long long> GreedyStart() const {
    std::vector<long long> map(na_, kNone);
    std::vector<bool> used(nb_, false);
    for (std::size_t i = 0; i < na_; ++i) {
      for (std::size_t j = 0; j < nb_; ++j) {
        if (!used[j] && concept_a_[i] == concept_b_[j]) {
          map[i] = static_cast<long long>(j);
          used[j] = true;
          break;
        }
      }
    }
    return map;
  }

  std::vector<long long> RandomStart(Rng* rng) const {
    std::vector<std::size_t> order_a(na_), order_b(nb_);
    std::iota(order_a.begin(), order_a.end(), 0);
    std::iota(order_b.begin(), order_b.end(), 0);
    rng->Shuffle(&order_a);
    rng->Shuffle(&order_b);
    std::vector<long long> map(na_, kNone);
    for (std::size_t k = 0; k < std::min(na_, nb_); ++k) {
      map[order_a[k]] = static_cast<long long>(order_b[k]);
    }
    return map;
  }

  struct Move {
    bool swap;
    std::size_t i;
    std::size_t other;  // B node for reassign, A node for swap
  };

  std::size_t Climb(std::vector<long long>* map, Rng* rng) {
    std::size_t current = Count(*map);
    std::vector<Move> moves;
    while (current < best_possible_) {
      std::vector<bool> used(nb_, false);
      for (long long t : *map) {
        if (t != kNone) used[static_cast<std::size_t>(t)] = true;
      }
      moves.clear();
      for (std::size_t i = 0; i < na_; ++i) {
        for (std::size_t j = 0; j < nb_; ++j) {
          if (!used[j]) moves.push_back({false, i, j});
        }
        for (std::size_t k = i + 1; k < na_; ++k) {
          if ((*map)[i] != kNone || (*map)[k] != kNone) moves.push_back({true, i, k});
        }
      }
      rng->Shuffle(&moves);
      bool improved = false;
      for (const Move& m : moves) {
        long long saved_i = (*map)[m.i];
        long long saved_k = m.swap ? (*map)[m.other] : kNone;
        if (m.swap) {
          std::swap((*map)[m.i], (*map)[m.other]);
        } else {
          (*map)[m.i] = static_cast<long long>(m.other);
        }
        std::size_t score = Count(*map);
        if (score > current) {
          current = score;
          improved = true;
          break;
        }
        (*map)[m.i] = saved_i;
        if (m.swap) (*map)[m.other] = saved_k;
      }
      if (!improved) break;
    }
    return current;
  }

  std::size_t best_possible() const { return best_possible_; }

 private:
  std::size_t na_, nb_;
  std::vector<InternedTriple> ta_;
  std::vector<Key> b_keys_;
  std::vector<Key> scratch_;
  std::vector<int> concept_a_, concept_b_;
  std::size_t best_possible_ = 0;
};

AlignmentMap ToAlignment(const std::vector<long long>& map) {
  AlignmentMap out;
  out.target.reserve(map.size());
  for (long long t : map) {
    out.target.push_back(t == kNone ? std::nullopt
                                    : std::optional<std::size_t>(static_cast<std::size_t>(t)));
  }
  return out;
}

}  // namespace

SmatchScore Smatch(const TripleSet& a, const TripleSet& b, std::size_t restarts,
                   std::uint64_t seed) {
  if (a.empty() || b.empty()) {
    SmatchScore s = ScoreFromCounts(0, a.size(), b.size());
    s.alignment.target.assign(a.nodes.size(), std::nullopt);
    return s;
  }
  Climber climber(a, b);
  Rng rng(seed);
  std::vector<long long> best_map = climber.GreedyStart();
  std::size_t best = climber.Climb(&best_map, &rng);
  for (std::size_t r = 0; r < restarts && best < climber.best_possible(); ++r) {
    std::vector<long long> map = climber.RandomStart(&rng);
    std::size_t score = climber.Climb(&map, &rng);
    if (score > best) {
      best = score;
      best_map = std::move(map);
    }
  }
  SmatchScore s = ScoreFromCounts(best, a.size(), b.size());
  s.alignment = ToAlignment(best_map);
  return s;
}

SmatchScore Smatch(const MrTree& a, const MrTree& b, std::size_t restarts, std::uint64_t seed) {
  return Smatch(ExtractTriples(a), ExtractTriples(b), restarts, seed);
}

// ---------------------------------------------------------------------------
// Exhaustive route: string comparison of renamed triples, greedy multiset pairing.

namespace {

// Name of a's node `i` in b's namespace, empty if unmapped.
const std::string* MappedName(const TripleSet& b, const AlignmentMap& alignment, std::size_t i) {
  const auto& t = alignment.target.at(i);
  return t ? &b.nodes.at(*t) : nullptr;
}

bool SameTriple(const TripleSet& /*a*/, const Triple& ta, const TripleSet& b, const Triple& tb,
                const AlignmentMap& alignment) {
  if (ta.kind != tb.kind || ta.label != tb.label) return false;
  const std::string* src = MappedName(b, alignment, ta.source);
  if (src == nullptr || *src != b.nodes.at(tb.source)) return false;
  bool a_node = ta.target != Triple::kNoNode;
  bool b_node = tb.target != Triple::kNoNode;
  if (a_node != b_node) return false;
  if (!a_node) return ta.value == tb.value;
  const std::string* tgt = MappedName(b, alignment, ta.target);
  return tgt != nullptr && *tgt == b.nodes.at(tb.target);
}

void Enumerate(std::size_t small_n, std::size_t large_n, std::vector<std::size_t>* perm,
               std::vector<bool>* used, const std::function<void()>& visit) {
  if (perm->size() == small_n) {
    visit();
    return;
  }
  for (std::size_t j = 0; j < large_n; ++j) {
    if ((*used)[j]) continue;
    (*used)[j] = true;
    perm->push_back(j);
    Enumerate(small_n, large_n, perm, used, visit);
    perm->pop_back();
    (*used)[j] = false;
  }
}

}  // namespace

std::size_t CountMatches(const TripleSet& a, const TripleSet& b, const AlignmentMap& alignment) {
  std::vector<bool> taken(b.triples.size(), false);
  std::size_t matched = 0;
  for (const Triple& ta : a.triples) {
    for (std::size_t k = 0; k < b.triples.size(); ++k) {
      if (!taken[k] && SameTriple(a, ta, b, b.triples[k], alignment)) {
        taken[k] = true;
        ++matched;
        break;
      }
    }
  }
  return matched;
}

SmatchScore BruteForceSmatch(const MrTree& tree_a, const MrTree& tree_b) {
  TripleSet a = ExtractTriples(tree_a);
  TripleSet b = ExtractTriples(tree_b);
  if (a.empty() || b.empty()) {
    SmatchScore s = ScoreFromCounts(0, a.size(), b.size());
    s.alignment.target.assign(a.nodes.size(), std::nullopt);
    return s;
  }
  std::size_t na = a.nodes.size(), nb = b.nodes.size();
  if (std::min(na, nb) > kBruteForceNodeLimit) {
    throw TooLargeError("exhaustive smatch limited to " + std::to_string(kBruteForceNodeLimit) +
                        " nodes on the smaller side");
  }
  bool a_small = na <= nb;
  std::size_t small_n = a_small ? na : nb;
  std::size_t large_n = a_small ? nb : na;
  std::vector<std::size_t> perm;
  std::vector<bool> used(large_n, false);
  std::size_t best = 0;
  AlignmentMap best_alignment;
  best_alignment.target.assign(na, std::nullopt);
  bool first = true;
  Enumerate(small_n, large_n, &perm, &used, [&] {
    AlignmentMap m;
    m.target.assign(na, std::nullopt);
    for (std::size_t s = 0; s < small_n; ++s) {
      if (a_small) {
        m.target[s] = perm[s];
      } else {
        m.target[perm[s]] = s;
      }
    }
    std::size_t matched = CountMatches(a, b, m);
    if (first || matched > best) {
      best = matched;
      best_alignment = std::move(m);
      first = false;
    }
  });
  SmatchScore s = ScoreFromCounts(best, a.size(), b.size());
  s.alignment = std::move(best_alignment);
  return s;
}

// ---------------------------------------------------------------------------

std::uint64_t TurnSeed(std::uint64_t seed, const TurnKey& key) {
  return MixSeed(seed, Fnv1a64(key.ToString()));
}

double SmatchF1OrZero(const std::string& a, const std::string& b, std::size_t restarts,
                      std::uint64_t seed) {
  MrTree ta, tb;
  try {
    ta = ParseAnnotation(a);
    tb = ParseAnnotation(b);
  } catch (const Error&) {
    return 0.0;
  }
  return Smatch(ta, tb, restarts, seed).f1;
}

std::string ScoreHistogram::ToText() const {
  std::string out;
  char line[128];
  for (std::size_t i = 0; i < counts.size(); ++i) {
    std::snprintf(line, sizeof(line), "%g %g %zu\n", bin_edges[i], bin_edges[i + 1], counts[i]);
    out += line;
  }
  std::snprintf(line, sizeof(line), "mean %.4f\n", mean);
  out += line;
  return out;
}

ScoreHistogram PairwiseDistribution(const AnnotationSet& set_a, const AnnotationSet& set_b,
                                    std::size_t restarts, std::uint64_t seed) {
  if (set_a.size() != set_b.size() ||
      !std::equal(set_a.begin(), set_a.end(), set_b.begin(),
                  [](const auto& x, const auto& y) { return x.first == y.first; })) {
    throw KeyMismatchError("annotation sets cover different turns");
  }
  ScoreHistogram h;
  for (std::size_t i = 0; i <= ScoreHistogram::kBins; ++i) {
    h.bin_edges.push_back(100.0 * static_cast<double>(i) / ScoreHistogram::kBins);
  }
  h.counts.assign(ScoreHistogram::kBins, 0);
  std::map<std::string, std::pair<double, std::size_t>> by_dialogue;
  double total = 0.0;
  for (const auto& [key, entry] : set_a) {
    const AnnotationEntry& other = set_b.at(key);
    double f1 = SmatchF1OrZero(entry.text, other.text, restarts, TurnSeed(seed, key));
    h.per_turn[key] = f1;
    std::size_t bin = static_cast<std::size_t>(f1 / (100.0 / ScoreHistogram::kBins));
    h.counts[std::min(bin, ScoreHistogram::kBins - 1)]++;
    total += f1;
    auto& d = by_dialogue[key.dialogue_id];
    d.first += f1;
    d.second += 1;
  }
  if (!set_a.empty()) {
    h.mean = total / static_cast<double>(set_a.size());
    double dsum = 0.0;
    for (const auto& [id, d] : by_dialogue) dsum += d.first / static_cast<double>(d.second);
    h.dialogue_mean = dsum / static_cast<double>(by_dialogue.size());
  }
  return h;
}

}  // namespace dialtree
