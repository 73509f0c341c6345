/*!
 *  Copyright (c) 2026 by Contributors
 * \file dialtree/annotation_set.h
 * \brief Per-turn annotations keyed by (dialogue, turn), with provenance.
 */
#ifndef DIALTREE_ANNOTATION_SET_H_
#define DIALTREE_ANNOTATION_SET_H_

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace dialtree {

struct TurnKey {
  std::string dialogue_id;
  std::size_t turn_index = 0;

  auto operator<=>(const TurnKey&) const = default;
  std::string ToString() const { return dialogue_id + "#" + std::to_string(turn_index); }
};

enum class AnnotationMode { kUnconstrained, kConstrained, kMerged, kHuman };

std::string_view ModeName(AnnotationMode mode);
/*! \throws FormatError for unknown names. */
AnnotationMode ParseMode(std::string_view name);

/*! \brief Outcome of producing one annotation. */
enum class TurnStatus { kOk, kParseError, kTruncated, kDeadEnd, kFailed };

std::string_view StatusName(TurnStatus status);
TurnStatus ParseStatus(std::string_view name);

struct AnnotationEntry {
  std::string text;
  AnnotationMode mode = AnnotationMode::kHuman;
  bool parse_ok = true;
  TurnStatus status = TurnStatus::kOk;
  std::optional<double> predicted_score;

  bool operator==(const AnnotationEntry&) const = default;
};

using AnnotationSet = std::map<TurnKey, AnnotationEntry>;

/*! \brief Text file: a `#annotation-set v1` header then one tab-separated line per turn:
 *  dialogue_id, turn_index, mode, status, predicted score (or `-`), escaped annotation. */
std::string WriteAnnotationSet(const AnnotationSet& set);
AnnotationSet ReadAnnotationSet(std::string_view text);

inline constexpr std::string_view kAnnotationSetHeader = "#annotation-set v1";

/*! \brief Backslash-escape tabs, newlines, carriage returns and backslashes. */
std::string EscapeField(std::string_view text);
std::string UnescapeField(std::string_view text);

}  // namespace dialtree

#endif  // DIALTREE_ANNOTATION_SET_H_
