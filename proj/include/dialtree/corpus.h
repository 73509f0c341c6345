/*!
 *  Copyright (c) 2026 by Contributors
 * \file dialtree/corpus.h
 * \brief Dialogue corpus records.
 *
 * One record per line, tab-separated:
 *
 *     dialogue_id  turn_index  agent_text  user_text  [annotation]
 *
 * Text fields use the backslash escapes of annotation sets. A record with four fields has no
 * reference; a fifth field, even empty, is the reference (empty means the empty annotation).
 * Blank lines and lines starting with `#` are skipped.
 */
#ifndef DIALTREE_CORPUS_H_
#define DIALTREE_CORPUS_H_

#include <dialtree/annotation_set.h>
#include <dialtree/language_model.h>
#include <dialtree/ontology.h>

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dialtree {

struct CorpusRecord {
  std::string dialogue_id;
  std::size_t turn_index = 0;
  std::string agent_text;
  std::string user_text;
  std::optional<std::string> reference_annotation;

  TurnKey key() const { return {dialogue_id, turn_index}; }
  bool operator==(const CorpusRecord&) const = default;
};

/*! \brief Records sorted by (dialogue_id, turn_index). */
using Corpus = std::vector<CorpusRecord>;

/*!
 * \throws FormatError with the line number for bad field counts, bad indices, or
 *  non-consecutive turn indices within a dialogue.
 * \throws DuplicateKeyError, AnnotationParseError
 */
Corpus IngestCorpus(std::string_view text);
Corpus IngestCorpusFile(const std::string& path);

std::string WriteCorpus(const Corpus& corpus);

/*! \brief Reference annotations as an annotation set in human mode. */
AnnotationSet ReferenceAnnotations(const Corpus& corpus);

/*! \brief Number of distinct dialogues. */
std::size_t CountDialogues(const Corpus& corpus);

/*! \brief Turn pairs of the record's dialogue up to and including it. */
std::vector<DialogueTurnPair> HistoryUpTo(const Corpus& corpus, std::size_t record);

/*! \brief The rendered prompt for a record with its truncated history. */
std::string PromptFor(const Corpus& corpus, std::size_t record, std::size_t window);

/*!
 * \brief Word-level pieces for a replay vocabulary: notation punctuation, ontology symbols
 *  with their leading markers, and every whitespace-separated word of the corpus texts with and
 *  without a leading space. Sorted, without duplicates.
 */
std::vector<std::string> ReplayPieces(const OntologySpec& ontology, const Corpus& corpus);

/*!
 * \brief Replay-model lines pairing each record's prompt with its reference as response,
 *  preceded by a {"pieces": ...} line when pieces are given.
 */
std::string MakeReplayJsonl(const Corpus& corpus, std::size_t window,
                            const std::vector<std::string>& pieces = {});

}  // namespace dialtree

#endif  // DIALTREE_CORPUS_H_
