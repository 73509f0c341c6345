/*!
 *  Copyright (c) 2026 by Contributors
 * \file dialtree/pipeline.h
 * \brief Corpus annotation, merging, split evaluation, corpus statistics and the
 *  annotate / estimate / filter / evaluate iteration driver.
 */
#ifndef DIALTREE_PIPELINE_H_
#define DIALTREE_PIPELINE_H_

#include <dialtree/annotation_set.h>
#include <dialtree/corpus.h>
#include <dialtree/grammar_decoder.h>
#include <dialtree/language_model.h>
#include <dialtree/ontology.h>
#include <dialtree/quality_estimator.h>

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dialtree {

struct AnnotateOptions {
  const OntologySpec* ontology = nullptr;  // required for constrained decoding
  std::size_t budget = kDefaultBudget;
  std::size_t window = kDefaultHistoryWindow;
  DecodeMode mode = DecodeMode::kGreedy;
  std::uint64_t seed = 0;
};

/*!
 * \brief Annotates every record in the requested modes (unconstrained and/or constrained).
 *  Per-turn decode failures become entry statuses; only SessionError aborts the run.
 *  Constrained literals may copy from every agent and user text inside the history window, and
 *  references may point at ids introduced by earlier predictions of the same mode.
 */
std::map<AnnotationMode, AnnotationSet> AnnotateCorpus(LanguageModel& lm, const Corpus& corpus,
                                                       const AnnotateOptions& options,
                                                       const std::vector<AnnotationMode>& modes);

/*!
 * \brief An unconstrained prediction that is the empty annotation stays empty, otherwise the
 *  constrained prediction is taken.
 * \throws KeyMismatchError if the key sets differ.
 */
AnnotationSet MergePredictions(const AnnotationSet& unconstrained, const AnnotationSet& constrained);

/*! \brief True when the entry was produced without error and its text parses. */
bool IsUsable(const AnnotationEntry& entry);

struct SplitStats {
  std::size_t n = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 when n < 2

  /*! \brief "mean +/-std" with two decimals, "-" when the split is empty. */
  std::string Format() const;
};

SplitStats Summarize(const std::vector<double>& scores);

struct EvalReport {
  SplitStats full;   // turns whose reference is non-empty
  SplitStats empty;  // turns whose reference is the empty annotation
  std::size_t ontology_errors = 0;  // findings over usable predictions
  std::size_t parse_failures = 0;   // predictions that do not parse or failed to decode
  std::map<TurnKey, double> per_turn;

  std::size_t evaluated() const { return full.n + empty.n; }
  std::string ToText() const;
};

/*!
 * \brief Smatch of every prediction against its reference, split on whether the reference is
 *  empty. Unusable predictions score 0. Ontology errors are counted when `ontology` is given.
 * \throws KeyMismatchError if a prediction has no reference.
 */
EvalReport EvaluateSplit(const AnnotationSet& predictions, const AnnotationSet& references,
                         std::size_t restarts = 8, std::uint64_t seed = 0,
                         const OntologySpec* ontology = nullptr);

struct StatsReport {
  std::size_t dialogues = 0;
  std::size_t turns = 0;           // user turns in the corpus
  std::size_t annotated = 0;       // annotations measured
  double avg_user_turns = 0.0;     // per dialogue
  double pct_width_gt2 = 0.0;      // of annotated turns
  double pct_depth_gt2 = 0.0;

  std::string ToText() const;
};

/*! \throws AnnotationParseError if an annotation does not parse. */
StatsReport CorpusStats(const AnnotationSet& annotations, const Corpus& corpus);

// ---------------------------------------------------------------------------

struct IterationConfig {
  std::string corpus;    // turns to annotate
  std::string clean;     // human-annotated turns for estimator training and evaluation
  std::string unseen;    // optional held-out annotated fold
  std::string ontology = "seed";  // file path or "seed"
  std::string lm;        // replay:FILE, random:SEED or proc:CMD
  std::vector<AnnotationMode> modes = {AnnotationMode::kConstrained};
  bool merge = false;
  DecodeMode decode_mode = DecodeMode::kGreedy;
  std::size_t budget = kDefaultBudget;
  std::size_t window = kDefaultHistoryWindow;
  std::optional<double> delta;
  std::optional<double> percentile;
  std::size_t restarts = 8;
  std::uint64_t seed = 0;
  std::string embedder = "hash";
  SvrConfig svr;
  std::string output_dir;

  /*! \brief The key=value form, one key per line in a fixed order. */
  std::string ToText() const;
};

/*!
 * \brief Reads `key = value` lines; `#` starts a comment. Relative paths (and the file of a
 *  replay model) are resolved against `base_dir`.
 * \throws ConfigError on unknown keys, bad values, missing required keys, or missing files.
 */
IterationConfig ParseIterationConfig(std::string_view text, const std::string& base_dir = ".");
IterationConfig LoadIterationConfig(const std::string& path);

struct IterationArtifacts {
  std::map<AnnotationMode, AnnotationSet> corpus_annotations;
  AnnotationMode selected = AnnotationMode::kConstrained;
  SvrModel estimator;
  double delta = 0.0;
  FilterResult filter;
  std::vector<TurnKey> invalid;  // turns excluded before filtering
  std::string training_jsonl;
  std::map<AnnotationMode, EvalReport> clean_reports;
  std::map<AnnotationMode, EvalReport> unseen_reports;
  std::string report;
  std::string manifest;
};

/*!
 * \brief annotate the clean set, train the estimator on its smatch scores, annotate the corpus,
 *  predict and filter, write prompt/response training pairs for kept usable ontology-valid turns,
 *  evaluate on the clean and unseen folds. Files are written to output_dir when it is set.
 * \throws ConfigError, SessionError
 */
IterationArtifacts RunIteration(const IterationConfig& config);

}  // namespace dialtree

#endif  // DIALTREE_PIPELINE_H_
