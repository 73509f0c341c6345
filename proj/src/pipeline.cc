/*!
 *  Copyright (c) 2026 by Contributors
 * \file pipeline.cc
 */
#include <dialtree/error.h>
#include <dialtree/meaning_representation.h>
#include <dialtree/pipeline.h>
#include <dialtree/random.h>
#include <dialtree/smatch.h>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace dialtree {

namespace fs = std::filesystem;

namespace {

std::string Fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

std::string Trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

bool IsUsable(const AnnotationEntry& entry) {
  if (entry.status != TurnStatus::kOk) return false;
  try {
    ParseAnnotation(entry.text);
    return true;
  } catch (const Error&) {
    return false;
  }
}

std::map<AnnotationMode, AnnotationSet> AnnotateCorpus(LanguageModel& lm, const Corpus& corpus,
                                                       const AnnotateOptions& options,
                                                       const std::vector<AnnotationMode>& modes) {
  std::map<AnnotationMode, AnnotationSet> out;
  bool constrained = false;
  for (AnnotationMode m : modes) {
    if (m != AnnotationMode::kConstrained && m != AnnotationMode::kUnconstrained) {
      throw ConfigError("only unconstrained and constrained decoding can annotate a corpus");
    }
    constrained = constrained || m == AnnotationMode::kConstrained;
    out[m];
  }
  if (constrained && options.ontology == nullptr) throw ConfigError("constrained decoding needs an ontology");
  std::shared_ptr<const TokenTextIndex> index;
  if (constrained) index = std::make_shared<TokenTextIndex>(lm, "\"\\");

  std::map<AnnotationMode, IdSet> known;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const CorpusRecord& rec = corpus[i];
    if (i == 0 || corpus[i - 1].dialogue_id != rec.dialogue_id) known.clear();
    std::vector<DialogueTurnPair> history = TruncateHistory(HistoryUpTo(corpus, i), options.window);
    std::string prompt = RenderPrompt(history);
    std::vector<std::string> turns;
    for (const DialogueTurnPair& p : history) {
      turns.push_back(p.agent);
      turns.push_back(p.user);
    }
    DecodeOptions decode{options.budget, options.mode, TurnSeed(options.seed, rec.key())};
    for (AnnotationMode mode : modes) {
      AnnotationEntry entry;
      entry.mode = mode;
      try {
        if (mode == AnnotationMode::kUnconstrained) {
          entry.text = UnconstrainedDecode(lm, prompt, decode).text;
        } else {
          GrammarContext ctx{options.ontology, turns, known[mode], true};
          entry.text = ConstrainedDecode(lm, prompt, ctx, decode, index).text;
        }
        entry.status = TurnStatus::kOk;
      } catch (const SessionError&) {
        throw;
      } catch (const AnnotationTruncatedError&) {
        entry.status = TurnStatus::kTruncated;
      } catch (const DeadEndError&) {
        entry.status = TurnStatus::kDeadEnd;
      } catch (const Error&) {
        entry.status = TurnStatus::kFailed;
      }
      entry.parse_ok = false;
      if (entry.status == TurnStatus::kOk) {
        try {
          MrTree tree = ParseAnnotation(entry.text);
          entry.parse_ok = true;
          for (const NodeId& id : IntroducedIds(tree)) known[mode].insert(id);
        } catch (const Error&) {
          entry.status = TurnStatus::kParseError;
        }
      }
      out[mode].emplace(rec.key(), std::move(entry));
    }
  }
  return out;
}

AnnotationSet MergePredictions(const AnnotationSet& unconstrained, const AnnotationSet& constrained) {
  if (unconstrained.size() != constrained.size() ||
      !std::equal(unconstrained.begin(), unconstrained.end(), constrained.begin(),
                  [](const auto& a, const auto& b) { return a.first == b.first; })) {
    throw KeyMismatchError("merged annotation sets must cover the same turns");
  }
  AnnotationSet out;
  for (const auto& [key, u] : unconstrained) {
    bool keep_empty = IsUsable(u) && ParseAnnotation(u.text).empty();
    AnnotationEntry e = keep_empty ? u : constrained.at(key);
    e.mode = AnnotationMode::kMerged;
    e.predicted_score.reset();
    out.emplace(key, std::move(e));
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string SplitStats::Format() const {
  if (n == 0) return "-";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f +/-%.2f", mean, stddev);
  return buf;
}

SplitStats Summarize(const std::vector<double>& scores) {
  SplitStats s;
  s.n = scores.size();
  if (s.n == 0) return s;
  double sum = 0.0;
  for (double v : scores) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : scores) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  return s;
}

std::string EvalReport::ToText() const {
  std::string out;
  out += "full\t" + full.Format() + "\tn=" + std::to_string(full.n) + "\n";
  out += "empty\t" + empty.Format() + "\tn=" + std::to_string(empty.n) + "\n";
  out += "ontology_errors\t" + std::to_string(ontology_errors) + "\n";
  out += "parse_failures\t" + std::to_string(parse_failures) + "\n";
  return out;
}

EvalReport EvaluateSplit(const AnnotationSet& predictions, const AnnotationSet& references,
                         std::size_t restarts, std::uint64_t seed, const OntologySpec* ontology) {
  EvalReport report;
  std::vector<double> full, empty;
  for (const auto& [key, pred] : predictions) {
    auto ref = references.find(key);
    if (ref == references.end()) throw KeyMismatchError("no reference for turn " + key.ToString());
    MrTree ref_tree;
    try {
      ref_tree = ParseAnnotation(ref->second.text);
    } catch (const Error& e) {
      throw AnnotationParseError("reference " + key.ToString() + ": " + e.what());
    }
    double score = 0.0;
    if (IsUsable(pred)) {
      MrTree tree = ParseAnnotation(pred.text);
      score = Smatch(tree, ref_tree, restarts, TurnSeed(seed, key)).f1;
      if (ontology) report.ontology_errors += ValidateTree(*ontology, tree).size();
    } else {
      ++report.parse_failures;
    }
    report.per_turn[key] = score;
    (ref_tree.empty() ? empty : full).push_back(score);
  }
  report.full = Summarize(full);
  report.empty = Summarize(empty);
  return report;
}

std::string StatsReport::ToText() const {
  std::string out;
  out += "dialogues\t" + std::to_string(dialogues) + "\n";
  out += "user_turns\t" + std::to_string(turns) + "\n";
  out += "annotated\t" + std::to_string(annotated) + "\n";
  out += "avg_user_turns\t" + Fmt("%.2f", avg_user_turns) + "\n";
  out += "pct_width_gt2\t" + Fmt("%.2f", pct_width_gt2) + "\n";
  out += "pct_depth_gt2\t" + Fmt("%.2f", pct_depth_gt2) + "\n";
  return out;
}

StatsReport CorpusStats(const AnnotationSet& annotations, const Corpus& corpus) {
  StatsReport s;
  s.dialogues = CountDialogues(corpus);
  s.turns = corpus.size();
  if (s.dialogues > 0) s.avg_user_turns = static_cast<double>(s.turns) / static_cast<double>(s.dialogues);
  std::size_t wide = 0, deep = 0;
  for (const auto& [key, entry] : annotations) {
    MrTree tree;
    try {
      tree = ParseAnnotation(entry.text);
    } catch (const Error& e) {
      throw AnnotationParseError("turn " + key.ToString() + ": " + e.what());
    }
    ++s.annotated;
    if (TreeWidth(tree) > 2) ++wide;
    if (TreeDepth(tree) > 2) ++deep;
  }
  if (s.annotated > 0) {
    s.pct_width_gt2 = 100.0 * static_cast<double>(wide) / static_cast<double>(s.annotated);
    s.pct_depth_gt2 = 100.0 * static_cast<double>(deep) / static_cast<double>(s.annotated);
  }
  return s;
}

// ---------------------------------------------------------------------------

namespace {

std::string ModeList(const std::vector<AnnotationMode>& modes) {
  std::string out;
  for (AnnotationMode m : modes) {
    if (!out.empty()) out += ",";
    out += ModeName(m);
  }
  return out;
}

std::uint64_t ParseUnsigned(const std::string& key, const std::string& value) {
  if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos || value.size() > 19) {
    throw ConfigError("'" + key + "' needs a non-negative integer, got '" + value + "'");
  }
  return std::stoull(value);
}

double ParseReal(const std::string& key, const std::string& value) {
  char* end = nullptr;
  double v = std::strtod(value.c_str(), &end);
  if (value.empty() || *end != '\0' || !std::isfinite(v)) {
    throw ConfigError("'" + key + "' needs a number, got '" + value + "'");
  }
  return v;
}

std::string Resolve(const std::string& base_dir, const std::string& path) {
  fs::path p(path);
  if (p.is_absolute()) return p.lexically_normal().string();
  return (fs::path(base_dir) / p).lexically_normal().string();
}

void RequireFile(const std::string& key, const std::string& path) {
  if (!fs::is_regular_file(path)) throw ConfigError("'" + key + "' file '" + path + "' does not exist");
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteFile(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !out.write(content.data(), static_cast<std::streamsize>(content.size()))) {
    throw ConfigError("cannot write '" + path.string() + "'");
  }
}

std::string Hex(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

std::string IterationConfig::ToText() const {
  std::string out;
  out += "corpus=" + corpus + "\n";
  out += "clean=" + clean + "\n";
  out += "unseen=" + unseen + "\n";
  out += "ontology=" + ontology + "\n";
  out += "lm=" + lm + "\n";
  out += "modes=" + ModeList(modes) + "\n";
  out += std::string("merge=") + (merge ? "true" : "false") + "\n";
  out += std::string("decode=") + (decode_mode == DecodeMode::kGreedy ? "greedy" : "sample") + "\n";
  out += "budget=" + std::to_string(budget) + "\n";
  out += "window=" + std::to_string(window) + "\n";
  out += "delta=" + (delta ? Fmt("%.17g", *delta) : std::string("-")) + "\n";
  out += "percentile=" + (percentile ? Fmt("%.17g", *percentile) : std::string("-")) + "\n";
  out += "restarts=" + std::to_string(restarts) + "\n";
  out += "seed=" + std::to_string(seed) + "\n";
  out += "embedder=" + embedder + "\n";
  out += "svr_c=" + Fmt("%.17g", svr.C) + "\n";
  out += "svr_epsilon=" + Fmt("%.17g", svr.epsilon) + "\n";
  out += "svr_max_iters=" + std::to_string(svr.max_iters) + "\n";
  out += "output_dir=" + output_dir + "\n";
  return out;
}

IterationConfig ParseIterationConfig(std::string_view text, const std::string& base_dir) {
  IterationConfig c;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::size_t hash = raw.find('#');
    std::string line = Trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = Trim(line.substr(0, eq));
    std::string value = Trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError("key '" + key + "' given twice");
    if (key == "corpus") {
      c.corpus = value;
    } else if (key == "clean") {
      c.clean = value;
    } else if (key == "unseen") {
      c.unseen = value;
    } else if (key == "ontology") {
      c.ontology = value;
    } else if (key == "lm") {
      c.lm = value;
    } else if (key == "modes") {
      c.modes.clear();
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) {
        item = Trim(item);
        AnnotationMode m;
        try {
          m = ParseMode(item);
        } catch (const Error&) {
          throw ConfigError("unknown mode '" + item + "'");
        }
        if (m != AnnotationMode::kConstrained && m != AnnotationMode::kUnconstrained) {
          throw ConfigError("mode '" + item + "' cannot be decoded");
        }
        if (std::find(c.modes.begin(), c.modes.end(), m) == c.modes.end()) c.modes.push_back(m);
      }
      std::sort(c.modes.begin(), c.modes.end());
      if (c.modes.empty()) throw ConfigError("'modes' is empty");
    } else if (key == "merge") {
      if (value != "true" && value != "false") throw ConfigError("'merge' must be true or false");
      c.merge = value == "true";
    } else if (key == "decode") {
      if (value == "greedy") {
        c.decode_mode = DecodeMode::kGreedy;
      } else if (value == "sample") {
        c.decode_mode = DecodeMode::kSampled;
      } else {
        throw ConfigError("'decode' must be greedy or sample");
      }
    } else if (key == "budget") {
      c.budget = ParseUnsigned(key, value);
    } else if (key == "window") {
      c.window = ParseUnsigned(key, value);
      if (c.window < 1) throw ConfigError("'window' must be at least 1");
    } else if ((key == "delta" || key == "percentile") && value == "-") {
      // written by ToText for the unset alternative
    } else if (key == "delta") {
      c.delta = ParseReal(key, value);
    } else if (key == "percentile") {
      c.percentile = ParseReal(key, value);
      if (*c.percentile < 0 || *c.percentile > 100) throw ConfigError("'percentile' outside [0, 100]");
    } else if (key == "restarts") {
      c.restarts = ParseUnsigned(key, value);
    } else if (key == "seed") {
      c.seed = ParseUnsigned(key, value);
    } else if (key == "embedder") {
      c.embedder = value;
    } else if (key == "svr_c") {
      c.svr.C = ParseReal(key, value);
    } else if (key == "svr_epsilon") {
      c.svr.epsilon = ParseReal(key, value);
    } else if (key == "svr_max_iters") {
      c.svr.max_iters = ParseUnsigned(key, value);
    } else if (key == "output_dir") {
      c.output_dir = value;
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }
  for (const char* key : {"corpus", "clean", "lm"}) {
    if (!seen.count(key)) throw ConfigError(std::string("missing required key '") + key + "'");
  }
  if (c.delta.has_value() == c.percentile.has_value()) {
    throw ConfigError("give exactly one of 'delta' and 'percentile'");
  }
  if (c.merge && c.modes.size() != 2) throw ConfigError("'merge' needs both decoding modes");

  c.corpus = Resolve(base_dir, c.corpus);
  c.clean = Resolve(base_dir, c.clean);
  RequireFile("corpus", c.corpus);
  RequireFile("clean", c.clean);
  if (!c.unseen.empty()) {
    c.unseen = Resolve(base_dir, c.unseen);
    RequireFile("unseen", c.unseen);
  }
  if (c.ontology != "seed") {
    c.ontology = Resolve(base_dir, c.ontology);
    RequireFile("ontology", c.ontology);
  }
  if (c.lm.rfind("replay:", 0) == 0) {
    c.lm = "replay:" + Resolve(base_dir, c.lm.substr(7));
    RequireFile("lm", c.lm.substr(7));
  }
  if (!c.output_dir.empty()) c.output_dir = Resolve(base_dir, c.output_dir);
  return c;
}

IterationConfig LoadIterationConfig(const std::string& path) {
  std::string base = fs::path(path).parent_path().string();
  return ParseIterationConfig(ReadFile(path), base.empty() ? "." : base);
}

// ---------------------------------------------------------------------------

IterationArtifacts RunIteration(const IterationConfig& config) {
  IterationArtifacts art;
  OntologySpec ontology = config.ontology == "seed" ? LoadOntology(SeedOntologyText())
                                                    : LoadOntologyFile(config.ontology);
  Corpus corpus = IngestCorpusFile(config.corpus);
  Corpus clean = IngestCorpusFile(config.clean);
  Corpus unseen;
  if (!config.unseen.empty()) unseen = IngestCorpusFile(config.unseen);
  std::unique_ptr<LanguageModel> lm = MakeLanguageModel(config.lm);
  std::unique_ptr<EmbeddingProvider> embedder = MakeEmbeddingProvider(config.embedder);

  art.selected = config.merge ? AnnotationMode::kMerged
                 : std::count(config.modes.begin(), config.modes.end(), AnnotationMode::kConstrained)
                     ? AnnotationMode::kConstrained
                     : AnnotationMode::kUnconstrained;
  AnnotateOptions options{&ontology, config.budget, config.window, config.decode_mode, config.seed};
  auto annotate = [&](const Corpus& c) {
    auto sets = AnnotateCorpus(*lm, c, options, config.modes);
    if (config.merge) {
      sets[AnnotationMode::kMerged] =
          MergePredictions(sets[AnnotationMode::kUnconstrained], sets[AnnotationMode::kConstrained]);
    }
    return sets;
  };
  auto restrict = [](const AnnotationSet& set, const AnnotationSet& refs) {
    AnnotationSet out;
    for (const auto& [key, e] : set) {
      if (refs.count(key)) out.emplace(key, e);
    }
    return out;
  };
  auto user_texts = [](const Corpus& c) {
    std::map<TurnKey, std::string> out;
    for (const CorpusRecord& r : c) out[r.key()] = r.user_text;
    return out;
  };

  // Estimator on the clean set.
  AnnotationSet clean_refs = ReferenceAnnotations(clean);
  if (clean_refs.empty()) throw ConfigError("the clean set has no reference annotations");
  auto clean_sets = annotate(clean);
  std::map<TurnKey, std::string> clean_users = user_texts(clean);
  std::vector<std::pair<FeatureVector, double>> pairs;
  for (const auto& [key, ref] : clean_refs) {
    const AnnotationEntry& pred = clean_sets[art.selected].at(key);
    bool usable = IsUsable(pred);
    double target = usable ? SmatchF1OrZero(pred.text, ref.text, config.restarts, TurnSeed(config.seed, key))
                           : 0.0;
    pairs.emplace_back(Featurize(clean_users[key], usable ? pred.text : "", *embedder), target);
  }
  SvrConfig svr = config.svr;
  svr.seed = config.seed;
  art.estimator = TrainSvr(pairs, svr, embedder->Id()).model;
  if (config.delta) {
    art.delta = *config.delta;
  } else {
    std::vector<double> clean_scores;
    for (const auto& [f, target] : pairs) clean_scores.push_back(PredictScore(art.estimator, f));
    art.delta = CalibrateDelta(clean_scores, *config.percentile);
  }
  for (const auto& [mode, set] : clean_sets) {
    art.clean_reports[mode] = EvaluateSplit(restrict(set, clean_refs), clean_refs, config.restarts,
                                            config.seed, &ontology);
  }

  // Annotate, score and filter the corpus.
  art.corpus_annotations = annotate(corpus);
  AnnotationSet& selected = art.corpus_annotations[art.selected];
  std::map<TurnKey, double> candidates;
  IdSet known;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const CorpusRecord& rec = corpus[i];
    if (i == 0 || corpus[i - 1].dialogue_id != rec.dialogue_id) known.clear();
    AnnotationEntry& entry = selected.at(rec.key());
    if (!IsUsable(entry)) {
      art.invalid.push_back(rec.key());
      continue;
    }
    MrTree tree = ParseAnnotation(entry.text);
    bool valid = ValidateTree(ontology, tree).empty() && ValidateReferences(tree, known).empty();
    for (const NodeId& id : IntroducedIds(tree)) known.insert(id);
    if (!valid) {
      art.invalid.push_back(rec.key());
      continue;
    }
    entry.predicted_score = PredictScore(art.estimator, Featurize(rec.user_text, entry.text, *embedder));
    candidates[rec.key()] = *entry.predicted_score;
  }
  art.filter = FilterByThreshold(candidates, art.delta);

  std::map<TurnKey, std::size_t> record_index;
  for (std::size_t i = 0; i < corpus.size(); ++i) record_index[corpus[i].key()] = i;
  for (const TurnKey& key : art.filter.kept) {
    std::string prompt = PromptFor(corpus, record_index.at(key), config.window);
    const std::string& response = selected.at(key).text;
    nlohmann::json j = {{"prompt", prompt}, {"response", response}, {"text", prompt + response}};
    art.training_jsonl += j.dump() + "\n";
  }

  // Held-out fold.
  std::map<AnnotationMode, AnnotationSet> unseen_sets;
  if (!unseen.empty()) {
    AnnotationSet unseen_refs = ReferenceAnnotations(unseen);
    unseen_sets = annotate(unseen);
    for (const auto& [mode, set] : unseen_sets) {
      art.unseen_reports[mode] = EvaluateSplit(restrict(set, unseen_refs), unseen_refs,
                                               config.restarts, config.seed, &ontology);
    }
  }

  // Report.
  art.report = "#dialtree-report v1\nfold\tmode\tfull\tempty\tn_full\tn_empty\tontology_errors\tparse_failures\n";
  auto report_rows = [&](const char* fold, const std::map<AnnotationMode, EvalReport>& reports) {
    for (const auto& [mode, r] : reports) {
      art.report += std::string(fold) + "\t" + std::string(ModeName(mode)) + "\t" + r.full.Format() + "\t" +
                    r.empty.Format() + "\t" + std::to_string(r.full.n) + "\t" + std::to_string(r.empty.n) +
                    "\t" + std::to_string(r.ontology_errors) + "\t" + std::to_string(r.parse_failures) + "\n";
    }
  };
  report_rows("clean", art.clean_reports);
  report_rows("unseen", art.unseen_reports);

  // Manifest.
  std::string& m = art.manifest;
  m = "#dialtree-manifest v1\n";
  std::istringstream params(config.ToText());
  std::string line;
  while (std::getline(params, line)) {
    if (line.rfind("output_dir=", 0) == 0) continue;
    m += "param\t" + line + "\n";
  }
  m += "param\tselected=" + std::string(ModeName(art.selected)) + "\n";
  m += "param\testimator.provider=" + art.estimator.provider_id + "\n";
  m += "param\testimator.dim=" + std::to_string(art.estimator.dim()) + "\n";
  m += "param\testimator.degenerate=" + std::string(art.estimator.degenerate ? "1" : "0") + "\n";
  m += "delta\t" + Fmt("%.17g", art.delta) + "\n";
  std::set<TurnKey> kept(art.filter.kept.begin(), art.filter.kept.end());
  std::set<TurnKey> invalid(art.invalid.begin(), art.invalid.end());
  for (const auto& [mode, set] : art.corpus_annotations) {
    std::map<std::string, std::size_t> status_counts;
    for (const auto& [key, e] : set) {
      std::string decision = "-";
      std::string score = "-";
      if (mode == art.selected) {
        decision = invalid.count(key) ? "invalid" : kept.count(key) ? "kept" : "dropped";
        if (e.predicted_score) score = Fmt("%.17g", *e.predicted_score);
      }
      m += "turn\t" + key.ToString() + "\t" + std::string(ModeName(mode)) + "\t" +
           std::string(StatusName(e.status)) + "\t" + decision + "\t" + score + "\n";
      ++status_counts[std::string(StatusName(e.status))];
    }
    for (const auto& [status, n] : status_counts) {
      m += "count\tstatus." + std::string(ModeName(mode)) + "." + status + "\t" + std::to_string(n) + "\n";
    }
  }
  std::size_t scored = art.filter.kept.size() + art.filter.dropped.size();
  m += "count\tturns\t" + std::to_string(corpus.size()) + "\n";
  m += "count\tinvalid\t" + std::to_string(art.invalid.size()) + "\n";
  m += "count\tkept\t" + std::to_string(art.filter.kept.size()) + "\n";
  m += "count\tdropped\t" + std::to_string(art.filter.dropped.size()) + "\n";
  m += "count\tdropped_pct\t" +
       (scored ? Fmt("%.2f", 100.0 * static_cast<double>(art.filter.dropped.size()) / static_cast<double>(scored))
               : std::string("-")) +
       "\n";

  std::map<std::string, std::string> files;
  files["training.jsonl"] = art.training_jsonl;
  files["report.txt"] = art.report;
  files["estimator.svr"] = SaveSvr(art.estimator);
  for (const auto& [mode, set] : art.corpus_annotations) {
    files["corpus." + std::string(ModeName(mode)) + ".tsv"] = WriteAnnotationSet(set);
  }
  for (const auto& [mode, set] : clean_sets) {
    files["clean." + std::string(ModeName(mode)) + ".tsv"] = WriteAnnotationSet(set);
  }
  for (const auto& [mode, set] : unseen_sets) {
    files["unseen." + std::string(ModeName(mode)) + ".tsv"] = WriteAnnotationSet(set);
  }
  for (const auto& [name, content] : files) m += "file\t" + name + "\tfnv1a64=" + Hex(Fnv1a64(content)) + "\n";

  if (!config.output_dir.empty()) {
    fs::create_directories(config.output_dir);
    for (const auto& [name, content] : files) WriteFile(fs::path(config.output_dir) / name, content);
    WriteFile(fs::path(config.output_dir) / "manifest.txt", art.manifest);
  }
  return art;
}

}  // namespace dialtree
