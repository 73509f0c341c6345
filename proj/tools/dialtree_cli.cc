/*!
 *  Copyright (c) 2026 by Contributors
 * \file dialtree_cli.cc
 * \brief Command line front end.
 */
#include <dialtree/annotation_set.h>
#include <dialtree/corpus.h>
#include <dialtree/error.h>
#include <dialtree/grammar_decoder.h>
#include <dialtree/language_model.h>
#include <dialtree/meaning_representation.h>
#include <dialtree/ontology.h>
#include <dialtree/pipeline.h>
#include <dialtree/quality_estimator.h>
#include <dialtree/smatch.h>

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace dialtree;

namespace {

std::string ReadText(const std::string& path) {
  if (path == "-") {
    std::stringstream buffer;
    buffer << std::cin.rdbuf();
    return buffer.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteText(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !out.write(text.data(), static_cast<std::streamsize>(text.size()))) {
    throw Error("cannot write '" + path + "'");
  }
}

OntologySpec Ontology(const std::string& path) {
  return path == "seed" ? LoadOntology(SeedOntologyText()) : LoadOntologyFile(path);
}

DecodeMode ModeFrom(const std::string& name) {
  return name == "sample" ? DecodeMode::kSampled : DecodeMode::kGreedy;
}

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::size_t FindRecord(const Corpus& corpus, const std::string& turn) {
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (corpus[i].key().ToString() == turn) return i;
  }
  throw Error("turn '" + turn + "' is not in the corpus");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dialtree: contextual meaning-representation annotation toolkit"};
  app.require_subcommand(1);

  std::string ontology_path = "seed";
  std::uint64_t seed = 0;
  std::size_t restarts = kDefaultRestarts;
  std::size_t budget = kDefaultBudget;
  std::size_t window = kDefaultHistoryWindow;
  std::string mode = "greedy";
  std::string lm_spec;
  auto add_ontology = [&](CLI::App* c) {
    c->add_option("--ontology", ontology_path, "ontology file, or 'seed'")->capture_default_str();
  };
  auto add_seed = [&](CLI::App* c) { c->add_option("--seed", seed, "random seed")->capture_default_str(); };
  auto add_restarts = [&](CLI::App* c) {
    c->add_option("--restarts", restarts, "smatch random restarts")->capture_default_str();
  };

  // parse
  auto* parse = app.add_subcommand("parse", "parse an annotation and print its canonical form");
  std::string parse_file;
  bool show_triples = false;
  parse->add_option("file", parse_file, "annotation file or -")->required();
  parse->add_flag("--triples", show_triples, "also list the smatch triples");

  // validate
  auto* validate = app.add_subcommand("validate", "check an annotation against the ontology");
  std::string validate_file;
  std::vector<std::string> known;
  validate->add_option("file", validate_file, "annotation file or -")->required();
  validate->add_option("--known", known, "ids introduced in earlier turns")->delimiter(',');
  add_ontology(validate);

  // smatch
  auto* smatch = app.add_subcommand("smatch", "score two annotations");
  std::string smatch_a, smatch_b;
  bool exact = false;
  smatch->add_option("a", smatch_a, "first annotation file")->required();
  smatch->add_option("b", smatch_b, "second annotation file")->required();
  smatch->add_flag("--exact", exact, "exhaustive alignment search (small trees only)");
  add_restarts(smatch);
  add_seed(smatch);

  // stats
  auto* stats = app.add_subcommand("stats", "corpus statistics");
  std::string stats_corpus, stats_annotations;
  stats->add_option("corpus", stats_corpus, "corpus file")->required();
  stats->add_option("--annotations", stats_annotations, "annotation set (default: corpus references)");

  // decode
  auto* decode = app.add_subcommand("decode", "annotate one corpus turn");
  std::string decode_corpus, decode_turn, transcript_path;
  bool unconstrained = false;
  decode->add_option("corpus", decode_corpus, "corpus file")->required();
  decode->add_option("--turn", decode_turn, "turn key DIALOGUE#INDEX")->required();
  decode->add_option("--lm", lm_spec, "replay:FILE, random:SEED or proc:CMD")->required();
  decode->add_flag("--unconstrained", unconstrained, "decode without the grammar");
  decode->add_option("--transcript", transcript_path, "write step/token/allowed lines here");
  decode->add_option("--budget", budget, "token budget")->capture_default_str();
  decode->add_option("--window", window, "previous turn pairs in the prompt")->capture_default_str();
  decode->add_option("--mode", mode, "greedy or sample")
      ->check(CLI::IsMember({"greedy", "sample"}))
      ->capture_default_str();
  add_ontology(decode);
  add_seed(decode);

  // annotate
  auto* annotate = app.add_subcommand("annotate", "annotate a whole corpus");
  std::string annotate_corpus, out_dir = ".";
  std::vector<std::string> modes = {"constrained"};
  bool merge = false;
  annotate->add_option("corpus", annotate_corpus, "corpus file")->required();
  annotate->add_option("--lm", lm_spec, "replay:FILE, random:SEED or proc:CMD")->required();
  annotate->add_option("--modes", modes, "constrained,unconstrained")->delimiter(',')->capture_default_str();
  annotate->add_flag("--merge", merge, "also write the merged set");
  annotate->add_option("--out-dir", out_dir, "directory for <mode>.tsv files")->capture_default_str();
  annotate->add_option("--budget", budget, "token budget")->capture_default_str();
  annotate->add_option("--window", window, "previous turn pairs in the prompt")->capture_default_str();
  annotate->add_option("--mode", mode, "greedy or sample")
      ->check(CLI::IsMember({"greedy", "sample"}))
      ->capture_default_str();
  add_ontology(annotate);
  add_seed(annotate);

  // hist
  auto* hist = app.add_subcommand("hist", "pairwise smatch distribution of two annotation sets");
  std::string hist_a, hist_b;
  hist->add_option("a", hist_a, "first annotation set")->required();
  hist->add_option("b", hist_b, "second annotation set")->required();
  add_restarts(hist);
  add_seed(hist);

  // train-qe
  auto* train = app.add_subcommand("train-qe", "train the score estimator");
  std::string train_corpus, train_predictions, model_out, embedder_spec = "hash";
  SvrConfig svr;
  train->add_option("corpus", train_corpus, "corpus with reference annotations")->required();
  train->add_option("predictions", train_predictions, "annotation set to score")->required();
  train->add_option("--out", model_out, "model file (default stdout)");
  train->add_option("--embedder", embedder_spec, "hash, hash:DIM or proc:CMD")->capture_default_str();
  train->add_option("--C", svr.C, "regularization")->capture_default_str();
  train->add_option("--epsilon", svr.epsilon, "insensitive tube width")->capture_default_str();
  train->add_option("--max-iters", svr.max_iters, "iterations")->capture_default_str();
  add_restarts(train);
  add_seed(train);

  // filter
  auto* filter = app.add_subcommand("filter", "predict scores and split turns at a threshold");
  std::string filter_model, filter_corpus, filter_predictions, filter_out;
  double delta = 0.0, percentile = 20.0;
  filter->add_option("model", filter_model, "estimator file")->required();
  filter->add_option("corpus", filter_corpus, "corpus file")->required();
  filter->add_option("predictions", filter_predictions, "annotation set")->required();
  auto* delta_opt = filter->add_option("--delta", delta, "keep turns scoring at least this");
  auto* pct_opt = filter->add_option("--percentile", percentile, "derive delta as this percentile");
  delta_opt->excludes(pct_opt);
  filter->add_option("--embedder", embedder_spec, "must match training")->capture_default_str();
  filter->add_option("--out", filter_out, "annotation set with predicted scores");

  // pipeline run
  auto* pipeline = app.add_subcommand("pipeline", "iteration driver");
  pipeline->require_subcommand(1);
  auto* run = pipeline->add_subcommand("run", "run one iteration from a config file");
  std::string config_path;
  run->add_option("config", config_path, "key=value config file")->required();
  std::string run_out_dir;
  run->add_option("--out-dir", run_out_dir, "overrides the config's output_dir");

  // make-replay
  auto* replay = app.add_subcommand("make-replay", "script a replay model from corpus annotations");
  std::string replay_corpus, replay_out;
  bool vocab = false;
  replay->add_option("corpus", replay_corpus, "corpus whose annotations become responses")->required();
  replay->add_option("out", replay_out, "output JSONL")->required();
  replay->add_flag("--vocab", vocab, "add a word-level vocabulary line");
  replay->add_option("--window", window, "previous turn pairs in the prompt")->capture_default_str();
  add_ontology(replay);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*parse) {
      MrTree tree = ParseAnnotation(ReadText(parse_file));
      std::cout << SerializeAnnotation(tree) << "\n";
      TripleSet triples = ExtractTriples(tree);
      std::cout << "concepts " << CountConcepts(tree) << " literals " << CountLiterals(tree)
                << " triples " << triples.triples.size() << " depth " << TreeDepth(tree) << " width "
                << TreeWidth(tree) << "\n";
      if (show_triples) {
        for (const Triple& t : triples.triples) std::cout << FormatTriple(triples, t) << "\n";
      }
      return 0;
    }
    if (*validate) {
      OntologySpec spec = Ontology(ontology_path);
      MrTree tree = ParseAnnotation(ReadText(validate_file));
      int status = 0;
      for (const OntologyError& e : ValidateTree(spec, tree)) {
        std::cout << OntologyErrorKindName(e.kind) << "\t" << e.node << "\t" << e.detail << "\n";
        status = 1;
      }
      for (const NodeId& id : ValidateReferences(tree, IdSet(known.begin(), known.end()))) {
        std::cout << "unresolved-ref\t" << id << "\n";
        status = 1;
      }
      if (status == 0) std::cout << "ok\n";
      return status;
    }
    if (*smatch) {
      MrTree a = ParseAnnotation(ReadText(smatch_a));
      MrTree b = ParseAnnotation(ReadText(smatch_b));
      SmatchScore s = exact ? BruteForceSmatch(a, b) : Smatch(a, b, restarts, seed);
      std::cout << "precision " << Num(s.precision) << "\nrecall " << Num(s.recall) << "\nf1 "
                << Num(s.f1) << "\nmatched " << s.matched << " of " << s.total_a << "/" << s.total_b
                << "\n";
      return 0;
    }
    if (*stats) {
      Corpus corpus = IngestCorpusFile(stats_corpus);
      AnnotationSet set = stats_annotations.empty() ? ReferenceAnnotations(corpus)
                                                    : ReadAnnotationSet(ReadText(stats_annotations));
      std::cout << CorpusStats(set, corpus).ToText();
      return 0;
    }
    if (*decode) {
      OntologySpec spec = Ontology(ontology_path);
      Corpus corpus = IngestCorpusFile(decode_corpus);
      std::size_t i = FindRecord(corpus, decode_turn);
      auto lm = MakeLanguageModel(lm_spec);
      std::string prompt = PromptFor(corpus, i, window);
      DecodeOptions opts{budget, ModeFrom(mode), TurnSeed(seed, corpus[i].key())};
      DecodeResult r;
      if (unconstrained) {
        r = UnconstrainedDecode(*lm, prompt, opts);
      } else {
        GrammarContext ctx{&spec, {}, {}, true};
        for (const DialogueTurnPair& p : TruncateHistory(HistoryUpTo(corpus, i), window)) {
          ctx.turns.push_back(p.agent);
          ctx.turns.push_back(p.user);
        }
        for (std::size_t j = i; j > 0 && corpus[j - 1].dialogue_id == corpus[i].dialogue_id; --j) {
          const auto& ref = corpus[j - 1].reference_annotation;
          if (ref) {
            for (const NodeId& id : IntroducedIds(ParseAnnotation(*ref))) ctx.known_ids.insert(id);
          }
        }
        r = ConstrainedDecode(*lm, prompt, ctx, opts);
      }
      if (!transcript_path.empty()) WriteText(transcript_path, TranscriptToText(r.transcript));
      std::cout << r.text << "\n";
      return 0;
    }
    if (*annotate) {
      OntologySpec spec = Ontology(ontology_path);
      Corpus corpus = IngestCorpusFile(annotate_corpus);
      auto lm = MakeLanguageModel(lm_spec);
      std::vector<AnnotationMode> ms;
      for (const std::string& m : modes) ms.push_back(ParseMode(m));
      AnnotateOptions opts{&spec, budget, window, ModeFrom(mode), seed};
      auto sets = AnnotateCorpus(*lm, corpus, opts, ms);
      if (merge) {
        sets[AnnotationMode::kMerged] =
            MergePredictions(sets.at(AnnotationMode::kUnconstrained), sets.at(AnnotationMode::kConstrained));
      }
      std::filesystem::create_directories(out_dir);
      for (const auto& [m, set] : sets) {
        std::string path = (std::filesystem::path(out_dir) / (std::string(ModeName(m)) + ".tsv")).string();
        WriteText(path, WriteAnnotationSet(set));
        std::cout << path << "\n";
      }
      return 0;
    }
    if (*hist) {
      AnnotationSet a = ReadAnnotationSet(ReadText(hist_a));
      AnnotationSet b = ReadAnnotationSet(ReadText(hist_b));
      std::cout << PairwiseDistribution(a, b, restarts, seed).ToText();
      return 0;
    }
    if (*train) {
      Corpus corpus = IngestCorpusFile(train_corpus);
      AnnotationSet preds = ReadAnnotationSet(ReadText(train_predictions));
      auto embedder = MakeEmbeddingProvider(embedder_spec);
      std::vector<std::pair<FeatureVector, double>> pairs;
      for (const CorpusRecord& r : corpus) {
        if (!r.reference_annotation) continue;
        auto it = preds.find(r.key());
        if (it == preds.end()) throw KeyMismatchError("no prediction for turn " + r.key().ToString());
        bool usable = IsUsable(it->second);
        double target = usable ? SmatchF1OrZero(it->second.text, *r.reference_annotation, restarts,
                                                TurnSeed(seed, r.key()))
                               : 0.0;
        pairs.emplace_back(Featurize(r.user_text, usable ? it->second.text : "", *embedder), target);
      }
      svr.seed = seed;
      TrainedSvr trained = TrainSvr(pairs, svr, embedder->Id());
      WriteText(model_out, SaveSvr(trained.model));
      std::cerr << "trained on " << pairs.size() << " turns, objective " << trained.objective.front()
                << " -> " << trained.objective.back() << "\n";
      return 0;
    }
    if (*filter) {
      SvrModel model = LoadSvr(ReadText(filter_model));
      Corpus corpus = IngestCorpusFile(filter_corpus);
      AnnotationSet preds = ReadAnnotationSet(ReadText(filter_predictions));
      auto embedder = MakeEmbeddingProvider(embedder_spec);
      std::map<TurnKey, double> scores;
      for (const CorpusRecord& r : corpus) {
        auto it = preds.find(r.key());
        if (it == preds.end() || !IsUsable(it->second)) continue;
        double s = PredictScore(model, Featurize(r.user_text, it->second.text, *embedder));
        scores[r.key()] = s;
        it->second.predicted_score = s;
      }
      if (delta_opt->count() == 0) {
        std::vector<double> values;
        for (const auto& [k, s] : scores) values.push_back(s);
        delta = CalibrateDelta(values, percentile);
      }
      FilterResult result = FilterByThreshold(scores, delta);
      std::cout << "delta " << delta << "\n";
      for (const TurnKey& k : result.kept) std::cout << "kept\t" << k.ToString() << "\t" << scores[k] << "\n";
      for (const TurnKey& k : result.dropped) std::cout << "dropped\t" << k.ToString() << "\t" << scores[k] << "\n";
      if (!filter_out.empty()) WriteText(filter_out, WriteAnnotationSet(preds));
      return 0;
    }
    if (*run) {
      IterationConfig config = LoadIterationConfig(config_path);
      if (!run_out_dir.empty()) config.output_dir = std::filesystem::absolute(run_out_dir).string();
      IterationArtifacts art = RunIteration(config);
      std::cout << art.report;
      std::cout << "delta " << art.delta << " kept " << art.filter.kept.size() << " dropped "
                << art.filter.dropped.size() << " invalid " << art.invalid.size() << "\n";
      return 0;
    }
    if (*replay) {
      Corpus corpus = IngestCorpusFile(replay_corpus);
      std::vector<std::string> pieces;
      if (vocab) pieces = ReplayPieces(Ontology(ontology_path), corpus);
      WriteText(replay_out, MakeReplayJsonl(corpus, window, pieces));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
