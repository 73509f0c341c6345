/*!
 *  Copyright (c) 2026 by Contributors
 * \file bindings.cc
 * \brief Python module dialtree._core.
 */
#include <dialtree/corpus.h>
#include <dialtree/error.h>
#include <dialtree/grammar_decoder.h>
#include <dialtree/lora.h>
#include <dialtree/pipeline.h>
#include <dialtree/random.h>
#include <dialtree/quality_estimator.h>
#include <dialtree/smatch.h>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace dialtree;

namespace {

OntologySpec OntologyFrom(const std::string& path) {
  return path.empty() || path == "seed" ? LoadOntology(SeedOntologyText()) : LoadOntologyFile(path);
}

py::dict TreeSummary(const MrTree& t) {
  py::dict d;
  d["canonical"] = SerializeAnnotation(t);
  d["concepts"] = CountConcepts(t);
  d["literals"] = CountLiterals(t);
  d["edges"] = CountEdges(t);
  d["depth"] = TreeDepth(t);
  d["width"] = TreeWidth(t);
  d["ids"] = IntroducedIds(t);
  return d;
}

Matrix ToMatrix(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return Matrix();
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw DimensionError("ragged matrix");
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Tree annotations for task-oriented dialogue: parsing, scoring, constrained decoding.";

  static py::handle error = py::exception<Error>(m, "Error").release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  m.def("parse", [](const std::string& text) { return TreeSummary(ParseAnnotation(text)); },
        py::arg("text"));
  m.def("canonical", [](const std::string& text) { return SerializeAnnotation(ParseAnnotation(text)); },
        py::arg("text"));
  m.def(
      "triples",
      [](const std::string& text) {
        TripleSet ts = ExtractTriples(ParseAnnotation(text));
        std::vector<std::string> out;
        for (const Triple& t : ts.triples) out.push_back(FormatTriple(ts, t));
        return out;
      },
      py::arg("text"));
  m.def(
      "validate",
      [](const std::string& text, const std::string& ontology) {
        std::vector<std::tuple<std::string, std::string, std::string>> out;
        for (const OntologyError& e : ValidateTree(OntologyFrom(ontology), ParseAnnotation(text))) {
          out.emplace_back(std::string(OntologyErrorKindName(e.kind)), e.node, e.detail);
        }
        return out;
      },
      py::arg("text"), py::arg("ontology") = "seed");
  m.def("seed_ontology", [] { return std::string(SeedOntologyText()); });

  m.def(
      "smatch",
      [](const std::string& a, const std::string& b, std::size_t restarts, std::uint64_t seed, bool exact) {
        MrTree ta = ParseAnnotation(a), tb = ParseAnnotation(b);
        SmatchScore s = exact ? BruteForceSmatch(ta, tb) : Smatch(ta, tb, restarts, seed);
        py::dict d;
        d["precision"] = s.precision;
        d["recall"] = s.recall;
        d["f1"] = s.f1;
        d["matched"] = s.matched;
        return d;
      },
      py::arg("a"), py::arg("b"), py::arg("restarts") = kDefaultRestarts, py::arg("seed") = 0,
      py::arg("exact") = false);

  m.def(
      "decode",
      [](const std::string& lm_spec, const std::vector<std::string>& turns, const std::string& prompt,
         bool constrained, std::size_t budget, const std::string& ontology, std::uint64_t seed, bool sample) {
        std::unique_ptr<LanguageModel> lm = MakeLanguageModel(lm_spec);
        DecodeOptions opts{budget, sample ? DecodeMode::kSampled : DecodeMode::kGreedy, seed};
        if (!constrained) return UnconstrainedDecode(*lm, prompt, opts).text;
        OntologySpec onto = OntologyFrom(ontology);
        return ConstrainedDecode(*lm, prompt, {&onto, turns, {}}, opts).text;
      },
      py::arg("lm"), py::arg("turns"), py::arg("prompt"), py::arg("constrained") = true,
      py::arg("budget") = kDefaultBudget, py::arg("ontology") = "seed", py::arg("seed") = 0,
      py::arg("sample") = false);
  m.def(
      "render_prompt",
      [](const std::vector<std::pair<std::string, std::string>>& pairs) {
        std::vector<DialogueTurnPair> h;
        for (std::size_t i = 0; i < pairs.size(); ++i) h.push_back({pairs[i].first, pairs[i].second, i});
        return RenderPrompt(h);
      },
      py::arg("pairs"));

  m.def(
      "lora_forward",
      [](const std::vector<std::vector<double>>& W, const std::vector<std::vector<double>>& A,
         const std::vector<std::vector<double>>& B, int alpha, const std::vector<double>& x) {
        LoraLayer l;
        l.W = ToMatrix(W);
        l.A = ToMatrix(A);
        l.B = ToMatrix(B);
        l.rank = static_cast<int>(l.A.rows());
        l.alpha = alpha;
        Vector v = Eigen::Map<const Vector>(x.data(), static_cast<Eigen::Index>(x.size()));
        Vector y = LoraForward(l, v);
        return std::vector<double>(y.data(), y.data() + y.size());
      },
      py::arg("W"), py::arg("A"), py::arg("B"), py::arg("alpha"), py::arg("x"));
  m.def(
      "lora_grad_check",
      [](std::size_t d, std::size_t k, int r, int alpha, std::uint64_t seed) {
        LoraLayer l = LoraInit(d, k, r, alpha, seed);
        Rng rng(MixSeed(seed, 1));
        for (Eigen::Index i = 0; i < l.B.size(); ++i) l.B.data()[i] = 2.0 * rng.Uniform() - 1.0;
        Vector x(static_cast<Eigen::Index>(k)), t(static_cast<Eigen::Index>(d));
        for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = 2.0 * rng.Uniform() - 1.0;
        for (Eigen::Index i = 0; i < t.size(); ++i) t(i) = 2.0 * rng.Uniform() - 1.0;
        return GradCheck(l, x, t);
      },
      py::arg("d"), py::arg("k"), py::arg("r"), py::arg("alpha"), py::arg("seed") = 0);

  m.def(
      "featurize",
      [](const std::string& turn, const std::string& annotation, const std::string& embedder) {
        return Featurize(turn, annotation, *MakeEmbeddingProvider(embedder));
      },
      py::arg("turn"), py::arg("annotation"), py::arg("embedder") = "hash");
  m.def(
      "train_svr",
      [](const std::vector<std::vector<double>>& features, const std::vector<double>& targets, double C,
         double epsilon, std::size_t max_iters, std::uint64_t seed) {
        if (features.size() != targets.size()) throw DimMismatchError("features and targets differ in length");
        std::vector<std::pair<FeatureVector, double>> pairs;
        for (std::size_t i = 0; i < features.size(); ++i) pairs.push_back({features[i], targets[i]});
        return SaveSvr(TrainSvr(pairs, {C, epsilon, max_iters, seed}).model);
      },
      py::arg("features"), py::arg("targets"), py::arg("C") = 1.0, py::arg("epsilon") = 5.0,
      py::arg("max_iters") = 10000, py::arg("seed") = 0);
  m.def(
      "predict_score",
      [](const std::string& model, const std::vector<double>& f) { return PredictScore(LoadSvr(model), f); },
      py::arg("model"), py::arg("features"));
  m.def(
      "filter_by_threshold",
      [](const std::map<std::string, double>& scores, double delta) {
        std::vector<std::string> kept, dropped;
        for (const auto& [k, v] : scores) (v >= delta ? kept : dropped).push_back(k);
        return std::make_pair(kept, dropped);
      },
      py::arg("scores"), py::arg("delta"));
  m.def("calibrate_delta", &CalibrateDelta, py::arg("scores"), py::arg("q") = 20.0);

  m.def(
      "corpus_stats",
      [](const std::string& corpus_path) {
        Corpus c = IngestCorpusFile(corpus_path);
        StatsReport s = CorpusStats(ReferenceAnnotations(c), c);
        py::dict d;
        d["dialogues"] = s.dialogues;
        d["turns"] = s.turns;
        d["avg_user_turns"] = s.avg_user_turns;
        d["pct_width_gt2"] = s.pct_width_gt2;
        d["pct_depth_gt2"] = s.pct_depth_gt2;
        return d;
      },
      py::arg("corpus"));
  m.def(
      "run_iteration",
      [](const std::string& config_path, const std::string& output_dir) {
        IterationConfig c = LoadIterationConfig(config_path);
        if (!output_dir.empty()) c.output_dir = output_dir;
        IterationArtifacts a = RunIteration(c);
        py::dict d;
        d["delta"] = a.delta;
        d["kept"] = a.filter.kept.size();
        d["dropped"] = a.filter.dropped.size();
        d["invalid"] = a.invalid.size();
        d["report"] = a.report;
        d["manifest"] = a.manifest;
        d["training_jsonl"] = a.training_jsonl;
        return d;
      },
      py::arg("config"), py::arg("output_dir") = "");
}
