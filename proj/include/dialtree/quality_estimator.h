/*!
 *  Copyright (c) 2026 by Contributors
 * \file dialtree/quality_estimator.h
 * \brief Score estimator: a linear epsilon-insensitive SVR over embeddings of the last user turn
 *  and the produced annotation, and threshold filtering on its predictions.
 */
#ifndef DIALTREE_QUALITY_ESTIMATOR_H_
#define DIALTREE_QUALITY_ESTIMATOR_H_

#include <dialtree/annotation_set.h>

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dialtree {

class LineJsonProcess;

using FeatureVector = std::vector<double>;

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t Dim() const = 0;
  /*! \brief Identifier recorded in saved models; no whitespace. */
  virtual std::string Id() const = 0;
  /*! \throws ProviderError */
  virtual std::vector<double> Embed(std::string_view text) = 0;
};

/*!
 * \brief Offline embedder. The text is wrapped in one space on each side; every byte n-gram
 *  with n in [min_n, max_n] is hashed with FNV-1a 64 and adds +1 (top hash bit clear) or -1
 *  to bucket hash % dim. The result is L2-normalized unless it is all zero.
 */
class HashingEmbedder : public EmbeddingProvider {
 public:
  explicit HashingEmbedder(std::size_t dim = 256, int min_n = 2, int max_n = 4);
  std::size_t Dim() const override { return dim_; }
  std::string Id() const override;
  std::vector<double> Embed(std::string_view text) override;

 private:
  std::size_t dim_;
  int min_n_, max_n_;
};

/*!
 * \brief Embeddings from a child process: `{"op":"embed","text":...}` -> `{"embedding":[...]}`.
 *  The dimension is taken from the reply for the empty text at start-up.
 */
class ProcessEmbedder : public EmbeddingProvider {
 public:
  explicit ProcessEmbedder(const std::string& command);
  ~ProcessEmbedder() override;
  std::size_t Dim() const override { return dim_; }
  std::string Id() const override { return "proc"; }
  std::vector<double> Embed(std::string_view text) override;

 private:
  std::unique_ptr<LineJsonProcess> proc_;
  std::size_t dim_ = 0;
};

/*! \brief "hash" (default settings), "hash:DIM" or "proc:CMD". \throws ConfigError */
std::unique_ptr<EmbeddingProvider> MakeEmbeddingProvider(const std::string& spec);

/*!
 * \brief [embed(turn); embed(annotation)]. An annotation that parses is embedded in canonical
 *  form, anything else as written.
 * \throws ProviderError if the provider returns a vector of the wrong size.
 */
FeatureVector Featurize(std::string_view turn, std::string_view annotation,
                        EmbeddingProvider& provider);

struct SvrConfig {
  double C = 1.0;
  double epsilon = 5.0;
  std::size_t max_iters = 10000;
  std::uint64_t seed = 0;
};

struct SvrModel {
  std::vector<double> weights;
  double bias = 0.0;
  double epsilon = 5.0;
  double C = 1.0;
  std::string provider_id = "none";
  bool degenerate = false;  // identical features with differing targets

  std::size_t dim() const { return weights.size(); }
};

struct TrainedSvr {
  SvrModel model;
  std::vector<double> objective;  // objective after each accepted step, initial value first
};

/*! \brief 0.5 ||w||^2 + (C / n) sum max(0, |w.x + b - y| - epsilon). */
double SvrObjective(const SvrModel& model, const std::vector<std::pair<FeatureVector, double>>& pairs);

/*!
 * \brief Full-batch subgradient descent with step halving. A step is taken only if it does not
 *  increase the objective, so the objective sequence is non-increasing. Weights start at
 *  1e-3 * (2u - 1) with u drawn per coordinate from the seed, the bias at the target median.
 * \throws DimMismatchError on inconsistent dimensions.
 * \throws DegenerateDataError when there are no pairs or a target is outside [0, 100].
 */
TrainedSvr TrainSvr(const std::vector<std::pair<FeatureVector, double>>& pairs,
                    const SvrConfig& config = {}, const std::string& provider_id = "none");

/*! \brief w.f + b without clamping. \throws DimMismatchError */
double PredictRaw(const SvrModel& model, const FeatureVector& f);

/*! \brief PredictRaw clamped to [0, 100]. */
double PredictScore(const SvrModel& model, const FeatureVector& f);

/*! \brief `dialtree-svr 1 dim=.. provider=.. C=.. epsilon=.. degenerate=..`, one weight per line, bias last. */
std::string SaveSvr(const SvrModel& model);
/*! \throws FormatError */
SvrModel LoadSvr(std::string_view text);

struct FilterResult {
  std::vector<TurnKey> kept;
  std::vector<TurnKey> dropped;
};

/*! \brief kept = score >= delta. */
FilterResult FilterByThreshold(const std::map<TurnKey, double>& predictions, double delta);

/*!
 * \brief Nearest-rank q-th percentile: the ceil(q / 100 * n)-th smallest score (the smallest for q = 0).
 * \throws DegenerateDataError on no scores or q outside [0, 100].
 */
double CalibrateDelta(std::vector<double> scores, double q = 20.0);

}  // namespace dialtree

#endif  // DIALTREE_QUALITY_ESTIMATOR_H_
