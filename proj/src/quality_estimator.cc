/*!
 *  Copyright (c) 2026 by Contributors
 * \file quality_estimator.cc
 */
#include <dialtree/error.h>
#include <dialtree/line_json_process.h>
#include <dialtree/meaning_representation.h>
#include <dialtree/quality_estimator.h>
#include <dialtree/random.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace dialtree {

HashingEmbedder::HashingEmbedder(std::size_t dim, int min_n, int max_n)
    : dim_(dim), min_n_(min_n), max_n_(max_n) {
  if (dim_ == 0) throw ConfigError("hashing embedder needs a positive dimension");
  if (min_n_ < 1 || max_n_ < min_n_) throw ConfigError("bad n-gram range");
}

std::string HashingEmbedder::Id() const {
  return "hash-ngram-" + std::to_string(min_n_) + "-" + std::to_string(max_n_) + "-d" +
         std::to_string(dim_);
}

std::vector<double> HashingEmbedder::Embed(std::string_view text) {
  std::string padded = " " + std::string(text) + " ";
  std::vector<double> v(dim_, 0.0);
  for (int n = min_n_; n <= max_n_; ++n) {
    if (padded.size() < static_cast<std::size_t>(n)) break;
    for (std::size_t i = 0; i + n <= padded.size(); ++i) {
      std::uint64_t h = Fnv1a64(std::string_view(padded).substr(i, n));
      v[h % dim_] += (h >> 63) ? -1.0 : 1.0;
    }
  }
  double norm2 = 0.0;
  for (double x : v) norm2 += x * x;
  if (norm2 > 0.0) {
    double norm = std::sqrt(norm2);
    for (double& x : v) x /= norm;
  }
  return v;
}

ProcessEmbedder::ProcessEmbedder(const std::string& command) {
  try {
    proc_ = std::make_unique<LineJsonProcess>(command);
  } catch (const SessionError& e) {
    throw ProviderError(e.what());
  }
  dim_ = Embed("").size();
  if (dim_ == 0) throw ProviderError("embedding process returned an empty vector");
}

ProcessEmbedder::~ProcessEmbedder() = default;

std::vector<double> ProcessEmbedder::Embed(std::string_view text) {
  try {
    nlohmann::json reply = proc_->Request({{"op", "embed"}, {"text", std::string(text)}});
    std::vector<double> v = reply.at("embedding").get<std::vector<double>>();
    if (dim_ != 0 && v.size() != dim_) {
      throw ProviderError("embedding of size " + std::to_string(v.size()) + ", expected " +
                          std::to_string(dim_));
    }
    return v;
  } catch (const SessionError& e) {
    throw ProviderError(e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError(std::string("bad embed reply: ") + e.what());
  }
}

std::unique_ptr<EmbeddingProvider> MakeEmbeddingProvider(const std::string& spec) {
  if (spec == "hash") return std::make_unique<HashingEmbedder>();
  if (spec.rfind("hash:", 0) == 0) {
    std::string arg = spec.substr(5);
    char* end = nullptr;
    unsigned long long dim = std::strtoull(arg.c_str(), &end, 10);
    if (arg.empty() || *end != '\0' || dim == 0) throw ConfigError("bad hashing dimension '" + arg + "'");
    return std::make_unique<HashingEmbedder>(static_cast<std::size_t>(dim));
  }
  if (spec.rfind("proc:", 0) == 0) return std::make_unique<ProcessEmbedder>(spec.substr(5));
  throw ConfigError("unknown embedding provider '" + spec + "'");
}

FeatureVector Featurize(std::string_view turn, std::string_view annotation,
                        EmbeddingProvider& provider) {
  std::string form(annotation);
  try {
    form = SerializeAnnotation(ParseAnnotation(annotation));
  } catch (const Error&) {
  }
  FeatureVector f = provider.Embed(turn);
  std::vector<double> a = provider.Embed(form);
  if (f.size() != provider.Dim() || a.size() != provider.Dim()) {
    throw ProviderError("provider returned a vector of the wrong dimension");
  }
  f.insert(f.end(), a.begin(), a.end());
  return f;
}

// ---------------------------------------------------------------------------

namespace {

using Pairs = std::vector<std::pair<FeatureVector, double>>;

double Dot(const std::vector<double>& w, const FeatureVector& x) {
  double s = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * x[j];
  return s;
}

double Objective(const std::vector<double>& w, double b, double C, double eps, const Pairs& pairs) {
  double reg = 0.0;
  for (double v : w) reg += v * v;
  double loss = 0.0;
  for (const auto& [x, y] : pairs) {
    double r = Dot(w, x) + b - y;
    loss += std::max(0.0, std::abs(r) - eps);
  }
  return 0.5 * reg + C / static_cast<double>(pairs.size()) * loss;
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

}  // namespace

double SvrObjective(const SvrModel& model, const Pairs& pairs) {
  if (pairs.empty()) return 0.5 * Dot(model.weights, model.weights);
  for (const auto& [x, y] : pairs) {
    if (x.size() != model.dim()) throw DimMismatchError("feature dimension differs from the model");
  }
  return Objective(model.weights, model.bias, model.C, model.epsilon, pairs);
}

TrainedSvr TrainSvr(const Pairs& pairs, const SvrConfig& config, const std::string& provider_id) {
  if (pairs.empty()) throw DegenerateDataError("no training pairs");
  const std::size_t dim = pairs.front().first.size();
  std::vector<double> targets;
  for (const auto& [x, y] : pairs) {
    if (x.size() != dim) throw DimMismatchError("training features have inconsistent dimensions");
    if (!(y >= 0.0 && y <= 100.0)) throw DegenerateDataError("target outside [0, 100]");
    targets.push_back(y);
  }
  if (!(config.C > 0.0) || !(config.epsilon >= 0.0)) throw ConfigError("C must be > 0 and epsilon >= 0");

  TrainedSvr out;
  SvrModel& m = out.model;
  m.C = config.C;
  m.epsilon = config.epsilon;
  m.provider_id = provider_id;
  bool same_features = true;
  bool same_targets = true;
  for (const auto& [x, y] : pairs) {
    same_features = same_features && x == pairs.front().first;
    same_targets = same_targets && y == pairs.front().second;
  }
  m.degenerate = pairs.size() > 1 && same_features && !same_targets;

  m.weights.resize(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    double u = static_cast<double>(MixSeed(config.seed, j) >> 11) * (1.0 / 9007199254740992.0);
    m.weights[j] = 1e-3 * (2.0 * u - 1.0);
  }
  m.bias = Median(targets);

  const double n = static_cast<double>(pairs.size());
  double J = Objective(m.weights, m.bias, m.C, m.epsilon, pairs);
  out.objective.push_back(J);
  double eta = 1.0;
  std::vector<double> gw(dim), w2(dim);
  for (std::size_t it = 0; it < config.max_iters; ++it) {
    gw = m.weights;
    double gb = 0.0;
    for (const auto& [x, y] : pairs) {
      double r = Dot(m.weights, x) + m.bias - y;
      if (std::abs(r) <= m.epsilon) continue;
      double coef = m.C / n * (r > 0 ? 1.0 : -1.0);
      for (std::size_t j = 0; j < dim; ++j) gw[j] += coef * x[j];
      gb += coef;
    }
    double gnorm2 = gb * gb;
    for (double g : gw) gnorm2 += g * g;
    if (gnorm2 < 1e-24) break;
    double step = eta;
    bool accepted = false;
    double J2 = J, b2 = m.bias;
    for (int k = 0; k < 50; ++k) {
      for (std::size_t j = 0; j < dim; ++j) w2[j] = m.weights[j] - step * gw[j];
      b2 = m.bias - step * gb;
      J2 = Objective(w2, b2, m.C, m.epsilon, pairs);
      if (J2 <= J) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    m.weights.swap(w2);
    m.bias = b2;
    J = J2;
    out.objective.push_back(J);
    eta = std::min(1.0, 2.0 * step);
  }
  return out;
}

double PredictRaw(const SvrModel& model, const FeatureVector& f) {
  if (f.size() != model.dim()) {
    throw DimMismatchError("feature of size " + std::to_string(f.size()) + " for a model of size " +
                           std::to_string(model.dim()));
  }
  return Dot(model.weights, f) + model.bias;
}

double PredictScore(const SvrModel& model, const FeatureVector& f) {
  return std::clamp(PredictRaw(model, f), 0.0, 100.0);
}

namespace {

std::string Num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double ParseNum(const std::string& s, std::size_t line) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw FormatError("bad number '" + s + "'", line);
  return v;
}

}  // namespace

std::string SaveSvr(const SvrModel& model) {
  std::string out = "dialtree-svr 1 dim=" + std::to_string(model.dim()) +
                    " provider=" + model.provider_id + " C=" + Num(model.C) +
                    " epsilon=" + Num(model.epsilon) +
                    " degenerate=" + (model.degenerate ? "1" : "0") + "\n";
  for (double w : model.weights) out += Num(w) + "\n";
  out += Num(model.bias) + "\n";
  return out;
}

SvrModel LoadSvr(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string header;
  if (!std::getline(in, header)) throw FormatError("empty model file", 1);
  std::istringstream hs(header);
  std::string magic, version;
  hs >> magic >> version;
  if (magic != "dialtree-svr" || version != "1") throw FormatError("not a version 1 model file", 1);
  std::map<std::string, std::string> fields;
  std::string field;
  while (hs >> field) {
    std::size_t eq = field.find('=');
    if (eq == std::string::npos) throw FormatError("bad header field '" + field + "'", 1);
    fields[field.substr(0, eq)] = field.substr(eq + 1);
  }
  for (const char* key : {"dim", "provider", "C", "epsilon"}) {
    if (!fields.count(key)) throw FormatError(std::string("header lacks ") + key, 1);
  }
  SvrModel m;
  std::size_t dim = static_cast<std::size_t>(ParseNum(fields["dim"], 1));
  m.provider_id = fields["provider"];
  m.C = ParseNum(fields["C"], 1);
  m.epsilon = ParseNum(fields["epsilon"], 1);
  m.degenerate = fields.count("degenerate") && fields["degenerate"] == "1";
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    values.push_back(ParseNum(line, line_no));
  }
  if (values.size() != dim + 1) {
    throw FormatError("expected " + std::to_string(dim + 1) + " values, found " +
                      std::to_string(values.size()));
  }
  m.bias = values.back();
  values.pop_back();
  m.weights = std::move(values);
  return m;
}

FilterResult FilterByThreshold(const std::map<TurnKey, double>& predictions, double delta) {
  FilterResult out;
  for (const auto& [key, score] : predictions) {
    (score >= delta ? out.kept : out.dropped).push_back(key);
  }
  return out;
}

double CalibrateDelta(std::vector<double> scores, double q) {
  if (scores.empty()) throw DegenerateDataError("no scores to calibrate on");
  if (!(q >= 0.0 && q <= 100.0)) throw DegenerateDataError("percentile outside [0, 100]");
  std::sort(scores.begin(), scores.end());
  double rank = std::ceil(q * static_cast<double>(scores.size()) / 100.0);
  std::size_t index = rank < 1.0 ? 0 : static_cast<std::size_t>(rank) - 1;
  return scores[std::min(index, scores.size() - 1)];
}

}  // namespace dialtree
