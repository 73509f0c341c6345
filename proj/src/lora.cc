/*!
 *  Copyright (c) 2026 by Contributors
 * \file lora.cc
 */
#include <dialtree/error.h>
#include <dialtree/lora.h>
#include <dialtree/random.h>

#include <algorithm>
#include <cmath>
#include <string>

namespace dialtree {

namespace {

std::string Shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void CheckRankAlpha(std::size_t d, std::size_t k, int r, int alpha) {
  if (r < 1 || static_cast<std::size_t>(r) > std::min(d, k)) {
    throw RankError("rank " + std::to_string(r) + " outside [1, " + std::to_string(std::min(d, k)) + "]");
  }
  if (alpha <= 0 || alpha % r != 0) {
    throw AlphaError("alpha " + std::to_string(alpha) + " is not a positive multiple of rank " +
                     std::to_string(r));
  }
}

}  // namespace

void CheckLayer(const LoraLayer& layer) {
  CheckRankAlpha(layer.d(), layer.k(), layer.rank, layer.alpha);
  if (layer.A.rows() != layer.rank || layer.A.cols() != layer.W.cols()) {
    throw DimensionError("A is " + Shape(layer.A) + ", expected " + std::to_string(layer.rank) + "x" +
                         std::to_string(layer.W.cols()));
  }
  if (layer.B.rows() != layer.W.rows() || layer.B.cols() != layer.rank) {
    throw DimensionError("B is " + Shape(layer.B) + ", expected " + std::to_string(layer.W.rows()) + "x" +
                         std::to_string(layer.rank));
  }
}

LoraLayer LoraInit(const Matrix& W, int r, int alpha, std::uint64_t seed) {
  std::size_t d = static_cast<std::size_t>(W.rows()), k = static_cast<std::size_t>(W.cols());
  CheckRankAlpha(d, k, r, alpha);
  Rng rng(MixSeed(seed, 0x4c6f5241ULL));
  LoraLayer layer;
  layer.W = W;
  layer.rank = r;
  layer.alpha = alpha;
  double bound = 1.0 / std::sqrt(static_cast<double>(k));
  layer.A.resize(r, static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < layer.A.rows(); ++i) {
    for (Eigen::Index j = 0; j < layer.A.cols(); ++j) layer.A(i, j) = bound * (2.0 * rng.Uniform() - 1.0);
  }
  layer.B = Matrix::Zero(static_cast<Eigen::Index>(d), r);
  return layer;
}

LoraLayer LoraInit(std::size_t d, std::size_t k, int r, int alpha, std::uint64_t seed) {
  CheckRankAlpha(d, k, r, alpha);
  Rng rng(seed);
  Matrix W(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < W.rows(); ++i) {
    for (Eigen::Index j = 0; j < W.cols(); ++j) W(i, j) = 2.0 * rng.Uniform() - 1.0;
  }
  return LoraInit(W, r, alpha, seed);
}

Vector BaseForward(const LoraLayer& layer, const Vector& x) {
  if (x.size() != layer.W.cols()) {
    throw DimensionError("input has " + std::to_string(x.size()) + " entries, layer expects " +
                         std::to_string(layer.W.cols()));
  }
  return layer.W * x;
}

Vector LoraForward(const LoraLayer& layer, const Vector& x) {
  CheckLayer(layer);
  Vector y = BaseForward(layer, x);
  y.noalias() += layer.scale() * (layer.B * (layer.A * x));
  return y;
}

double SquaredErrorLoss(const LoraLayer& layer, const Vector& x, const Vector& target) {
  Vector y = LoraForward(layer, x);
  if (target.size() != y.size()) throw DimensionError("target size does not match the layer output");
  return 0.5 * (y - target).squaredNorm();
}

LoraGradients LossGradients(const LoraLayer& layer, const Vector& x, const Vector& target) {
  Vector y = LoraForward(layer, x);
  if (target.size() != y.size()) throw DimensionError("target size does not match the layer output");
  Vector g = y - target;
  double s = layer.scale();
  LoraGradients out;
  // dL/dB = s g (A x)^T ; dL/dA = s B^T g x^T
  out.dB = s * g * (layer.A * x).transpose();
  out.dA = s * (layer.B.transpose() * g) * x.transpose();
  return out;
}

double GradCheck(const LoraLayer& layer, const Vector& x, const Vector& target, double eps) {
  LoraGradients analytic = LossGradients(layer, x, target);
  LoraLayer probe = layer;
  double worst = 0.0;
  auto compare = [&](Matrix& param, const Matrix& grad) {
    for (Eigen::Index i = 0; i < param.rows(); ++i) {
      for (Eigen::Index j = 0; j < param.cols(); ++j) {
        double saved = param(i, j);
        param(i, j) = saved + eps;
        double up = SquaredErrorLoss(probe, x, target);
        param(i, j) = saved - eps;
        double down = SquaredErrorLoss(probe, x, target);
        param(i, j) = saved;
        double numeric = (up - down) / (2.0 * eps);
        double a = grad(i, j);
        double denom = std::max(std::abs(a), std::abs(numeric));
        if (denom < 1e-10) continue;
        worst = std::max(worst, std::abs(a - numeric) / denom);
      }
    }
  };
  compare(probe.A, analytic.dA);
  compare(probe.B, analytic.dB);
  return worst;
}

void SgdStep(LoraLayer* layer, const Vector& x, const Vector& target, double learning_rate) {
  LoraGradients g = LossGradients(*layer, x, target);
  layer->A -= learning_rate * g.dA;
  layer->B -= learning_rate * g.dB;
}

}  // namespace dialtree
