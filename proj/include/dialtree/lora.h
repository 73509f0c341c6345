/*!
 *  Copyright (c) 2026 by Contributors
 * \file dialtree/lora.h
 * \brief Reference low-rank adapter: y = W x + (alpha / r) B A x with W frozen.
 */
#ifndef DIALTREE_LORA_H_
#define DIALTREE_LORA_H_

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <cstdint>

namespace dialtree {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/*! \brief Fine-tuning defaults of the reference setup. Nothing in this library trains a model. */
struct LoraHyperparams {
  int rank = 512;
  int alpha = 512;
  double learning_rate = 4e-4;
};

/*! \brief Search grid: alpha in {r, 2r} for each rank, crossed with the learning rates. */
inline constexpr std::array<int, 3> kLoraRankGrid = {16, 128, 512};
inline constexpr std::array<int, 2> kLoraAlphaMultiples = {1, 2};
inline constexpr std::array<double, 3> kLoraLearningRateGrid = {1e-4, 4e-4, 8e-4};

struct LoraLayer {
  Matrix W;  // d x k, frozen
  Matrix A;  // r x k
  Matrix B;  // d x r
  int rank = 0;
  int alpha = 0;

  std::size_t d() const { return static_cast<std::size_t>(W.rows()); }
  std::size_t k() const { return static_cast<std::size_t>(W.cols()); }
  double scale() const { return static_cast<double>(alpha) / rank; }
  /*! \brief The delta (alpha / r) B A. */
  Matrix Delta() const { return scale() * B * A; }
};

/*!
 * \brief W is drawn uniform in [-1, 1), A uniform in [-1/sqrt(k), 1/sqrt(k)), B = 0.
 * \throws RankError unless 1 <= r <= min(d, k).
 * \throws AlphaError unless alpha is a positive multiple of r.
 */
LoraLayer LoraInit(std::size_t d, std::size_t k, int r, int alpha, std::uint64_t seed);

/*! \brief As LoraInit but with a given base matrix. */
LoraLayer LoraInit(const Matrix& W, int r, int alpha, std::uint64_t seed);

/*! \brief Checks shapes, rank and alpha. \throws RankError, AlphaError, DimensionError */
void CheckLayer(const LoraLayer& layer);

/*! \throws DimensionError if x has the wrong size. */
Vector LoraForward(const LoraLayer& layer, const Vector& x);

/*! \brief W x alone. */
Vector BaseForward(const LoraLayer& layer, const Vector& x);

struct LoraGradients {
  Matrix dA;
  Matrix dB;
};

/*! \brief Loss 0.5 * ||forward(x) - target||^2. */
double SquaredErrorLoss(const LoraLayer& layer, const Vector& x, const Vector& target);

/*! \brief Analytic gradients of SquaredErrorLoss with respect to A and B. */
LoraGradients LossGradients(const LoraLayer& layer, const Vector& x, const Vector& target);

/*!
 * \brief Largest relative error between analytic and central-difference gradients over all
 *  entries of A and B. Entries where both magnitudes are below 1e-10 count as exact.
 */
double GradCheck(const LoraLayer& layer, const Vector& x, const Vector& target, double eps = 1e-5);

/*! \brief One gradient step on A and B. W is left untouched. */
void SgdStep(LoraLayer* layer, const Vector& x, const Vector& target, double learning_rate);

}  // namespace dialtree

#endif  // DIALTREE_LORA_H_
