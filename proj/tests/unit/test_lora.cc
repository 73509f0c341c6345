/*!
 *  Copyright (c) 2026 by Contributors
 * \file test_lora.cc
 */
#include <dialtree/error.h>
#include <dialtree/lora.h>
#include <doctest.h>

using namespace dialtree;

namespace {

LoraLayer HandLayer() {
  LoraLayer l;
  l.W = Matrix::Identity(2, 2);
  l.A = Matrix(1, 2);
  l.A << 1, 0;
  l.B = Matrix(2, 1);
  l.B << 1, 0;
  l.rank = 1;
  l.alpha = 2;
  return l;
}

}  // namespace

TEST_CASE("hand-computed forward") {
  Vector x(2);
  x << 1, 1;
  Vector y = LoraForward(HandLayer(), x);
  CHECK(std::abs(y(0) - 3.0) < 1e-12);
  CHECK(std::abs(y(1) - 1.0) < 1e-12);
}

TEST_CASE("defaults and grids") {
  LoraHyperparams hp;
  CHECK(hp.rank == 512);
  CHECK(hp.alpha == 512);
  CHECK(hp.learning_rate == 4e-4);
  CHECK(kLoraRankGrid[0] == 16);
  CHECK(kLoraRankGrid[2] == 512);
  CHECK(kLoraAlphaMultiples[1] == 2);
  CHECK(kLoraLearningRateGrid[2] == 8e-4);
}

TEST_CASE("initialization") {
  LoraLayer l = LoraInit(6, 5, 2, 4, 7);
  CHECK(l.d() == 6);
  CHECK(l.k() == 5);
  CHECK(l.A.rows() == 2);
  CHECK(l.A.cols() == 5);
  CHECK(l.B.rows() == 6);
  CHECK(l.B.cols() == 2);
  CHECK(l.B.isZero(0.0));
  CHECK(l.scale() == 2.0);
  Vector x = Vector::LinSpaced(5, -1, 1);
  CHECK(LoraForward(l, x) == BaseForward(l, x));
  CHECK(LoraInit(6, 5, 2, 4, 7).A == l.A);
  CHECK(LoraInit(6, 5, 2, 4, 8).A != l.A);
  CHECK(LoraInit(2, 2, 1, 1, 0).scale() == 1.0);
}

TEST_CASE("precondition errors") {
  CHECK_THROWS_AS(LoraInit(4, 4, 5, 5, 0), RankError);
  CHECK_THROWS_AS(LoraInit(4, 4, 0, 0, 0), RankError);
  CHECK_THROWS_AS(LoraInit(4, 4, 2, 3, 0), AlphaError);
  CHECK_THROWS_AS(LoraInit(4, 4, 2, 0, 0), AlphaError);
  CHECK_THROWS_AS(LoraForward(HandLayer(), Vector::Ones(3)), DimensionError);
  LoraLayer bad = HandLayer();
  bad.A = Matrix::Ones(2, 2);
  CHECK_THROWS_AS(CheckLayer(bad), DimensionError);
}

TEST_CASE("gradient check on random layers") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    LoraLayer l = LoraInit(4, 4, 2, 4, seed);
    l.B = Matrix::Random(4, 2);
    Vector x = Vector::Random(4);
    Vector t = Vector::Random(4);
    CHECK(GradCheck(l, x, t) < 1e-4);
  }
}

TEST_CASE("zero B gives a zero gradient for A") {
  LoraLayer l = LoraInit(4, 3, 1, 2, 1);
  Vector x = Vector::Ones(3);
  Vector t = Vector::Zero(4);
  LoraGradients g = LossGradients(l, x, t);
  CHECK(g.dA.isZero(0.0));
  CHECK_FALSE(g.dB.isZero(0.0));
  CHECK(GradCheck(l, x, t) < 1e-4);
}

TEST_CASE("zero input gives zero gradients") {
  LoraLayer l = LoraInit(3, 3, 1, 1, 2);
  l.B = Matrix::Ones(3, 1);
  LoraGradients g = LossGradients(l, Vector::Zero(3), Vector::Ones(3));
  CHECK(g.dA.isZero(0.0));
  CHECK(g.dB.isZero(0.0));
}

TEST_CASE("property: linearity and the alpha scaling law") {
  LoraLayer l = LoraInit(5, 4, 2, 2, 3);
  l.B = Matrix::Random(5, 2);
  Vector x = Vector::Random(4), y = Vector::Random(4);
  Vector lhs = LoraForward(l, 2.5 * x - 0.5 * y);
  Vector rhs = 2.5 * LoraForward(l, x) - 0.5 * LoraForward(l, y);
  CHECK((lhs - rhs).norm() <= 1e-10 * rhs.norm());
  LoraLayer doubled = l;
  doubled.alpha = 4;
  Vector base = BaseForward(l, x);
  Vector d1 = LoraForward(l, x) - base;
  Vector d2 = LoraForward(doubled, x) - base;
  CHECK((d2 - 2.0 * d1).norm() <= 1e-10);
}

TEST_CASE("training steps leave the base frozen and lower the loss") {
  LoraLayer l = LoraInit(4, 4, 2, 2, 5);
  Matrix w0 = l.W;
  Vector x = Vector::Random(4), t = Vector::Random(4);
  double before = SquaredErrorLoss(l, x, t);
  for (int i = 0; i < 50; ++i) SgdStep(&l, x, t, 0.05);
  CHECK(l.W == w0);
  CHECK(SquaredErrorLoss(l, x, t) < before);
}
