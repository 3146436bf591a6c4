#include <doctest.h>

#include "identity_checks.hpp"

using jacoest::Rng;

TEST_CASE("augmented-matrix product identity on random 4x4 blocks") {
  Rng rng(1);
  for (int i = 0; i < 50; ++i) CHECK(identity::block_svd_product(rng) < 1e-10);
}

TEST_CASE("augmented-matrix spectrum with orthogonal column spaces") {
  Rng rng(2);
  for (int i = 0; i < 50; ++i) CHECK(identity::block_svd_spectrum(rng) < 1e-10);
}

TEST_CASE("stacked bases are not orthonormal when column spaces overlap") {
  // The product identity holds for any blocks, but [U_X U_Y] is only an
  // eigenbasis of Z Z^T when the column spaces are orthogonal.
  Rng rng(3);
  const jacoest::Matrix x = oracle::random_matrix(rng, 4, 4), y = oracle::random_matrix(rng, 4, 4);
  Eigen::JacobiSVD<jacoest::Matrix> sx(x, Eigen::ComputeFullU), sy(y, Eigen::ComputeFullU);
  jacoest::Matrix u(4, 8);
  u << sx.matrixU(), sy.matrixU();
  CHECK((u.transpose() * u - jacoest::Matrix::Identity(8, 8)).norm() > 0.1);
}

TEST_CASE("quadratic-form gradient against complex-step differentiation") {
  Rng rng(4);
  for (int i = 0; i < 50; ++i) CHECK(identity::quadratic_gradient(rng, 2 + i % 6) < 1e-10);
}

TEST_CASE("chain rule against complex-step differentiation") {
  Rng rng(5);
  for (int i = 0; i < 50; ++i) CHECK(identity::chain_rule(rng) < 1e-10);
}

TEST_CASE("least-squares and weighted objective gradients") {
  Rng rng(6);
  for (int i = 0; i < 50; ++i) {
    CHECK(identity::weighted_gradient(rng, true) < 1e-10);
    CHECK(identity::weighted_gradient(rng, false) < 1e-10);
  }
}

TEST_CASE("estimators satisfy their normal equations") {
  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    CHECK(identity::lse_stationarity(rng, 2 + i % 4) < 1e-10);
    CHECK(identity::gls_stationarity(rng, 2 + i % 4) < 1e-10);
  }
}
