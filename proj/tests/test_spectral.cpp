#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "hakernel/errors.hpp"
#include "hakernel/kernel.hpp"
#include "hakernel/spectral.hpp"
#include "oracles.hpp"

using namespace hakernel;

namespace {

// strictly increasing in every coordinate
Matrix ordered_sample(Eigen::Index n, int d, std::mt19937_64& rng) {
  Matrix X(n, d);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int j = 0; j < d; ++j) {
    std::vector<double> col(static_cast<std::size_t>(n));
    for (auto& c : col) c = u(rng);
    std::sort(col.begin(), col.end());
    for (Eigen::Index i = 0; i < n; ++i) X(i, j) = col[static_cast<std::size_t>(i)];
  }
  return X;
}

}  // namespace

TEST_CASE("eig_sym on a diagonal matrix") {
  Matrix K = Matrix::Zero(2, 2);
  K(0, 0) = 1.0;
  K(1, 1) = 3.0;
  const GramSpectrum s = eig_sym(K);
  CHECK(s.r == 2);
  CHECK(s.D(0) == doctest::Approx(3.0));
  CHECK(s.D(1) == doctest::Approx(1.0));
  CHECK(s.U(1, 0) == doctest::Approx(1.0));
  CHECK(s.U(0, 1) == doctest::Approx(1.0));
}

TEST_CASE("centered constant design loses rank") {
  Matrix X = Matrix::Constant(3, 2, 0.4);
  const GramSpectrum s = eig_sym(gram(X, KernelConfig{2, true}));
  CHECK(s.r < 3);
}

TEST_CASE("eig_sym rejects non-symmetric input") {
  Matrix K(2, 2);
  K << 1, 2, 0, 1;
  CHECK_THROWS_AS(eig_sym(K), DataError);
  CHECK_THROWS_AS(eig_sym(Matrix::Zero(2, 3)), DataError);
}

TEST_CASE("spectrum invariants on random centered Grams") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 12; ++trial) {
    const int d = 1 + trial % 4;
    const Matrix X = trial % 3 ? oracle::uniform(40, d, rng) : oracle::gridded(40, d, 4, rng);
    const GramMatrix G = gram(X, KernelConfig{d, true});
    const GramSpectrum s = eig_sym(G);
    const auto r = s.r;
    CHECK(r >= 1);
    CHECK(r <= 39);
    CHECK((s.U.transpose() * s.U - Matrix::Identity(r, r)).cwiseAbs().maxCoeff() < 1e-8);
    for (Eigen::Index j = 0; j < r; ++j) {
      CHECK((G.K * s.U.col(j) - s.D(j) * s.U.col(j)).cwiseAbs().maxCoeff() < 1e-6 * s.D(0));
      CHECK(std::abs(s.U.col(j).mean()) < 1e-8);
      if (j > 0) CHECK(s.D(j) <= s.D(j - 1));
      CHECK(s.D(j) > 0.0);
      // sign convention
      Eigen::Index arg = 0;
      s.U.col(j).cwiseAbs().maxCoeff(&arg);
      CHECK(s.U(arg, j) > 0.0);
    }
    const Matrix R = G.K - s.U * s.D.asDiagonal() * s.U.transpose();
    CHECK(R.norm() <= 1e-6 * G.K.norm());
    // independent check: singular values of a PSD matrix are its eigenvalues
    const Eigen::JacobiSVD<Matrix> svd(G.K);
    const Vector sv = svd.singularValues();
    for (Eigen::Index j = 0; j < r; ++j) CHECK(std::abs(s.D(j) - sv(j)) <= 1e-9 * sv(0));
    // PSD
    CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(G.K).eigenvalues().minCoeff() >= -1e-10 * s.D(0));
  }
}

TEST_CASE("pc_scores") {
  std::mt19937_64 rng(32);
  const Matrix X = oracle::uniform(25, 2, rng);
  const GramSpectrum s = eig_sym(gram(X, KernelConfig{2, true}));
  const PCScores Z = pc_scores(s, s.r);
  const Matrix G = Z.Z.transpose() * Z.Z;
  CHECK((G - Matrix(s.D.asDiagonal())).cwiseAbs().maxCoeff() <= 1e-6 * s.D(0));
  CHECK(pc_scores(s, 1).Z.squaredNorm() == doctest::Approx(s.D(0)).epsilon(1e-10));
  CHECK(Z.Z.colwise().mean().cwiseAbs().maxCoeff() < 1e-8);
  CHECK_THROWS_AS(pc_scores(s, 0), UsageError);
  CHECK_THROWS_AS(pc_scores(s, s.r + 1), UsageError);
}

TEST_CASE("sine eigensystem small cases") {
  const GramSpectrum one = sine_eigensystem(1, 1);
  CHECK(one.D(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(one.U(0, 0)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(sine_eigensystem(1, 3).D(0) == doctest::Approx(7.0).epsilon(1e-14));
  const GramSpectrum s = sine_eigensystem(30, 2);
  CHECK((s.U.transpose() * s.U - Matrix::Identity(30, 30)).cwiseAbs().maxCoeff() < 1e-12);
  for (Eigen::Index k = 1; k < 30; ++k) CHECK(s.D(k) < s.D(k - 1));
}

TEST_CASE("sine eigensystem matches the ordered-sample Gram") {
  std::mt19937_64 rng(33);
  const Matrix X = ordered_sample(50, 2, rng);
  const GramSpectrum num = eig_sym(gram(X, KernelConfig{2, false}));
  const GramSpectrum ref = sine_eigensystem(50, 2);
  REQUIRE(num.r == 50);
  for (Eigen::Index k = 0; k < 50; ++k) {
    CHECK(std::abs(num.D(k) - ref.D(k)) <= 1e-8 * ref.D(k));
    const double sign = num.U.col(k).dot(ref.U.col(k)) < 0 ? -1.0 : 1.0;
    CHECK((num.U.col(k) - sign * ref.U.col(k)).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("shuffled ordered sample: same eigenvalues, permuted sine vectors") {
  std::mt19937_64 rng(34);
  const Eigen::Index n = 40;
  const Matrix X = ordered_sample(n, 3, rng);
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Matrix Xs(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) Xs.row(i) = X.row(perm[static_cast<std::size_t>(i)]);

  const auto order = total_order(Xs);
  REQUIRE(order.has_value());
  for (Eigen::Index i = 0; i < n; ++i) CHECK(perm[static_cast<std::size_t>((*order)[static_cast<std::size_t>(i)])] == i);

  const GramSpectrum num = eig_sym(gram(Xs, KernelConfig{3, false}));
  const GramSpectrum ref = sine_eigensystem(n, 3);
  for (Eigen::Index k = 0; k < n; ++k) {
    CHECK(std::abs(num.D(k) - ref.D(k)) <= 1e-8 * ref.D(k));
    Vector expect(n);
    for (Eigen::Index i = 0; i < n; ++i) expect(i) = ref.U(perm[static_cast<std::size_t>(i)], k);
    const double sign = num.U.col(k).dot(expect) < 0 ? -1.0 : 1.0;
    CHECK((num.U.col(k) - sign * expect).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("total_order detection is strict") {
  Matrix X(3, 2);
  X << 0.1, 0.2, 0.3, 0.2, 0.5, 0.9;
  CHECK_FALSE(total_order(X).has_value());
  X(1, 1) = 0.25;
  CHECK(total_order(X).has_value());
  X << 0.1, 0.9, 0.3, 0.2, 0.5, 0.4;
  CHECK_FALSE(total_order(X).has_value());
}

TEST_CASE("continuum limit of the scaled eigenvalues") {
  const Eigen::Index n = 2000;
  const GramSpectrum s = sine_eigensystem(n, 1);
  const double h = 1.0 / static_cast<double>(n + 1);
  for (int k = 1; k <= 5; ++k) {
    const double limit = 1.0 / std::pow((k - 0.5) * std::numbers::pi, 2);
    CHECK(std::abs(h * h * s.D(k - 1) - limit) <= 1e-3 * limit);
  }
}
