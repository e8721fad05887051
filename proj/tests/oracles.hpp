#pragma once
// Reference computations used only by tests. Each is written from the
// definitions, independently of the library's production paths.

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "hakernel/data.hpp"
#include "hakernel/design.hpp"

namespace oracle {

using hakernel::IntMatrix;
using hakernel::Matrix;
using hakernel::Vector;

inline Matrix uniform(Eigen::Index n, Eigen::Index d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix X(n, d);
  for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = u(rng);
  return X;
}

/// Values on a coarse grid so ties between coordinates are frequent.
inline Matrix gridded(Eigen::Index n, Eigen::Index d, int levels, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> u(0, levels - 1);
  Matrix X(n, d);
  for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = static_cast<double>(u(rng)) / (levels - 1);
  return X;
}

/// Explicit indicator design, columns enumerated by bitmask subsets of size <= m.
/// Column order differs from the library's; Gram products do not depend on it.
inline IntMatrix design(const Matrix& knots, const Matrix& eval, int m) {
  const int d = static_cast<int>(knots.cols());
  std::vector<unsigned> masks;
  for (unsigned s = 1; s < (1u << d); ++s)
    if (__builtin_popcount(s) <= m) masks.push_back(s);
  IntMatrix H = IntMatrix::Zero(eval.rows(), static_cast<Eigen::Index>(masks.size()) * knots.rows());
  for (Eigen::Index a = 0; a < eval.rows(); ++a)
    for (std::size_t c = 0; c < masks.size(); ++c)
      for (Eigen::Index i = 0; i < knots.rows(); ++i) {
        bool on = true;
        for (int j = 0; j < d; ++j)
          if ((masks[c] >> j & 1u) && !(eval(a, j) >= knots(i, j))) on = false;
        H(a, static_cast<Eigen::Index>(c) * knots.rows() + i) = on ? 1 : 0;
      }
  return H;
}

inline Matrix centering(Eigen::Index n) {
  return Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
}

/// Ridge in PC coordinates by a dense solve of (Z^T Z + n lambda I) beta = Z^T y.
inline Vector ridge_solve(const Matrix& Z, const Vector& y, double lambda) {
  const auto n = static_cast<double>(Z.rows());
  const Matrix A = Z.transpose() * Z + n * lambda * Matrix::Identity(Z.cols(), Z.cols());
  return A.ldlt().solve(Z.transpose() * y);
}

/// Prediction through the explicit centered design: with Ht = J H and
/// V_k = Ht^T U_k D_k^{-1/2}, f' = (H' - 1 mu^T) V_k beta + ybar.
inline Vector design_path_prediction(const Matrix& X_train, const Matrix& X_new, int m, const Matrix& U_k,
                                     const Vector& D_k, const Vector& beta, double y_mean) {
  const Matrix H = design(X_train, X_train, m).cast<double>();
  const Matrix Hn = design(X_train, X_new, m).cast<double>();
  const Vector mu = H.colwise().mean().transpose();
  const Matrix Ht = centering(H.rows()) * H;
  const Matrix V = Ht.transpose() * U_k * D_k.cwiseSqrt().cwiseInverse().asDiagonal();
  const Matrix Hnt = Hn.rowwise() - mu.transpose();
  return (Hnt * V * beta).array() + y_mean;
}

}  // namespace oracle
