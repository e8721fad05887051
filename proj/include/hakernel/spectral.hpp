#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "hakernel/kernel.hpp"

namespace hakernel {

/// Leading eigenpairs of a symmetric PSD Gram: D strictly positive and
/// non-increasing, U (n x r) with orthonormal columns.
struct GramSpectrum {
  Matrix U;
  Vector D;
  Eigen::Index r = 0;
  Eigen::Index n = 0;
};

/// Principal-component scores Z = U_k diag(sqrt(D_k)).
struct PCScores {
  Matrix Z;
  Eigen::Index k = 0;
};

inline constexpr double kRankTolerance = 1e-10;

/// Symmetric eigendecomposition. Eigenvalues below rel_tol * d_1 are dropped.
/// Each eigenvector is signed so its largest-magnitude entry (lowest index on
/// ties) is positive.
GramSpectrum eig_sym(const Matrix& K, double rel_tol = kRankTolerance);
GramSpectrum eig_sym(const GramMatrix& K, double rel_tol = kRankTolerance);

PCScores pc_scores(const GramSpectrum& spectrum, Eigen::Index k);

/// Closed-form eigensystem of (2^d - 1) * min(i, j), i, j = 1..n, in descending order.
GramSpectrum sine_eigensystem(Eigen::Index n, int d);

/// Permutation perm such that X.row(perm[0]), X.row(perm[1]), ... is strictly
/// increasing in every coordinate, or nullopt when no such order exists.
std::optional<std::vector<Eigen::Index>> total_order(const Matrix& X);

/// Applies the sign convention used by eig_sym to every column of U.
void canonicalize_signs(Matrix& U);

}  // namespace hakernel
