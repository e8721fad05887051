#include "hakernel/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "hakernel/errors.hpp"

namespace hakernel {

void canonicalize_signs(Matrix& U) {
  for (Eigen::Index j = 0; j < U.cols(); ++j) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < U.rows(); ++i) {
      const double a = std::abs(U(i, j));
      if (a > best) {
        best = a;
        arg = i;
      }
    }
    if (U(arg, j) < 0.0) U.col(j) = -U.col(j);
  }
}

GramSpectrum eig_sym(const Matrix& K, double rel_tol) {
  const Eigen::Index n = K.rows();
  if (K.cols() != n) throw DataError("spectral: eig_sym needs a square matrix");
  if (n == 0) throw DataError("spectral: eig_sym on an empty matrix");
  if (!K.allFinite()) throw NumericError("spectral: non-finite Gram entries");
  const double scale = std::max(1.0, K.cwiseAbs().maxCoeff());
  if ((K - K.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale)
    throw DataError("spectral: eig_sym input is not symmetric");

  const Eigen::SelfAdjointEigenSolver<Matrix> solver(K);
  if (solver.info() != Eigen::Success) throw NumericError("spectral: eigensolver failed to converge");
  const Vector& w = solver.eigenvalues();  // ascending
  const Matrix& A = solver.eigenvectors();

  const double top = w(n - 1);
  Eigen::Index r = 0;
  if (top > 0.0)
    while (r < n && w(n - 1 - r) > rel_tol * top) ++r;

  GramSpectrum spectrum;
  spectrum.n = n;
  spectrum.r = r;
  spectrum.D.resize(r);
  spectrum.U.resize(n, r);
  for (Eigen::Index j = 0; j < r; ++j) {
    spectrum.D(j) = w(n - 1 - j);
    spectrum.U.col(j) = A.col(n - 1 - j);
  }
  canonicalize_signs(spectrum.U);
  return spectrum;
}

GramSpectrum eig_sym(const GramMatrix& K, double rel_tol) { return eig_sym(K.K, rel_tol); }

PCScores pc_scores(const GramSpectrum& spectrum, Eigen::Index k) {
  if (k < 1 || k > spectrum.r)
    throw UsageError("spectral: rank k=" + std::to_string(k) + " outside 1.." + std::to_string(spectrum.r));
  PCScores scores;
  scores.k = k;
  scores.Z = spectrum.U.leftCols(k) * spectrum.D.head(k).cwiseSqrt().asDiagonal();
  return scores;
}

GramSpectrum sine_eigensystem(Eigen::Index n, int d) {
  if (n < 1) throw UsageError("spectral: sine_eigensystem needs n >= 1");
  if (d < 1 || d > 62) throw UsageError("spectral: sine_eigensystem needs 1 <= d <= 62");
  const double scale = std::ldexp(1.0, d) - 1.0;
  const double denom = 2.0 * static_cast<double>(n) + 1.0;
  const double norm = std::sqrt(4.0 / denom);
  GramSpectrum spectrum;
  spectrum.n = n;
  spectrum.r = n;
  spectrum.D.resize(n);
  spectrum.U.resize(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    const double odd = 2.0 * static_cast<double>(k) - 1.0;
    const double half_angle = odd * std::numbers::pi / (2.0 * denom);
    const double s = std::sin(half_angle);
    spectrum.D(k - 1) = scale / (4.0 * s * s);
    for (Eigen::Index i = 1; i <= n; ++i)
      spectrum.U(i - 1, k - 1) = norm * std::sin(odd * static_cast<double>(i) * std::numbers::pi / denom);
  }
  return spectrum;
}

std::optional<std::vector<Eigen::Index>> total_order(const Matrix& X) {
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(X.rows()));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  if (X.cols() == 0) return std::nullopt;
  std::sort(perm.begin(), perm.end(), [&](Eigen::Index a, Eigen::Index b) { return X(a, 0) < X(b, 0); });
  for (std::size_t i = 1; i < perm.size(); ++i)
    for (Eigen::Index j = 0; j < X.cols(); ++j)
      if (!(X(perm[i - 1], j) < X(perm[i], j))) return std::nullopt;
  return perm;
}

}  // namespace hakernel
