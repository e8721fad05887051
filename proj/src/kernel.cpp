#include "hakernel/kernel.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "hakernel/errors.hpp"
#include "hakernel/simd/active_count.hpp"

namespace hakernel {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void check_points(const Matrix& X, const char* what) {
  if (!X.allFinite()) throw DataError(std::string("ha_kernel: non-finite entries in ") + what);
}

// Fills out[o](a, b) for every order in `weights`. When `symmetric`, rows and
// cols are the same point set and only b >= a is computed, then mirrored.
void assemble(const Matrix& rows, const Matrix& cols, const Matrix& knots, bool symmetric,
              const std::vector<std::vector<std::int64_t>>& weights, Schedule schedule,
              std::vector<IntMatrix>& out) {
  const int d = static_cast<int>(knots.cols());
  const Eigen::Index N = rows.rows();
  const Eigen::Index M = cols.rows();
  out.assign(weights.size(), IntMatrix::Zero(N, M));
  if (N == 0 || M == 0) return;

  const RowMatrix r = rows;
  const RowMatrix c = cols;

  if (schedule == Schedule::Reference) {
    const RowMatrix k = knots;
    for (Eigen::Index a = 0; a < N; ++a) {
      for (Eigen::Index b = symmetric ? a : 0; b < M; ++b) {
        for (Eigen::Index i = 0; i < knots.rows(); ++i) {
          const int t = active_count({r.row(a).data(), static_cast<std::size_t>(d)},
                                     {c.row(b).data(), static_cast<std::size_t>(d)},
                                     {k.row(i).data(), static_cast<std::size_t>(d)});
          for (std::size_t o = 0; o < weights.size(); ++o) out[o](a, b) += weights[o][t];
        }
      }
    }
  } else {
    const simd::KnotPanel panel = simd::make_knot_panel(knots);
    const simd::HistogramKernel kernel = simd::histogram_kernel(simd::active_isa());
#pragma omp parallel
    {
      std::vector<double> mins(static_cast<std::size_t>(d));
      std::vector<std::uint32_t> hist(static_cast<std::size_t>(d) + 1);
#pragma omp for schedule(dynamic, 4)
      for (Eigen::Index a = 0; a < N; ++a) {
        for (Eigen::Index b = symmetric ? a : 0; b < M; ++b) {
          for (int j = 0; j < d; ++j) mins[j] = std::min(r(a, j), c(b, j));
          std::fill(hist.begin(), hist.end(), 0u);
          kernel(panel, mins.data(), hist.data());
          for (std::size_t o = 0; o < weights.size(); ++o) {
            std::int64_t sum = 0;
            for (int t = 1; t <= d; ++t) sum += static_cast<std::int64_t>(hist[t]) * weights[o][t];
            out[o](a, b) = sum;
          }
        }
      }
    }
  }

  if (symmetric) {
    for (auto& K : out)
      for (Eigen::Index a = 0; a < N; ++a)
        for (Eigen::Index b = a + 1; b < M; ++b) K(b, a) = K(a, b);
  }
}

std::vector<std::vector<std::int64_t>> weights_up_to(int d, int m_max) {
  std::vector<std::vector<std::int64_t>> w;
  for (int m = 1; m <= m_max; ++m) w.push_back(order_weights(d, m));
  return w;
}

}  // namespace

void KernelConfig::validate(int d) const {
  if (m < 1 || m > d)
    throw UsageError("ha_kernel: interaction order m=" + std::to_string(m) + " outside 1.." + std::to_string(d));
}

int active_count(std::span<const double> u, std::span<const double> v, std::span<const double> knot) {
  if (u.size() != v.size() || u.size() != knot.size())
    throw DataError("ha_kernel: active_count dimension mismatch");
  int count = 0;
  for (std::size_t j = 0; j < u.size(); ++j) count += std::min(u[j], v[j]) >= knot[j] ? 1 : 0;
  return count;
}

std::vector<std::int64_t> order_weights(int d, int m) {
  if (d < 1 || d > 62) throw NumericError("ha_kernel: dimension d=" + std::to_string(d) + " outside 1..62");
  if (m < 1 || m > d)
    throw UsageError("ha_kernel: interaction order m=" + std::to_string(m) + " outside 1.." + std::to_string(d));
  // Pascal's triangle; C(t, l) <= 2^62 for t <= 62.
  std::vector<std::vector<std::int64_t>> binom(static_cast<std::size_t>(d) + 1);
  for (int t = 0; t <= d; ++t) {
    binom[t].assign(static_cast<std::size_t>(t) + 1, 1);
    for (int l = 1; l < t; ++l) binom[t][l] = binom[t - 1][l - 1] + binom[t - 1][l];
  }
  std::vector<std::int64_t> w(static_cast<std::size_t>(d) + 1, 0);
  for (int t = 1; t <= d; ++t)
    for (int l = 1; l <= std::min(m, t); ++l) w[t] += binom[t][l];
  return w;
}

void check_gram_width(Eigen::Index n_knots, int d) {
  if (d < 1 || d > 62) throw NumericError("ha_kernel: dimension d=" + std::to_string(d) + " outside 1..62");
  const std::int64_t per_knot = (std::int64_t{1} << d) - 1;
  if (n_knots > std::numeric_limits<std::int64_t>::max() / per_knot)
    throw NumericError("ha_kernel: Gram entries for n=" + std::to_string(n_knots) + ", d=" + std::to_string(d) +
                       " overflow 64-bit integers");
}

IntMatrix gram_exact(const Matrix& X, int m, Schedule schedule) {
  check_points(X, "X");
  const int d = static_cast<int>(X.cols());
  KernelConfig{m, false}.validate(d);
  check_gram_width(X.rows(), d);
  std::vector<IntMatrix> out;
  assemble(X, X, X, true, {order_weights(d, m)}, schedule, out);
  return std::move(out.front());
}

IntMatrix cross_gram_exact(const Matrix& X_new, const Matrix& X_train, int m, Schedule schedule) {
  if (X_new.cols() != X_train.cols())
    throw DataError("ha_kernel: cross_gram dimension mismatch (" + std::to_string(X_new.cols()) + " vs " +
                    std::to_string(X_train.cols()) + ")");
  check_points(X_new, "X_new");
  check_points(X_train, "X_train");
  const int d = static_cast<int>(X_train.cols());
  KernelConfig{m, false}.validate(d);
  check_gram_width(X_train.rows(), d);
  std::vector<IntMatrix> out;
  assemble(X_new, X_train, X_train, false, {order_weights(d, m)}, schedule, out);
  return std::move(out.front());
}

std::vector<IntMatrix> gram_all_orders(const Matrix& X, int m_max) {
  check_points(X, "X");
  const int d = static_cast<int>(X.cols());
  KernelConfig{m_max, false}.validate(d);
  check_gram_width(X.rows(), d);
  std::vector<IntMatrix> out;
  assemble(X, X, X, true, weights_up_to(d, m_max), Schedule::Blocked, out);
  return out;
}

std::vector<IntMatrix> cross_gram_all_orders(const Matrix& X_new, const Matrix& X_train, int m_max) {
  if (X_new.cols() != X_train.cols()) throw DataError("ha_kernel: cross_gram dimension mismatch");
  check_points(X_new, "X_new");
  check_points(X_train, "X_train");
  const int d = static_cast<int>(X_train.cols());
  KernelConfig{m_max, false}.validate(d);
  check_gram_width(X_train.rows(), d);
  std::vector<IntMatrix> out;
  assemble(X_new, X_train, X_train, false, weights_up_to(d, m_max), Schedule::Blocked, out);
  return out;
}

GramMatrix make_gram(const IntMatrix& K, bool center) {
  GramMatrix g;
  g.K = K.cast<double>();
  g.column_means = g.K.colwise().mean().transpose();
  g.centered = false;
  return center ? center_gram(g) : g;
}

GramMatrix gram(const Matrix& X, const KernelConfig& config) {
  config.validate(static_cast<int>(X.cols()));
  return make_gram(gram_exact(X, config.m), config.center);
}

Matrix cross_gram(const Matrix& X_new, const Matrix& X_train, const KernelConfig& config) {
  return cross_gram_exact(X_new, X_train, config.m).cast<double>();
}

GramMatrix center_gram(const GramMatrix& K) {
  if (K.K.rows() != K.K.cols()) throw DataError("ha_kernel: center_gram needs a square matrix");
  if (K.centered) return K;
  GramMatrix out;
  out.column_means = K.K.colwise().mean().transpose();
  const Vector row_means = K.K.rowwise().mean();
  const double grand = out.column_means.mean();
  out.K = K.K;
  out.K.colwise() -= row_means;
  out.K.rowwise() -= out.column_means.transpose();
  out.K.array() += grand;
  // exact symmetry; the two rounding orders above can differ in the last bit
  out.K = (0.5 * (out.K + out.K.transpose())).eval();
  out.centered = true;
  return out;
}

Matrix center_cross(const Matrix& K_new, const Vector& column_means) {
  if (K_new.cols() != column_means.size())
    throw DataError("ha_kernel: center_cross expects " + std::to_string(column_means.size()) + " columns, got " +
                    std::to_string(K_new.cols()));
  Matrix out = K_new;
  out.rowwise() -= column_means.transpose();
  const Vector row_means = out.rowwise().mean();
  out.colwise() -= row_means;
  return out;
}

}  // namespace hakernel
