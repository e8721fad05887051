#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hakernel/design.hpp"

namespace hakernel {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct KernelConfig {
  int m = 1;           // max interaction order, 1 <= m <= d
  bool center = true;  // double-center the training Gram

  void validate(int d) const;
};

/// Training Gram. `column_means` always holds the column means of the
/// uncentered K; `centered` records whether K itself was double-centered.
struct GramMatrix {
  Matrix K;
  Vector column_means;
  bool centered = false;

  Eigen::Index n() const { return K.rows(); }
};

/// Gram assembly strategy. Both produce identical integers.
enum class Schedule {
  Reference,  // naive triple loop, scalar, single thread
  Blocked,    // SIMD histogram kernel, parallel over rows
};

/// |{ j : min(u_j, v_j) >= knot_j }|
int active_count(std::span<const double> u, std::span<const double> v, std::span<const double> knot);

/// weights[t] = sum_{l=1}^{min(m,t)} C(t,l) for t = 0..d: the number of subsets of
/// size <= m inside a t-element active set.
std::vector<std::int64_t> order_weights(int d, int m);

/// Throws NumericError if n * (2^d - 1) does not fit a signed 64-bit integer.
void check_gram_width(Eigen::Index n_knots, int d);

IntMatrix gram_exact(const Matrix& X, int m, Schedule schedule = Schedule::Blocked);

/// Rows index X_new, columns index X_train; knots always come from X_train.
IntMatrix cross_gram_exact(const Matrix& X_new, const Matrix& X_train, int m,
                           Schedule schedule = Schedule::Blocked);

/// Uncentered Grams for every order m = 1..m_max from one pass over the knots.
std::vector<IntMatrix> gram_all_orders(const Matrix& X, int m_max);
std::vector<IntMatrix> cross_gram_all_orders(const Matrix& X_new, const Matrix& X_train, int m_max);

/// Training Gram, double-centered when config.center is set.
GramMatrix gram(const Matrix& X, const KernelConfig& config);

/// Wraps an exact uncentered Gram, centering it when `center` is set.
GramMatrix make_gram(const IntMatrix& K, bool center);

/// Uncentered cross-kernel as doubles.
Matrix cross_gram(const Matrix& X_new, const Matrix& X_train, const KernelConfig& config);

/// JKJ, keeping the uncentered column means for cross-centering.
GramMatrix center_gram(const GramMatrix& K);

/// (K_new - 1 c^T) J, the cross-kernel of centered new-point features against
/// the centered training design.
Matrix center_cross(const Matrix& K_new, const Vector& column_means);

}  // namespace hakernel
