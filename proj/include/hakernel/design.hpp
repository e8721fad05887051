#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace hakernel {

using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Nonempty coordinate subsets (0-based, sorted) of size <= m, ordered by size then
/// lexicographically.
using SubsetIndex = std::vector<std::vector<int>>;

SubsetIndex enumerate_subsets(int d, int m);

/// Explicit zero-order HAL design: one column per (subset, knot) pair,
/// subset-major and knot-minor. Entries are 0/1.
struct DesignMatrix {
  IntMatrix H;
  SubsetIndex subsets;
  Eigen::Index n_knots = 0;

  Eigen::Index p() const { return H.cols(); }
  Eigen::Index column(std::size_t subset, Eigen::Index knot) const {
    return static_cast<Eigen::Index>(subset) * n_knots + knot;
  }
};

inline constexpr std::int64_t kDefaultDesignBudget = 10'000'000;

/// Entry (a, (s,i)) is 1 iff eval_points(a,j) >= knots(i,j) for every j in s.
/// Throws once rows * p would exceed `budget` entries.
DesignMatrix build_design(const Eigen::MatrixXd& knots, const Eigen::MatrixXd& eval_points, int m,
                          std::int64_t budget = kDefaultDesignBudget);

}  // namespace hakernel
