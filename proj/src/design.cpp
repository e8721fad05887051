#include "hakernel/design.hpp"

#include <string>

#include "hakernel/errors.hpp"

namespace hakernel {
namespace {

void append_combinations(int d, int size, int start, std::vector<int>& current, SubsetIndex& out) {
  if (static_cast<int>(current.size()) == size) {
    out.push_back(current);
    return;
  }
  for (int j = start; j < d; ++j) {
    current.push_back(j);
    append_combinations(d, size, j + 1, current, out);
    current.pop_back();
  }
}

}  // namespace

SubsetIndex enumerate_subsets(int d, int m) {
  if (d < 1) throw UsageError("hal_design: d must be >= 1");
  if (m < 1 || m > d)
    throw UsageError("hal_design: interaction order m=" + std::to_string(m) + " outside 1.." + std::to_string(d));
  SubsetIndex out;
  std::vector<int> current;
  for (int size = 1; size <= m; ++size) append_combinations(d, size, 0, current, out);
  return out;
}

DesignMatrix build_design(const Eigen::MatrixXd& knots, const Eigen::MatrixXd& eval_points, int m,
                          std::int64_t budget) {
  if (knots.cols() != eval_points.cols())
    throw DataError("hal_design: knots have " + std::to_string(knots.cols()) + " columns, eval points " +
                    std::to_string(eval_points.cols()));
  const int d = static_cast<int>(knots.cols());
  DesignMatrix design;
  design.subsets = enumerate_subsets(d, m);
  design.n_knots = knots.rows();

  const std::int64_t p = static_cast<std::int64_t>(design.subsets.size()) * knots.rows();
  if (eval_points.rows() > 0 && p > budget / eval_points.rows())
    throw NumericError("hal_design: design with " + std::to_string(eval_points.rows()) + " x " +
                       std::to_string(p) + " entries exceeds budget " + std::to_string(budget));

  design.H = IntMatrix::Zero(eval_points.rows(), p);
  for (Eigen::Index a = 0; a < eval_points.rows(); ++a) {
    for (std::size_t s = 0; s < design.subsets.size(); ++s) {
      for (Eigen::Index i = 0; i < knots.rows(); ++i) {
        bool on = true;
        for (int j : design.subsets[s]) {
          if (!(eval_points(a, j) >= knots(i, j))) {
            on = false;
            break;
          }
        }
        design.H(a, design.column(s, i)) = on ? 1 : 0;
      }
    }
  }
  return design;
}

}  // namespace hakernel
