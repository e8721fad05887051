#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace hakernel {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Covariates (n x d) plus response (n). After scaling every covariate lies in [0,1].
struct Dataset {
  Matrix X;
  Vector y;
  std::vector<std::string> feature_names;

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index d() const { return X.cols(); }

  /// Throws DataError unless n >= 1, d >= 1, sizes agree and all entries are finite.
  void validate() const;

  /// Rows listed in `rows`, in that order.
  Dataset subset(const std::vector<Eigen::Index>& rows) const;
};

/// Per-feature (min, max) learned from training data.
struct Scaler {
  Vector min;
  Vector max;

  Eigen::Index d() const { return min.size(); }

  /// Scaler mapping [lo, hi] onto [0,1] in every one of d features.
  static Scaler fixed_range(Eigen::Index d, double lo = 0.0, double hi = 1.0);

  /// Inverse affine map; constant features map back to their constant.
  Matrix invert(const Matrix& scaled) const;
};

struct FoldAssignment {
  int V = 0;
  std::uint64_t seed = 0;
  std::vector<int> fold_of;  // values in 1..V

  Eigen::Index n() const { return static_cast<Eigen::Index>(fold_of.size()); }
  std::vector<Eigen::Index> train_rows(int fold) const;
  std::vector<Eigen::Index> test_rows(int fold) const;
};

/// Column selector for the response: a header name or a 1-based column index.
using ColumnRef = std::variant<std::string, int>;

/// Parses a comma-delimited numeric table with a header row.
Dataset load_csv(const std::filesystem::path& path, const ColumnRef& response_column);

/// Same parser, for an in-memory table. `source` names the input in errors.
Dataset parse_csv(const std::string& text, const ColumnRef& response_column,
                  const std::string& source = "<memory>");

/// Parses a covariate-only table (no response), as used for prediction input.
Matrix parse_csv_features(const std::string& text, std::vector<std::string>* header,
                          const std::string& source = "<memory>");

Scaler scale_fit(const Dataset& train);

/// Applies the affine map and clamps into [0,1]. `clamped_rows`, when given,
/// receives the number of rows that had at least one value clamped.
Matrix scale_apply(const Scaler& scaler, const Matrix& X, std::size_t* clamped_rows = nullptr);
Dataset scale_apply(const Scaler& scaler, const Dataset& data, std::size_t* clamped_rows = nullptr);

/// Balanced shuffled V-fold split, reproducible for fixed (n, V, seed).
FoldAssignment make_folds(Eigen::Index n, int V, std::uint64_t seed);

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);

}  // namespace hakernel
