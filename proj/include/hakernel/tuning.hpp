#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hakernel/data.hpp"
#include "hakernel/estimators.hpp"

namespace hakernel {

enum class SelectKBy {
  TrainMse,  // full-sample training MSE at lambda_hat(k) (default)
  Cv,        // CV risk at lambda_hat(k); non-default alternative
};

struct TuningGrid {
  std::vector<Eigen::Index> k_candidates;  // empty: default_k_grid(n)
  std::vector<double> lambdas;             // empty: default_lambda_grid()
  int m_max = 0;                           // 0: d
  std::optional<int> fixed_m;              // evaluate this order only
  int V = 5;
  EstimatorKind kind = EstimatorKind::Lasso;
  SelectKBy select_k_by = SelectKBy::TrainMse;
  bool stop_on_no_improvement = true;

  /// Fills defaults and sorts; throws UsageError on invalid values.
  TuningGrid resolved(Eigen::Index n, int d) const;
};

/// 25 values, log10 spaced over [-9, 1].
std::vector<double> default_lambda_grid();

/// 1..n-1 for n <= 400, otherwise 64 log-spaced distinct ranks in [1, n-1].
std::vector<Eigen::Index> default_k_grid(Eigen::Index n);

struct CvCell {
  int m = 0;
  Eigen::Index k = 0;
  double lambda = 0.0;
  double risk = 0.0;  // NaN when infeasible
  bool feasible = false;
};

struct TuningReport {
  EstimatorKind kind = EstimatorKind::Lasso;
  int V = 0;
  std::uint64_t fold_seed = 0;
  std::vector<CvCell> cells;  // by m, then k, then lambda (grid order)
  std::map<int, double> profiled_risk_of_m;
  // for the selected order
  std::map<Eigen::Index, double> lambda_hat_of_k;
  std::map<Eigen::Index, double> cv_risk_of_k;
  std::map<Eigen::Index, double> train_mse_of_k;
  int m_hat = 0;
  Eigen::Index k_hat = 0;
  double lambda_hat = 0.0;

  /// Columns m,k,lambda,cv_risk,feasible plus a trailing "# selected ..." line.
  std::string to_csv() const;
  std::string summary() const;
};

/// Held-out squared-error table over (k, lambda) for one training fit.
/// `scores` are out-of-sample PC scores (N x r), `projections` u_j^T y_centered
/// on the training side, `eigenvalues` the training spectrum D. Rows follow
/// `ks`, columns follow `lambdas`. Rows with k > r are NaN.
Matrix heldout_mse_table(const Matrix& scores, const Vector& projections, const Vector& eigenvalues,
                         Eigen::Index n_train, double y_offset, const Vector& y_heldout,
                         const std::vector<Eigen::Index>& ks, const std::vector<double>& lambdas,
                         EstimatorKind kind);

/// V-fold CV risk for one cell; nullopt when k exceeds some training fold's rank.
std::optional<double> cv_risk(const Dataset& scaled, int m, Eigen::Index k, double lambda,
                              const FoldAssignment& folds, EstimatorKind kind);

struct LambdaChoice {
  double lambda = 0.0;
  double risk = 0.0;
};

/// argmin over the lambda grid, ties toward larger lambda.
LambdaChoice select_lambda(const Dataset& scaled, int m, Eigen::Index k, const TuningGrid& grid,
                           const FoldAssignment& folds);

struct KChoice {
  Eigen::Index k_hat = 0;
  double lambda_hat = 0.0;
  std::map<Eigen::Index, double> lambda_hat_of_k;
  std::map<Eigen::Index, double> cv_risk_of_k;
  std::map<Eigen::Index, double> train_mse_of_k;
};

/// lambda_hat(k) by CV for each feasible k, then k_hat by full-sample training MSE
/// (or CV risk, per grid.select_k_by), ties toward smaller k.
KChoice select_k(const Dataset& scaled, int m, const TuningGrid& grid, const FoldAssignment& folds);

/// Forward search over m = 1, 2, ... with shared folds; stops at the first
/// order whose profiled risk does not strictly improve.
TuningReport profile_m(const Dataset& scaled, const TuningGrid& grid, const FoldAssignment& folds);

struct TuningResult {
  TuningReport report;
  FittedModel model;
};

/// Full pipeline on scaled data: folds from `seed`, profile_m, refit at the selected triple.
TuningResult tune_and_fit(const Dataset& scaled, const Scaler& scaler, const TuningGrid& grid, std::uint64_t seed);

}  // namespace hakernel
