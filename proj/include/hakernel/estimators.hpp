#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hakernel/data.hpp"
#include "hakernel/kernel.hpp"
#include "hakernel/spectral.hpp"

namespace hakernel {

enum class EstimatorKind { Ridge, Lasso };

/// "pchar" / "pchal"
std::string_view kind_name(EstimatorKind kind);
EstimatorKind parse_kind(std::string_view name);

/// Coefficients in principal-component coordinates.
struct Coefs {
  Vector beta;
  Eigen::Index k = 0;
  double lambda = 0.0;
  EstimatorKind kind = EstimatorKind::Lasso;
};

/// u_j^T y for every retained component.
Vector pc_projections(const GramSpectrum& spectrum, const Vector& y_centered);

/// Closed-form ridge in PC coordinates: beta_j = sqrt(d_j) (u_j^T y) / (d_j + n lambda).
Coefs fit_pchar(const GramSpectrum& spectrum, const Vector& y_centered, Eigen::Index k, double lambda);

/// Closed-form lasso in PC coordinates: with w_j = sqrt(d_j) (u_j^T y),
/// beta_j = sign(w_j) (|w_j| - n lambda)_+ / d_j. Note the threshold is n * lambda,
/// matching a (1/2n) squared-error loss.
Coefs fit_pchal(const GramSpectrum& spectrum, const Vector& y_centered, Eigen::Index k, double lambda);

Coefs fit_pc(EstimatorKind kind, const GramSpectrum& spectrum, const Vector& y_centered, Eigen::Index k,
             double lambda);

/// Componentwise coefficients from precomputed projections (u_j^T y); shared by
/// the fit_* entry points and the cross-validation inner loop.
double pchar_coefficient(double eigenvalue, double projection, double n_lambda);
double pchal_coefficient(double eigenvalue, double projection, double n_lambda);

/// W_j = sqrt(d_j) |u_j^T y| / n. Component j is active in the lasso fit iff W_j > lambda.
Vector path_thresholds(const GramSpectrum& spectrum, const Vector& y_centered);

struct CdOptions {
  double tolerance = 1e-12;
  int max_sweeps = 10'000;
};

struct CdResult {
  Coefs coefs;
  int sweeps = 0;
};

/// Cyclic coordinate descent on (1/2n)||y - Z beta||^2 + lambda ||beta||_1.
/// Makes no use of the diagonal structure of Z^T Z.
CdResult cd_lasso_oracle(const PCScores& scores, const Vector& y_centered, double lambda, CdOptions options = {});

/// Everything needed to predict on raw covariates.
struct FittedModel {
  EstimatorKind kind = EstimatorKind::Lasso;
  int m = 1;
  Eigen::Index k = 0;
  double lambda = 0.0;
  Scaler scaler;
  std::vector<std::string> feature_names;
  Matrix X_train;  // scaled
  double y_mean = 0.0;
  Vector gram_column_means;
  Matrix U_k;
  Vector D_k;
  Vector beta;

  Eigen::Index n() const { return X_train.rows(); }
  Eigen::Index d() const { return X_train.cols(); }

  /// In-sample fit y_mean + U_k diag(sqrt(D_k)) beta.
  Vector fitted_values() const;

  /// Throws DataError when the pieces have inconsistent shapes.
  void validate() const;
};

/// Uncentered training Gram and its centered spectrum for one interaction order.
struct SpectralFit {
  GramMatrix gram;  // centered; column means of the uncentered K
  GramSpectrum spectrum;
};

SpectralFit spectral_fit(const Matrix& X_scaled, int m);
SpectralFit spectral_fit(const IntMatrix& K_uncentered);

/// Fits at fixed (m, k, lambda) on already-scaled training data.
FittedModel fit_model(const Dataset& scaled, const Scaler& scaler, int m, Eigen::Index k, double lambda,
                      EstimatorKind kind);
FittedModel fit_model(const Dataset& scaled, const Scaler& scaler, int m, const SpectralFit& fit, Eigen::Index k,
                      double lambda, EstimatorKind kind);

/// Score matrix K~' U_k D_k^{-1/2} of new scaled points against the training spectrum.
Matrix out_of_sample_scores(const Matrix& X_new_scaled, const Matrix& X_train, int m, const Vector& column_means,
                            const Matrix& U, const Vector& D);

/// Predictions at points already mapped to [0,1].
Vector predict_scaled(const FittedModel& model, const Matrix& X_new_scaled);

/// Scales raw covariates with the model's scaler (clamping), then predicts.
Vector predict(const FittedModel& model, const Matrix& X_new_raw, std::size_t* clamped_rows = nullptr);

}  // namespace hakernel
