#include "hakernel/estimators.hpp"

#include <cmath>
#include <string>

#include "hakernel/errors.hpp"

namespace hakernel {
namespace {

void check_rank(const GramSpectrum& spectrum, Eigen::Index k) {
  if (k < 1 || k > spectrum.r)
    throw UsageError("estimators: rank k=" + std::to_string(k) + " outside 1.." + std::to_string(spectrum.r));
}

void check_centered(const GramSpectrum& spectrum, const Vector& y) {
  if (y.size() != spectrum.n)
    throw DataError("estimators: response length " + std::to_string(y.size()) + " differs from n=" +
                    std::to_string(spectrum.n));
  const double scale = std::max(1.0, y.cwiseAbs().maxCoeff());
  if (std::abs(y.mean()) > 1e-10 * scale) throw DataError("estimators: response must be centered");
}

}  // namespace

std::string_view kind_name(EstimatorKind kind) { return kind == EstimatorKind::Ridge ? "pchar" : "pchal"; }

EstimatorKind parse_kind(std::string_view name) {
  if (name == "pchar" || name == "ridge") return EstimatorKind::Ridge;
  if (name == "pchal" || name == "lasso") return EstimatorKind::Lasso;
  throw UsageError("estimators: unknown estimator kind '" + std::string(name) + "' (expected pchal or pchar)");
}

Vector pc_projections(const GramSpectrum& spectrum, const Vector& y_centered) {
  if (y_centered.size() != spectrum.n) throw DataError("estimators: response length differs from spectrum");
  return spectrum.U.transpose() * y_centered;
}

double pchar_coefficient(double eigenvalue, double projection, double n_lambda) {
  if (!(eigenvalue > 0.0)) return 0.0;
  return std::sqrt(eigenvalue) * projection / (eigenvalue + n_lambda);
}

double pchal_coefficient(double eigenvalue, double projection, double n_lambda) {
  if (!(eigenvalue > 0.0)) return 0.0;
  const double w = std::sqrt(eigenvalue) * projection;
  const double excess = std::abs(w) - n_lambda;
  return excess > 0.0 ? std::copysign(excess, w) / eigenvalue : 0.0;
}

Coefs fit_pchar(const GramSpectrum& spectrum, const Vector& y_centered, Eigen::Index k, double lambda) {
  if (!(lambda > 0.0)) throw UsageError("estimators: ridge penalty must be > 0");
  check_rank(spectrum, k);
  check_centered(spectrum, y_centered);
  const Vector proj = spectrum.U.leftCols(k).transpose() * y_centered;
  const double n_lambda = static_cast<double>(spectrum.n) * lambda;
  Coefs c{Vector(k), k, lambda, EstimatorKind::Ridge};
  for (Eigen::Index j = 0; j < k; ++j) c.beta(j) = pchar_coefficient(spectrum.D(j), proj(j), n_lambda);
  return c;
}

Coefs fit_pchal(const GramSpectrum& spectrum, const Vector& y_centered, Eigen::Index k, double lambda) {
  if (!(lambda >= 0.0)) throw UsageError("estimators: lasso penalty must be >= 0");
  check_rank(spectrum, k);
  check_centered(spectrum, y_centered);
  const Vector proj = spectrum.U.leftCols(k).transpose() * y_centered;
  const double n_lambda = static_cast<double>(spectrum.n) * lambda;
  Coefs c{Vector(k), k, lambda, EstimatorKind::Lasso};
  for (Eigen::Index j = 0; j < k; ++j) c.beta(j) = pchal_coefficient(spectrum.D(j), proj(j), n_lambda);
  return c;
}

Coefs fit_pc(EstimatorKind kind, const GramSpectrum& spectrum, const Vector& y_centered, Eigen::Index k,
             double lambda) {
  return kind == EstimatorKind::Ridge ? fit_pchar(spectrum, y_centered, k, lambda)
                                      : fit_pchal(spectrum, y_centered, k, lambda);
}

Vector path_thresholds(const GramSpectrum& spectrum, const Vector& y_centered) {
  const Vector proj = pc_projections(spectrum, y_centered);
  return (spectrum.D.cwiseSqrt().array() * proj.array().abs()).matrix() / static_cast<double>(spectrum.n);
}

CdResult cd_lasso_oracle(const PCScores& scores, const Vector& y_centered, double lambda, CdOptions options) {
  if (!(lambda >= 0.0)) throw UsageError("estimators: lasso penalty must be >= 0");
  const Matrix& Z = scores.Z;
  if (Z.rows() != y_centered.size()) throw DataError("estimators: score rows differ from response length");
  const double n = static_cast<double>(Z.rows());
  const Eigen::Index k = Z.cols();

  Vector beta = Vector::Zero(k);
  Vector residual = y_centered;
  const Vector col_sq = Z.colwise().squaredNorm().transpose() / n;

  CdResult result;
  for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (!(col_sq(j) > 0.0)) continue;
      const double rho = Z.col(j).dot(residual) / n + col_sq(j) * beta(j);
      const double shrunk = std::abs(rho) > lambda ? std::copysign(std::abs(rho) - lambda, rho) : 0.0;
      const double updated = shrunk / col_sq(j);
      const double delta = updated - beta(j);
      if (delta != 0.0) {
        residual -= delta * Z.col(j);
        beta(j) = updated;
      }
      max_change = std::max(max_change, std::abs(delta));
    }
    if (max_change < options.tolerance) {
      result.sweeps = sweep;
      result.coefs = Coefs{beta, k, lambda, EstimatorKind::Lasso};
      return result;
    }
  }
  throw NumericError("estimators: coordinate descent did not converge in " + std::to_string(options.max_sweeps) +
                     " sweeps");
}

Vector FittedModel::fitted_values() const {
  return (U_k * (D_k.cwiseSqrt().array() * beta.array()).matrix()).array() + y_mean;
}

void FittedModel::validate() const {
  const auto n_ = n();
  if (n_ < 1 || d() < 1) throw DataError("estimators: model has no training points");
  if (scaler.d() != d()) throw DataError("estimators: model scaler dimension differs from training data");
  if (gram_column_means.size() != n_) throw DataError("estimators: model column means have wrong length");
  if (U_k.rows() != n_ || U_k.cols() != k || D_k.size() != k || beta.size() != k)
    throw DataError("estimators: model spectral pieces have inconsistent shapes");
  if (m < 1 || m > d()) throw DataError("estimators: model interaction order out of range");
  if (!D_k.allFinite() || (k > 0 && D_k.minCoeff() <= 0.0)) throw DataError("estimators: model eigenvalues invalid");
}

SpectralFit spectral_fit(const IntMatrix& K_uncentered) {
  SpectralFit fit;
  fit.gram = make_gram(K_uncentered, true);
  fit.spectrum = eig_sym(fit.gram);
  return fit;
}

SpectralFit spectral_fit(const Matrix& X_scaled, int m) { return spectral_fit(gram_exact(X_scaled, m)); }

FittedModel fit_model(const Dataset& scaled, const Scaler& scaler, int m, const SpectralFit& fit, Eigen::Index k,
                      double lambda, EstimatorKind kind) {
  scaled.validate();
  if (fit.spectrum.n != scaled.n()) throw DataError("estimators: spectrum size differs from training data");
  if (k > fit.spectrum.r)
    throw NumericError("estimators: rank k=" + std::to_string(k) + " exceeds numerical rank " +
                       std::to_string(fit.spectrum.r));
  FittedModel model;
  model.kind = kind;
  model.m = m;
  model.k = k;
  model.lambda = lambda;
  model.scaler = scaler;
  model.feature_names = scaled.feature_names;
  model.X_train = scaled.X;
  model.y_mean = scaled.y.mean();
  const Vector y_centered = scaled.y.array() - model.y_mean;
  model.gram_column_means = fit.gram.column_means;
  model.U_k = fit.spectrum.U.leftCols(k);
  model.D_k = fit.spectrum.D.head(k);
  model.beta = fit_pc(kind, fit.spectrum, y_centered, k, lambda).beta;
  return model;
}

FittedModel fit_model(const Dataset& scaled, const Scaler& scaler, int m, Eigen::Index k, double lambda,
                      EstimatorKind kind) {
  return fit_model(scaled, scaler, m, spectral_fit(scaled.X, m), k, lambda, kind);
}

Matrix out_of_sample_scores(const Matrix& X_new_scaled, const Matrix& X_train, int m, const Vector& column_means,
                            const Matrix& U, const Vector& D) {
  const Matrix centered = center_cross(cross_gram(X_new_scaled, X_train, KernelConfig{m, true}), column_means);
  return centered * U * D.cwiseSqrt().cwiseInverse().asDiagonal();
}

Vector predict_scaled(const FittedModel& model, const Matrix& X_new_scaled) {
  model.validate();
  if (X_new_scaled.cols() != model.d())
    throw DataError("estimators: model expects " + std::to_string(model.d()) + " features, got " +
                    std::to_string(X_new_scaled.cols()));
  if (X_new_scaled.rows() == 0) return Vector(0);
  const Matrix scores =
      out_of_sample_scores(X_new_scaled, model.X_train, model.m, model.gram_column_means, model.U_k, model.D_k);
  return (scores * model.beta).array() + model.y_mean;
}

Vector predict(const FittedModel& model, const Matrix& X_new_raw, std::size_t* clamped_rows) {
  return predict_scaled(model, scale_apply(model.scaler, X_new_raw, clamped_rows));
}

}  // namespace hakernel
