#include "hakernel/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hakernel/errors.hpp"

namespace hakernel {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// a is a strict improvement over b beyond rounding noise
bool improves(double a, double b) { return a < b - 1e-12 * std::abs(b); }

// CV risk over the (k, lambda) grid for one interaction order.
struct Surface {
  int m = 0;
  Matrix risk;  // ks x lambdas, NaN where infeasible
  std::vector<bool> feasible;
};

class CvEngine {
 public:
  CvEngine(const Dataset& data, const FoldAssignment& folds, int m_max)
      : data_(data), folds_(folds), m_max_(m_max) {
    if (folds.n() != data.n()) throw DataError("tuning: fold assignment size differs from data");
  }

  Surface surface(int m, const TuningGrid& grid) {
    Surface s;
    s.m = m;
    s.risk = Matrix::Zero(static_cast<Eigen::Index>(grid.k_candidates.size()),
                          static_cast<Eigen::Index>(grid.lambdas.size()));
    for (int v = 1; v <= folds_.V; ++v) {
      const Fold& fold = fold_data(v);
      const SpectralFit fit = spectral_fit(fold.K_train[static_cast<std::size_t>(m - 1)]);
      const double y_mean = fold.y_train.mean();
      const Vector y_centered = fold.y_train.array() - y_mean;
      const Vector proj = pc_projections(fit.spectrum, y_centered);
      const Matrix scores = center_cross(fold.K_cross[static_cast<std::size_t>(m - 1)].cast<double>(),
                                         fit.gram.column_means) *
                            fit.spectrum.U * fit.spectrum.D.cwiseSqrt().cwiseInverse().asDiagonal();
      s.risk += heldout_mse_table(scores, proj, fit.spectrum.D, fold.y_train.size(), y_mean, fold.y_test,
                                  grid.k_candidates, grid.lambdas, grid.kind);
    }
    s.risk /= static_cast<double>(folds_.V);
    s.feasible.resize(grid.k_candidates.size());
    for (std::size_t i = 0; i < grid.k_candidates.size(); ++i)
      s.feasible[i] = !std::isnan(s.risk(static_cast<Eigen::Index>(i), 0));
    return s;
  }

  const SpectralFit& full_fit(int m) {
    auto it = full_.find(m);
    if (it == full_.end()) it = full_.emplace(m, spectral_fit(data_.X, m)).first;
    return it->second;
  }

 private:
  struct Fold {
    std::vector<IntMatrix> K_train;  // index m-1
    std::vector<IntMatrix> K_cross;
    Vector y_train;
    Vector y_test;
  };

  const Fold& fold_data(int v) {
    auto it = cache_.find(v);
    if (it != cache_.end()) return it->second;
    const Dataset train = data_.subset(folds_.train_rows(v));
    const Dataset test = data_.subset(folds_.test_rows(v));
    Fold fold;
    fold.K_train = gram_all_orders(train.X, m_max_);
    fold.K_cross = cross_gram_all_orders(test.X, train.X, m_max_);
    fold.y_train = train.y;
    fold.y_test = test.y;
    return cache_.emplace(v, std::move(fold)).first->second;
  }

  const Dataset& data_;
  const FoldAssignment& folds_;
  int m_max_;
  std::map<int, Fold> cache_;
  std::map<int, SpectralFit> full_;
};

LambdaChoice best_lambda(const Surface& s, std::size_t k_index, const std::vector<double>& lambdas) {
  LambdaChoice best{kNaN, std::numeric_limits<double>::infinity()};
  // scan from the largest lambda so ties stay with the more regularized choice
  for (std::size_t l = lambdas.size(); l-- > 0;) {
    const double r = s.risk(static_cast<Eigen::Index>(k_index), static_cast<Eigen::Index>(l));
    if (std::isnan(best.lambda) || improves(r, best.risk)) best = {lambdas[l], r};
  }
  return best;
}

double training_mse(const SpectralFit& fit, const Vector& y_centered, Eigen::Index k, double lambda,
                    EstimatorKind kind) {
  const Coefs c = fit_pc(kind, fit.spectrum, y_centered, k, lambda);
  const Vector fitted = fit.spectrum.U.leftCols(k) * (fit.spectrum.D.head(k).cwiseSqrt().array() * c.beta.array()).matrix();
  return (y_centered - fitted).squaredNorm() / static_cast<double>(y_centered.size());
}

KChoice choose_k(const Surface& s, const TuningGrid& grid, const SpectralFit& full, const Vector& y_centered) {
  KChoice choice;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.k_candidates.size(); ++i) {
    const Eigen::Index k = grid.k_candidates[i];
    if (!s.feasible[i] || k > full.spectrum.r) continue;
    const LambdaChoice lc = best_lambda(s, i, grid.lambdas);
    const double mse = training_mse(full, y_centered, k, lc.lambda, grid.kind);
    choice.lambda_hat_of_k[k] = lc.lambda;
    choice.cv_risk_of_k[k] = lc.risk;
    choice.train_mse_of_k[k] = mse;
    const double criterion = grid.select_k_by == SelectKBy::TrainMse ? mse : lc.risk;
    if (choice.k_hat == 0 || improves(criterion, best)) {
      best = criterion;
      choice.k_hat = k;
      choice.lambda_hat = lc.lambda;
    }
  }
  if (choice.k_hat == 0) throw NumericError("tuning: no feasible rank in the k grid");
  return choice;
}

double profiled(const Surface& s) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < s.risk.rows(); ++i)
    if (s.feasible[static_cast<std::size_t>(i)]) best = std::min(best, s.risk.row(i).minCoeff());
  return best;
}

}  // namespace

std::vector<double> default_lambda_grid() {
  std::vector<double> grid(25);
  for (int i = 0; i < 25; ++i) grid[static_cast<std::size_t>(i)] = std::pow(10.0, -9.0 + 10.0 * i / 24.0);
  return grid;
}

std::vector<Eigen::Index> default_k_grid(Eigen::Index n) {
  std::vector<Eigen::Index> ks;
  const Eigen::Index top = std::max<Eigen::Index>(1, n - 1);
  if (n <= 400) {
    for (Eigen::Index k = 1; k <= top; ++k) ks.push_back(k);
    return ks;
  }
  constexpr int kPoints = 64;
  const double log_top = std::log(static_cast<double>(top));
  for (int i = 0; i < kPoints; ++i) {
    const auto k = static_cast<Eigen::Index>(std::llround(std::exp(log_top * i / (kPoints - 1))));
    if (ks.empty() || ks.back() != k) ks.push_back(k);
  }
  return ks;
}

TuningGrid TuningGrid::resolved(Eigen::Index n, int d) const {
  TuningGrid g = *this;
  if (g.lambdas.empty()) g.lambdas = default_lambda_grid();
  if (g.k_candidates.empty()) g.k_candidates = default_k_grid(n);
  std::sort(g.lambdas.begin(), g.lambdas.end());
  g.lambdas.erase(std::unique(g.lambdas.begin(), g.lambdas.end()), g.lambdas.end());
  std::sort(g.k_candidates.begin(), g.k_candidates.end());
  g.k_candidates.erase(std::unique(g.k_candidates.begin(), g.k_candidates.end()), g.k_candidates.end());
  for (double l : g.lambdas)
    if (!(l > 0.0) || !std::isfinite(l)) throw UsageError("tuning: lambda grid values must be positive and finite");
  if (g.k_candidates.front() < 1) throw UsageError("tuning: k grid values must be >= 1");
  if (g.m_max == 0) g.m_max = d;
  if (g.m_max < 1 || g.m_max > d)
    throw UsageError("tuning: m_max=" + std::to_string(g.m_max) + " outside 1.." + std::to_string(d));
  if (g.fixed_m && (*g.fixed_m < 1 || *g.fixed_m > d))
    throw UsageError("tuning: m=" + std::to_string(*g.fixed_m) + " outside 1.." + std::to_string(d));
  if (g.fixed_m) g.m_max = std::max(g.m_max, *g.fixed_m);
  if (g.V < 2 || g.V > n) throw UsageError("tuning: fold count must satisfy 2 <= V <= n");
  return g;
}

Matrix heldout_mse_table(const Matrix& scores, const Vector& projections, const Vector& eigenvalues,
                         Eigen::Index n_train, double y_offset, const Vector& y_heldout,
                         const std::vector<Eigen::Index>& ks, const std::vector<double>& lambdas,
                         EstimatorKind kind) {
  const Eigen::Index r = eigenvalues.size();
  Matrix table = Matrix::Constant(static_cast<Eigen::Index>(ks.size()), static_cast<Eigen::Index>(lambdas.size()), kNaN);
  Eigen::Index k_top = 0;
  for (auto k : ks)
    if (k <= r) k_top = std::max(k_top, k);
  const auto N = static_cast<double>(y_heldout.size());

  for (std::size_t l = 0; l < lambdas.size(); ++l) {
    const double n_lambda = static_cast<double>(n_train) * lambdas[l];
    Vector prediction = Vector::Constant(y_heldout.size(), y_offset);
    std::size_t ki = 0;
    for (Eigen::Index j = 0; j < k_top; ++j) {
      const double b = kind == EstimatorKind::Ridge ? pchar_coefficient(eigenvalues(j), projections(j), n_lambda)
                                                    : pchal_coefficient(eigenvalues(j), projections(j), n_lambda);
      if (b != 0.0) prediction += b * scores.col(j);
      while (ki < ks.size() && ks[ki] < j + 1) ++ki;
      while (ki < ks.size() && ks[ki] == j + 1) {
        table(static_cast<Eigen::Index>(ki), static_cast<Eigen::Index>(l)) =
            (y_heldout - prediction).squaredNorm() / N;
        ++ki;
      }
    }
  }
  return table;
}

std::optional<double> cv_risk(const Dataset& scaled, int m, Eigen::Index k, double lambda,
                              const FoldAssignment& folds, EstimatorKind kind) {
  TuningGrid grid;
  grid.k_candidates = {k};
  grid.lambdas = {lambda};
  grid.kind = kind;
  grid.V = folds.V;
  grid.fixed_m = m;
  grid = grid.resolved(scaled.n(), static_cast<int>(scaled.d()));
  CvEngine engine(scaled, folds, m);
  const Surface s = engine.surface(m, grid);
  if (!s.feasible.front()) return std::nullopt;
  return s.risk(0, 0);
}

LambdaChoice select_lambda(const Dataset& scaled, int m, Eigen::Index k, const TuningGrid& grid_in,
                           const FoldAssignment& folds) {
  TuningGrid grid = grid_in;
  grid.k_candidates = {k};
  grid.fixed_m = m;
  grid.V = folds.V;
  grid = grid.resolved(scaled.n(), static_cast<int>(scaled.d()));
  CvEngine engine(scaled, folds, m);
  const Surface s = engine.surface(m, grid);
  if (!s.feasible.front())
    throw NumericError("tuning: rank k=" + std::to_string(k) + " infeasible for every lambda (exceeds fold rank)");
  return best_lambda(s, 0, grid.lambdas);
}

KChoice select_k(const Dataset& scaled, int m, const TuningGrid& grid_in, const FoldAssignment& folds) {
  TuningGrid grid = grid_in;
  grid.fixed_m = m;
  grid.V = folds.V;
  grid = grid.resolved(scaled.n(), static_cast<int>(scaled.d()));
  CvEngine engine(scaled, folds, m);
  const Surface s = engine.surface(m, grid);
  const Vector y_centered = scaled.y.array() - scaled.y.mean();
  return choose_k(s, grid, engine.full_fit(m), y_centered);
}

TuningReport profile_m(const Dataset& scaled, const TuningGrid& grid_in, const FoldAssignment& folds) {
  scaled.validate();
  TuningGrid grid = grid_in;
  grid.V = folds.V;
  grid = grid.resolved(scaled.n(), static_cast<int>(scaled.d()));

  TuningReport report;
  report.kind = grid.kind;
  report.V = folds.V;
  report.fold_seed = folds.seed;

  const int m_first = grid.fixed_m.value_or(1);
  const int m_last = grid.fixed_m.value_or(grid.m_max);
  CvEngine engine(scaled, folds, m_last);

  std::map<int, Surface> surfaces;
  int m_hat = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int m = m_first; m <= m_last; ++m) {
    Surface s = engine.surface(m, grid);
    const double risk = profiled(s);
    report.profiled_risk_of_m[m] = risk;
    for (std::size_t i = 0; i < grid.k_candidates.size(); ++i)
      for (std::size_t l = 0; l < grid.lambdas.size(); ++l)
        report.cells.push_back(CvCell{m, grid.k_candidates[i], grid.lambdas[l],
                                      s.risk(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l)),
                                      s.feasible[i]});
    surfaces.emplace(m, std::move(s));
    if (m_hat == 0 || risk < best) {
      best = risk;
      m_hat = m;
    } else if (grid.stop_on_no_improvement) {
      break;
    }
  }
  if (!std::isfinite(best)) throw NumericError("tuning: every (m, k, lambda) cell is infeasible");

  const Vector y_centered = scaled.y.array() - scaled.y.mean();
  const KChoice kc = choose_k(surfaces.at(m_hat), grid, engine.full_fit(m_hat), y_centered);
  report.m_hat = m_hat;
  report.k_hat = kc.k_hat;
  report.lambda_hat = kc.lambda_hat;
  report.lambda_hat_of_k = kc.lambda_hat_of_k;
  report.cv_risk_of_k = kc.cv_risk_of_k;
  report.train_mse_of_k = kc.train_mse_of_k;
  return report;
}

TuningResult tune_and_fit(const Dataset& scaled, const Scaler& scaler, const TuningGrid& grid, std::uint64_t seed) {
  scaled.validate();
  const FoldAssignment folds = make_folds(scaled.n(), grid.V, seed);
  TuningResult result;
  result.report = profile_m(scaled, grid, folds);
  const auto& r = result.report;
  result.model = fit_model(scaled, scaler, r.m_hat, r.k_hat, r.lambda_hat, grid.kind);
  return result;
}

std::string TuningReport::to_csv() const {
  std::ostringstream out;
  out << "m,k,lambda,cv_risk,feasible\n";
  for (const auto& c : cells) {
    out << c.m << ',' << c.k << ',' << format_double(c.lambda) << ','
        << (c.feasible ? format_double(c.risk) : std::string("nan")) << ',' << (c.feasible ? 1 : 0) << '\n';
  }
  out << "# " << summary() << '\n';
  return out.str();
}

std::string TuningReport::summary() const {
  std::ostringstream out;
  out << "selected m=" << m_hat << " k=" << k_hat << " lambda=" << format_double(lambda_hat)
      << " kind=" << kind_name(kind) << " folds=" << V << " seed=" << fold_seed;
  const auto it = profiled_risk_of_m.find(m_hat);
  if (it != profiled_risk_of_m.end()) out << " profiled_cv_risk=" << format_double(it->second);
  return out.str();
}

}  // namespace hakernel
