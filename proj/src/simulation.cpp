#include "hakernel/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "hakernel/errors.hpp"
#include "hakernel/kernel.hpp"
#include "hakernel/spectral.hpp"

namespace hakernel {
namespace {

constexpr double kPi = std::numbers::pi;

double saw(double t) { return 2.0 * (t - std::floor(t + 0.5)); }
double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }
double pos(double t) { return t > 0.0 ? t : 0.0; }
double ind(bool b) { return b ? 1.0 : 0.0; }

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

int dgp_number(std::string_view id) {
  if (id.size() >= 2 && id[0] == 'd') {
    int v = 0;
    for (char c : id.substr(1)) {
      if (c < '0' || c > '9') return 0;
      v = v * 10 + (c - '0');
    }
    if (v >= 1 && v <= 10) return v;
  }
  return 0;
}

void check_id(std::string_view id) {
  if (!is_known_dgp(id))
    throw UsageError("simulation: unknown DGP id '" + std::string(id) + "' (expected d1..d10, interaction3, const)");
}

double g1(const Vector& x) {
  return 0.35 * x(0) + std::sin(2 * kPi * x(0) * x(0)) + 0.4 * std::cos(4 * kPi * x(0)) + 0.2 * saw(7 * x(0)) -
         0.3 * sigmoid(12 * (x(0) - 0.65));
}

double g2(const Vector& x) {
  return std::sin(kPi * x(0) * x(1)) + 0.5 * std::pow(x(1) - 0.5, 2) + 0.3 * std::cos(3 * kPi * (x(0) + x(1))) -
         0.2 * std::sin(2 * kPi * (x(0) - x(1)));
}

double g3(const Vector& x) {
  const double bump = std::pow(x(0) - 0.7, 2) + std::pow(x(1) - 0.3, 2) + std::pow(x(2) - 0.5, 2);
  return 0.6 * std::sin(2 * kPi * x(0)) + 0.6 * std::cos(2 * kPi * x(1)) + 0.6 * std::sin(2 * kPi * x(2) * x(2)) +
         0.4 * x(1) * x(2) + 0.5 * std::exp(-35 * bump);
}

double g4(const Vector& x) {
  return std::abs(x(0) - 0.5) + 0.7 * pos(x(1) - 0.3) + 0.5 * std::abs(x(2) - 0.7) + 0.6 * pos(0.6 - x(3)) +
         0.3 * ind(x(0) > 0.6) - 0.25 * ind(x(1) < 0.2) + 0.2 * ind(x(2) > 0.8 && x(3) < 0.4);
}

double g5(const Vector& x) {
  const double m = x.head(5).mean();
  return std::pow(m, 1.7) + 0.4 * std::sin(2 * kPi * m) + 0.2 * (x(0) - 0.5) * (x(4) - 0.5);
}

double g6(const Vector& x) {
  return 1.0 * ind(x.head(6).sum() > 3.2) + 0.6 * ind(x(0) > 0.6 && x(1) < 0.4) +
         0.4 * ind(x(2) > 0.7 && x(3) < 0.3) + 0.3 * ind(x(4) + x(5) > 1.1);
}

double g7(const Vector& x) {
  double s = 0.0;
  for (int j = 0; j < 7; ++j) {
    const double A = 7.0 + j;         // 7, 8, ..., 13
    const double w = 1.0 - 0.1 * j;   // 1.0, 0.9, ..., 0.4
    s += w * std::sin(A * kPi * x(j));
  }
  return s + 0.2 * (x(0) - 0.5) * (x(2) - 0.5) - 0.2 * (x(4) - 0.5) * (x(6) - 0.5);
}

double g8(const Vector& x) {
  const auto head = x.head(8).array();
  return std::exp(-30 * (head - 0.3).square().sum()) - 0.8 * std::exp(-30 * (head - 0.7).square().sum()) +
         0.3 * std::sin(2 * kPi * head.mean()) + 0.2 * std::cos(2 * kPi * (x(0) + x(7)));
}

double g9(const Vector& x) {
  return 0.8 * std::sin(kPi * x(0) * x(1)) + 0.25 * (x(2) - 0.5) * (x(8) - 0.5) + 0.3 * x(6) * x(7) +
         0.6 * std::cos(2 * kPi * x.head(9).mean());
}

double g10(const Vector& x) {
  int cells = 0;
  for (int l = 0; l < 4; ++l) cells += static_cast<int>(std::floor(3 * x(l)));
  const double a = static_cast<double>(cells % 2) - 0.5;
  double b = 0.0;
  for (int j = 1; j <= 10; ++j) b += std::cos(2 * kPi * j * x(j - 1));
  b /= 10.0;
  const double c = 0.2 * pos(x(4) - 0.6) + 0.2 * pos(0.4 - x(5)) + 0.2 * ind(x(8) > 0.75);
  return a + 0.6 * b + c;
}

double interaction(const Vector& x) {
  return 1.2 * x(0) - 1.0 * x(1) + 0.8 * x(2) + 0.3 * (x(0) * x(1) - 1.5 * x(1) * x(2));
}

Dataset draw(const DgpSpec& spec, Eigen::Index n, std::uint64_t x_seed, std::uint64_t noise_seed) {
  const int d = dgp_dimension(spec.id);
  const bool symmetric = spec.id == "interaction3";
  std::mt19937_64 x_rng(x_seed);
  std::mt19937_64 e_rng(noise_seed);
  std::uniform_real_distribution<double> unif(symmetric ? -1.0 : 0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  Dataset out;
  out.X.resize(n, d);
  out.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) out.X(i, j) = unif(x_rng);
    const Vector x = out.X.row(i).transpose();
    const double eps = normal(e_rng);
    out.y(i) = dgp_signal(spec.id, x) + spec.noise_scale * dgp_noise_sd(spec.id, x) * eps;
  }
  for (int j = 0; j < d; ++j) out.feature_names.push_back("x" + std::to_string(j + 1));
  return out;
}

int argmin3(const std::array<double, 3>& r) {
  int best = 0;
  for (int m = 1; m < 3; ++m)
    if (r[static_cast<std::size_t>(m)] < r[static_cast<std::size_t>(best)]) best = m;
  return best + 1;
}

double table_min(const Matrix& t) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < t.size(); ++i)
    if (!std::isnan(t.data()[i])) best = std::min(best, t.data()[i]);
  return best;
}

}  // namespace

bool is_known_dgp(std::string_view id) { return dgp_number(id) != 0 || id == "interaction3" || id == "const"; }

int dgp_dimension(std::string_view id) {
  check_id(id);
  if (id == "interaction3") return 3;
  if (id == "const") return 2;
  return dgp_number(id);
}

double dgp_signal(std::string_view id, const Eigen::Ref<const Vector>& xr) {
  check_id(id);
  const Vector x = xr;
  if (x.size() != dgp_dimension(id)) throw DataError("simulation: covariate length does not match " + std::string(id));
  switch (dgp_number(id)) {
    case 1: return g1(x);
    case 2: return g2(x);
    case 3: return g3(x);
    case 4: return g4(x);
    case 5: return g5(x);
    case 6: return g6(x);
    case 7: return g7(x);
    case 8: return g8(x);
    case 9: return g9(x);
    case 10: return g10(x);
    default: break;
  }
  if (id == "interaction3") return interaction(x);
  return 1.0;
}

double dgp_noise_sd(std::string_view id, const Eigen::Ref<const Vector>& x) {
  check_id(id);
  static constexpr double kSd[] = {0.0, 0.05, 0.12, 0.16, 0.18, 0.16, 0.15, 0.20, 0.18, 0.0, 0.18};
  const int k = dgp_number(id);
  if (k == 9) return 0.10 + 0.30 * x.head(9).array().square().mean();
  if (k != 0) return kSd[k];
  if (id == "interaction3") return 0.03;
  return 0.0;
}

DgpDraw gen_dgp(const DgpSpec& spec) {
  check_id(spec.id);
  if (spec.n_train < 1 || spec.n_test < 0) throw UsageError("simulation: n_train must be >= 1 and n_test >= 0");
  if (!(spec.noise_scale >= 0.0)) throw UsageError("simulation: noise scale must be >= 0");
  DgpDraw out;
  out.train = draw(spec, spec.n_train, derive_seed(spec.seed, 0, SeedRole::TrainX),
                   derive_seed(spec.seed, 0, SeedRole::TrainNoise));
  out.test = draw(spec, spec.n_test, derive_seed(spec.seed, 0, SeedRole::TestX),
                  derive_seed(spec.seed, 0, SeedRole::TestNoise));
  out.scaler = spec.id == "interaction3" ? scale_fit(out.train) : Scaler::fixed_range(out.train.d());
  return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t replicate, SeedRole role) {
  std::uint64_t state = seed;
  std::uint64_t h = splitmix64(state);
  state = h ^ replicate;
  h = splitmix64(state);
  state = h ^ static_cast<std::uint64_t>(role);
  return splitmix64(state);
}

double SelectionTable::frequency(std::size_t row, int m) const {
  if (reps == 0) return 0.0;
  return static_cast<double>(counts.at(row).at(static_cast<std::size_t>(m - 1))) / reps;
}

std::string SelectionTable::to_csv() const {
  std::ostringstream out;
  out << "n,m1,m2,m3\n";
  for (std::size_t i = 0; i < ns.size(); ++i)
    out << ns[i] << ',' << format_double(frequency(i, 1)) << ',' << format_double(frequency(i, 2)) << ','
        << format_double(frequency(i, 3)) << '\n';
  return out.str();
}

std::string InteractionResult::replicates_csv() const {
  std::ostringstream out;
  out << "n,rep,seed,m_cv,m_oracle,cv_risk_m1,cv_risk_m2,cv_risk_m3,test_risk_m1,test_risk_m2,test_risk_m3\n";
  for (const auto& r : replicates) {
    out << r.n << ',' << r.rep << ',' << r.seed << ',' << r.m_cv << ',' << r.m_oracle;
    for (double v : r.cv_risk) out << ',' << format_double(v);
    for (double v : r.test_risk) out << ',' << format_double(v);
    out << '\n';
  }
  return out.str();
}

InteractionResult run_interaction_experiment(const InteractionConfig& config) {
  if (config.reps < 1) throw UsageError("simulation: reps must be >= 1");
  if (config.ns.empty()) throw UsageError("simulation: no sample sizes given");
  InteractionResult result;
  result.oracle.ns = result.cv.ns = config.ns;
  result.oracle.reps = result.cv.reps = config.reps;
  result.oracle.counts.assign(config.ns.size(), {0, 0, 0});
  result.cv.counts.assign(config.ns.size(), {0, 0, 0});

  for (std::size_t row = 0; row < config.ns.size(); ++row) {
    const Eigen::Index n = config.ns[row];
    for (int rep = 0; rep < config.reps; ++rep) {
      DgpSpec spec;
      spec.id = "interaction3";
      spec.n_train = n;
      spec.n_test = config.n_test;
      // one stream per (n, replicate)
      spec.seed = derive_seed(config.seed, static_cast<std::uint64_t>(row) << 32 | static_cast<std::uint64_t>(rep),
                              SeedRole::TrainX);
      const DgpDraw draw_ = gen_dgp(spec);
      const Dataset train = scale_apply(draw_.scaler, draw_.train);
      const Dataset test = scale_apply(draw_.scaler, draw_.test);

      TuningGrid grid;
      grid.k_candidates = config.k_candidates;
      grid.lambdas = config.lambdas;
      grid.kind = config.kind;
      grid.V = config.V;
      grid.m_max = 3;
      grid.stop_on_no_improvement = false;
      grid = grid.resolved(n, 3);

      InteractionReplicate rec;
      rec.n = n;
      rec.rep = rep;
      rec.seed = spec.seed;

      const FoldAssignment folds = make_folds(n, config.V, derive_seed(spec.seed, 0, SeedRole::Folds));
      const TuningReport report = profile_m(train, grid, folds);
      for (int m = 1; m <= 3; ++m) rec.cv_risk[static_cast<std::size_t>(m - 1)] = report.profiled_risk_of_m.at(m);
      rec.m_cv = report.m_hat;

      const auto K = gram_all_orders(train.X, 3);
      const auto K_test = cross_gram_all_orders(test.X, train.X, 3);
      const double y_mean = train.y.mean();
      const Vector y_centered = train.y.array() - y_mean;
      for (int m = 1; m <= 3; ++m) {
        const SpectralFit fit = spectral_fit(K[static_cast<std::size_t>(m - 1)]);
        const Matrix scores = center_cross(K_test[static_cast<std::size_t>(m - 1)].cast<double>(),
                                           fit.gram.column_means) *
                              fit.spectrum.U * fit.spectrum.D.cwiseSqrt().cwiseInverse().asDiagonal();
        const Matrix table = heldout_mse_table(scores, pc_projections(fit.spectrum, y_centered), fit.spectrum.D, n,
                                               y_mean, test.y, grid.k_candidates, grid.lambdas, grid.kind);
        rec.test_risk[static_cast<std::size_t>(m - 1)] = table_min(table);
      }
      rec.m_oracle = argmin3(rec.test_risk);

      ++result.cv.counts[row][static_cast<std::size_t>(rec.m_cv - 1)];
      ++result.oracle.counts[row][static_cast<std::size_t>(rec.m_oracle - 1)];
      result.replicates.push_back(rec);
    }
  }
  return result;
}

double MseCell::mean_mse() const {
  if (replicate_mse.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double v : replicate_mse) s += v;
  return s / static_cast<double>(replicate_mse.size());
}

const MseCell& MseResult::find(EstimatorKind kind, int d, Eigen::Index n) const {
  for (const auto& c : cells)
    if (c.kind == kind && c.d == d && c.n == n) return c;
  throw UsageError("simulation: no benchmark cell for the requested (method, d, n)");
}

std::string MseResult::to_csv() const {
  std::vector<int> dims;
  std::vector<Eigen::Index> ns;
  std::vector<EstimatorKind> kinds;
  for (const auto& c : cells) {
    if (std::find(dims.begin(), dims.end(), c.d) == dims.end()) dims.push_back(c.d);
    if (std::find(ns.begin(), ns.end(), c.n) == ns.end()) ns.push_back(c.n);
    if (std::find(kinds.begin(), kinds.end(), c.kind) == kinds.end()) kinds.push_back(c.kind);
  }
  std::ostringstream out;
  out << "n,method";
  for (int d : dims) out << ",d" << d;
  out << '\n';
  for (auto n : ns)
    for (auto kind : kinds) {
      out << n << ',' << kind_name(kind);
      for (int d : dims) out << ',' << format_double(find(kind, d, n).mean_mse());
      out << '\n';
    }
  return out.str();
}

std::string MseResult::replicates_csv() const {
  std::ostringstream out;
  out << "method,d,n,rep,test_mse\n";
  for (const auto& c : cells)
    for (std::size_t r = 0; r < c.replicate_mse.size(); ++r)
      out << kind_name(c.kind) << ',' << c.d << ',' << c.n << ',' << r << ',' << format_double(c.replicate_mse[r])
          << '\n';
  return out.str();
}

MseResult run_mse_benchmark(const MseConfig& config) {
  if (config.reps < 1) throw UsageError("simulation: reps must be >= 1");
  for (int d : config.dims)
    if (config.id_override.empty() && (d < 1 || d > 10))
      throw UsageError("simulation: dimension " + std::to_string(d) + " outside 1..10");
  MseResult result;
  for (Eigen::Index n : config.ns)
    for (int d : config.dims)
      for (auto kind : config.kinds) result.cells.push_back(MseCell{kind, d, n, {}});

  for (std::size_t ni = 0; ni < config.ns.size(); ++ni) {
    const Eigen::Index n = config.ns[ni];
    for (int d : config.dims) {
      for (int rep = 0; rep < config.reps; ++rep) {
        DgpSpec spec;
        spec.id = config.id_override.empty() ? "d" + std::to_string(d) : config.id_override;
        spec.n_train = n;
        spec.n_test = config.n_test;
        spec.seed = derive_seed(config.seed,
                                static_cast<std::uint64_t>(d) << 48 | static_cast<std::uint64_t>(ni) << 32 |
                                    static_cast<std::uint64_t>(rep),
                                SeedRole::TrainX);
        const DgpDraw draw_ = gen_dgp(spec);
        const Dataset train = scale_apply(draw_.scaler, draw_.train);
        const int dim = static_cast<int>(train.d());
        for (auto kind : config.kinds) {
          TuningGrid grid;
          grid.kind = kind;
          grid.V = config.V;
          grid.fixed_m = dim;
          const TuningResult tr = tune_and_fit(train, draw_.scaler, grid, derive_seed(spec.seed, 0, SeedRole::Folds));
          const Vector pred = predict(tr.model, draw_.test.X);
          const double mse = (pred - draw_.test.y).squaredNorm() / static_cast<double>(pred.size());
          for (auto& c : result.cells)
            if (c.kind == kind && c.d == d && c.n == n) c.replicate_mse.push_back(mse);
        }
      }
    }
  }
  return result;
}

Matrix eigen_overlay(Eigen::Index n, int d, int components) {
  if (n < 1 || d < 1) throw UsageError("simulation: overlay needs n >= 1 and d >= 1");
  components = static_cast<int>(std::min<Eigen::Index>(components, n));
  Matrix X(n, d);
  for (Eigen::Index i = 0; i < n; ++i) X.row(i).setConstant(static_cast<double>(i + 1) / static_cast<double>(n + 1));
  const GramSpectrum numeric = eig_sym(gram(X, KernelConfig{d, false}));
  const GramSpectrum exact = sine_eigensystem(n, d);
  Matrix out(n, 1 + 2 * components);
  for (Eigen::Index i = 0; i < n; ++i) out(i, 0) = static_cast<double>(i + 1);
  for (int k = 0; k < components; ++k) {
    Vector u = numeric.U.col(k);
    Vector s = exact.U.col(k);
    if (u.dot(s) < 0) u = -u;
    out.col(1 + k) = u;
    out.col(1 + components + k) = s;
  }
  return out;
}

std::string eigen_overlay_csv(const Matrix& overlay) {
  const auto components = (overlay.cols() - 1) / 2;
  std::ostringstream out;
  out << 'i';
  for (Eigen::Index k = 1; k <= components; ++k) out << ",num_" << k;
  for (Eigen::Index k = 1; k <= components; ++k) out << ",sine_" << k;
  out << '\n';
  for (Eigen::Index i = 0; i < overlay.rows(); ++i) {
    out << format_double(overlay(i, 0));
    for (Eigen::Index c = 1; c < overlay.cols(); ++c) out << ',' << format_double(overlay(i, c));
    out << '\n';
  }
  return out.str();
}

}  // namespace hakernel
