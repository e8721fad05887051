#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hakernel/data.hpp"
#include "hakernel/estimators.hpp"
#include "hakernel/tuning.hpp"

namespace hakernel {

/// d1..d10, interaction3, and the noiseless debug id "const".
struct DgpSpec {
  std::string id = "d1";
  Eigen::Index n_train = 200;
  Eigen::Index n_test = 2000;
  std::uint64_t seed = 0;
  double noise_scale = 1.0;  // multiplies the noise sd; 0 gives noiseless draws
};

/// Raw draws plus the scaler that maps them into [0,1]^d.
struct DgpDraw {
  Dataset train;
  Dataset test;
  Scaler scaler;
};

bool is_known_dgp(std::string_view id);
int dgp_dimension(std::string_view id);
/// Noiseless regression function at one raw covariate vector.
double dgp_signal(std::string_view id, const Eigen::Ref<const Vector>& x);
double dgp_noise_sd(std::string_view id, const Eigen::Ref<const Vector>& x);

DgpDraw gen_dgp(const DgpSpec& spec);

/// Streams drawn from one experiment seed.
enum class SeedRole : std::uint64_t { TrainX = 1, TrainNoise, TestX, TestNoise, Folds };

/// Counter-based child seed: splitmix64 over (seed, replicate, role).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t replicate, SeedRole role);

/// Selection counts over m = 1, 2, 3 per sample size.
struct SelectionTable {
  std::vector<Eigen::Index> ns;
  std::vector<std::array<int, 3>> counts;
  int reps = 0;

  double frequency(std::size_t row, int m) const;
  std::string to_csv() const;
};

struct InteractionConfig {
  std::vector<Eigen::Index> ns{100, 300, 800};
  int reps = 20;
  std::uint64_t seed = 2024;
  Eigen::Index n_test = 5000;
  EstimatorKind kind = EstimatorKind::Lasso;
  int V = 5;
  std::vector<Eigen::Index> k_candidates;  // empty: default_k_grid(n)
  std::vector<double> lambdas;             // empty: default_lambda_grid()
};

struct InteractionReplicate {
  Eigen::Index n = 0;
  int rep = 0;
  std::uint64_t seed = 0;
  int m_cv = 0;
  int m_oracle = 0;
  std::array<double, 3> cv_risk{};
  std::array<double, 3> test_risk{};
};

struct InteractionResult {
  SelectionTable oracle;
  SelectionTable cv;
  std::vector<InteractionReplicate> replicates;

  std::string replicates_csv() const;
};

/// Oracle m* minimizes the fresh-sample test risk over (k, lambda) for each m;
/// CV m-hat is the argmin of the profiled CV risk over m = 1, 2, 3.
InteractionResult run_interaction_experiment(const InteractionConfig& config);

struct MseConfig {
  std::vector<int> dims{1, 3};
  std::vector<Eigen::Index> ns{200};
  int reps = 5;
  std::uint64_t seed = 2024;
  Eigen::Index n_test = 2000;
  int V = 5;
  std::vector<EstimatorKind> kinds{EstimatorKind::Lasso, EstimatorKind::Ridge};
  std::string id_override;  // run this DGP id for every entry of dims (debug)
};

struct MseCell {
  EstimatorKind kind = EstimatorKind::Lasso;
  int d = 0;
  Eigen::Index n = 0;
  std::vector<double> replicate_mse;
  double mean_mse() const;
};

struct MseResult {
  std::vector<MseCell> cells;
  const MseCell& find(EstimatorKind kind, int d, Eigen::Index n) const;
  /// One row per (n, method), one column per dimension.
  std::string to_csv() const;
  std::string replicates_csv() const;
};

/// Test MSE of tuned PCHAL/PCHAR fits with interaction order m = d.
MseResult run_mse_benchmark(const MseConfig& config);

/// Numerical versus closed-form eigenvectors of the uncentered Gram of the
/// totally ordered sample x_i = i / (n + 1); columns i, then num_k and sine_k.
Matrix eigen_overlay(Eigen::Index n, int d, int components = 6);
std::string eigen_overlay_csv(const Matrix& overlay);

}  // namespace hakernel
