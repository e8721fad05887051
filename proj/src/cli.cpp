#include "hakernel/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <omp.h>

#include "hakernel/data.hpp"
#include "hakernel/design.hpp"
#include "hakernel/errors.hpp"
#include "hakernel/estimators.hpp"
#include "hakernel/kernel.hpp"
#include "hakernel/model_io.hpp"
#include "hakernel/simd/active_count.hpp"
#include "hakernel/simulation.hpp"
#include "hakernel/spectral.hpp"
#include "hakernel/tuning.hpp"

namespace hakernel::cli {
namespace {

namespace fs = std::filesystem;

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cli: cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw DataError("cli: write to " + path.string() + " failed");
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cli: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

template <typename M>
std::string matrix_csv(const M& A, const std::string& prefix) {
  std::ostringstream out;
  for (Eigen::Index j = 0; j < A.cols(); ++j) out << (j ? "," : "") << prefix << j + 1;
  out << '\n';
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      if (j) out << ',';
      if constexpr (std::is_floating_point_v<typename M::Scalar>)
        out << format_double(A(i, j));
      else
        out << A(i, j);
    }
    out << '\n';
  }
  return out.str();
}

ColumnRef response_ref(const std::string& text) {
  if (text.empty()) return std::string();
  const bool numeric = std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; });
  if (numeric) return std::stoi(text);
  return text;
}

Dataset load_training(const std::string& path, const std::string& response) {
  std::vector<std::string> header;
  const std::string text = read_file(path);
  if (!response.empty()) return parse_csv(text, response_ref(response), path);
  // default: last column
  parse_csv_features(text.substr(0, text.find('\n')) + "\n", &header, path);
  return parse_csv(text, static_cast<int>(header.size()), path);
}

struct FitOptions {
  std::string train;
  std::string response;
  std::string kind = "pchal";
  int m = 0;
  int m_max = 0;
  int folds = 5;
  std::uint64_t seed = 1;
  std::string k_grid;
  std::string lambda_grid;
  std::string select_k_by = "train";
  bool no_stop = false;
  std::string output;
  std::string report;
  std::string fitted;
  std::string dump_gram;
  std::string dump_spectrum;
  std::string debug_design;
};

TuningGrid grid_from(const FitOptions& o) {
  TuningGrid grid;
  grid.kind = parse_kind(o.kind);
  grid.V = o.folds;
  grid.m_max = o.m_max;
  if (o.m > 0) grid.fixed_m = o.m;
  grid.stop_on_no_improvement = !o.no_stop;
  if (o.select_k_by == "train")
    grid.select_k_by = SelectKBy::TrainMse;
  else if (o.select_k_by == "cv")
    grid.select_k_by = SelectKBy::Cv;
  else
    throw UsageError("cli: --select-k-by must be 'train' or 'cv'");
  for (long long k : parse_int_list(o.k_grid)) grid.k_candidates.push_back(static_cast<Eigen::Index>(k));
  grid.lambdas = parse_double_list(o.lambda_grid);
  return grid;
}

int cmd_fit(const FitOptions& o, bool write_model, std::ostream& out, std::ostream& err) {
  const Dataset raw = load_training(o.train, o.response);
  const Scaler scaler = scale_fit(raw);
  const Dataset scaled = scale_apply(scaler, raw);
  const TuningGrid grid = grid_from(o);
  const TuningResult result = tune_and_fit(scaled, scaler, grid, o.seed);
  FittedModel model = result.model;
  model.feature_names = raw.feature_names;

  if (write_model) save_model(model, o.output);
  if (!o.report.empty()) write_file(o.report, result.report.to_csv());
  if (!o.fitted.empty()) {
    std::ostringstream f;
    f << "fitted\n";
    const Vector fitted = model.fitted_values();
    for (Eigen::Index i = 0; i < fitted.size(); ++i) f << format_double(fitted(i)) << '\n';
    write_file(o.fitted, f.str());
  }
  if (!o.dump_gram.empty()) write_file(o.dump_gram, matrix_csv(gram_exact(scaled.X, model.m), "k"));
  if (!o.dump_spectrum.empty()) {
    const SpectralFit fit = spectral_fit(scaled.X, model.m);
    std::ostringstream s;
    s << "j,eigenvalue\n";
    for (Eigen::Index j = 0; j < fit.spectrum.r; ++j) s << j + 1 << ',' << format_double(fit.spectrum.D(j)) << '\n';
    write_file(o.dump_spectrum, s.str());
  }
  if (!o.debug_design.empty()) {
    const DesignMatrix H = build_design(scaled.X, scaled.X, model.m);
    write_file(o.debug_design, matrix_csv(H.H, "h"));
  }
  out << result.report.summary() << '\n';
  (void)err;
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& input, const std::string& output,
                std::ostream& out, std::ostream& err) {
  const FittedModel model = load_model(model_path);
  std::vector<std::string> header;
  const Matrix table = parse_csv_features(read_file(input), &header, input);

  Matrix X(table.rows(), model.d());
  bool by_name = !model.feature_names.empty();
  std::vector<Eigen::Index> cols;
  for (const auto& name : model.feature_names) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      by_name = false;
      break;
    }
    cols.push_back(it - header.begin());
  }
  if (by_name) {
    for (Eigen::Index j = 0; j < model.d(); ++j) X.col(j) = table.col(cols[static_cast<std::size_t>(j)]);
  } else if (table.cols() == model.d()) {
    X = table;
  } else {
    throw DataError("cli: " + input + " has " + std::to_string(table.cols()) + " columns; model expects " +
                    std::to_string(model.d()) + " features");
  }

  std::ostringstream preds;
  if (X.rows() > 0) {
    std::size_t clamped = 0;
    const Vector y = predict(model, X, &clamped);
    if (clamped > 0) err << "warning: " << clamped << " row(s) had features outside the training range; clamped\n";
    preds << "prediction\n";
    for (Eigen::Index i = 0; i < y.size(); ++i) preds << format_double(y(i)) << '\n';
  }
  if (output.empty() || output == "-")
    out << preds.str();
  else
    write_file(output, preds.str());
  return 0;
}

struct SimulateOptions {
  std::string experiment;
  int reps = 0;
  std::uint64_t seed = 2024;
  std::string output = "sim_out";
  std::string ns;
  std::string dims;
  std::string kind;
  long long n_test = 0;
  bool full_grid = false;
  std::string figure;
  long long figure_n = 100;
  int figure_d = 1;
};

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
  const fs::path dir = o.output;
  bool did_something = false;
  if (o.experiment == "interaction") {
    InteractionConfig cfg;
    cfg.seed = o.seed;
    if (o.reps > 0) cfg.reps = o.reps;
    if (!o.ns.empty()) {
      cfg.ns.clear();
      for (auto n : parse_int_list(o.ns)) cfg.ns.push_back(static_cast<Eigen::Index>(n));
    }
    if (o.n_test > 0) cfg.n_test = static_cast<Eigen::Index>(o.n_test);
    if (!o.kind.empty()) cfg.kind = parse_kind(o.kind);
    const InteractionResult r = run_interaction_experiment(cfg);
    write_file(dir / "interaction_oracle.csv", r.oracle.to_csv());
    write_file(dir / "interaction_cv.csv", r.cv.to_csv());
    write_file(dir / "interaction_replicates.csv", r.replicates_csv());
    out << "oracle selection frequencies\n" << r.oracle.to_csv() << "cv selection frequencies\n" << r.cv.to_csv();
    did_something = true;
  } else if (o.experiment == "mse") {
    MseConfig cfg;
    cfg.seed = o.seed;
    if (o.full_grid) {
      cfg.dims = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
      cfg.ns = {200, 400, 600};
    }
    if (o.reps > 0) cfg.reps = o.reps;
    if (!o.dims.empty()) {
      cfg.dims.clear();
      for (auto d : parse_int_list(o.dims)) cfg.dims.push_back(static_cast<int>(d));
    }
    if (!o.ns.empty()) {
      cfg.ns.clear();
      for (auto n : parse_int_list(o.ns)) cfg.ns.push_back(static_cast<Eigen::Index>(n));
    }
    if (o.n_test > 0) cfg.n_test = static_cast<Eigen::Index>(o.n_test);
    if (!o.kind.empty()) cfg.kinds = {parse_kind(o.kind)};
    const MseResult r = run_mse_benchmark(cfg);
    write_file(dir / "mse_table.csv", r.to_csv());
    write_file(dir / "mse_replicates.csv", r.replicates_csv());
    out << r.to_csv();
    did_something = true;
  } else if (!o.experiment.empty()) {
    throw UsageError("cli: --experiment must be 'interaction' or 'mse'");
  }
  if (o.figure == "eigen") {
    const Matrix overlay = eigen_overlay(static_cast<Eigen::Index>(o.figure_n), o.figure_d);
    write_file(dir / "eigen_overlay.csv", eigen_overlay_csv(overlay));
    out << "wrote " << (dir / "eigen_overlay.csv").string() << '\n';
    did_something = true;
  } else if (!o.figure.empty()) {
    throw UsageError("cli: --figure must be 'eigen'");
  }
  if (!did_something) throw UsageError("cli: simulate needs --experiment and/or --figure");
  return 0;
}

struct BenchOptions {
  long long n = 400;
  int d = 3;
  int m = 0;
};

int cmd_bench(const BenchOptions& o, std::ostream& out) {
  if (o.n < 2 || o.d < 1) throw UsageError("cli: bench needs n >= 2 and d >= 1");
  const int m = o.m > 0 ? o.m : o.d;
  Matrix X(static_cast<Eigen::Index>(o.n), o.d);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = unif(rng);

  using Clock = std::chrono::steady_clock;
  auto seconds = [](Clock::time_point a) { return std::chrono::duration<double>(Clock::now() - a).count(); };

  out << "n=" << o.n << " d=" << o.d << " m=" << m << " threads=" << omp_get_max_threads() << '\n';
  const simd::Isa before = simd::active_isa();
  IntMatrix reference;
  for (auto isa : {simd::Isa::Scalar, simd::Isa::Avx2, simd::Isa::Neon}) {
    if (!simd::isa_available(isa)) continue;
    simd::set_active_isa(isa);
    const auto t0 = Clock::now();
    const IntMatrix K = gram_exact(X, m, Schedule::Blocked);
    out << "gram blocked/" << simd::isa_name(isa) << ": " << seconds(t0) << " s\n";
    if (reference.size() == 0)
      reference = K;
    else if (K != reference)
      throw NumericError("cli: bench found differing Gram matrices across ISAs");
  }
  simd::set_active_isa(before);
  if (o.n <= 800) {
    const auto t0 = Clock::now();
    const IntMatrix K = gram_exact(X, m, Schedule::Reference);
    out << "gram reference: " << seconds(t0) << " s\n";
    if (K != reference) throw NumericError("cli: bench found reference and blocked Grams differ");
  }
  const auto t1 = Clock::now();
  const GramSpectrum s = eig_sym(make_gram(reference, true));
  out << "eig_sym: " << seconds(t1) << " s (rank " << s.r << ")\n";
  return 0;
}

}  // namespace

std::vector<long long> parse_int_list(const std::string& text) {
  std::vector<long long> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw UsageError("cli: empty item in integer list '" + text + "'");
    try {
      const auto colon = item.find(':');
      if (colon == std::string::npos) {
        values.push_back(std::stoll(item));
      } else {
        const long long lo = std::stoll(item.substr(0, colon));
        const long long hi = std::stoll(item.substr(colon + 1));
        if (hi < lo) throw UsageError("cli: empty range '" + item + "'");
        for (long long v = lo; v <= hi; ++v) values.push_back(v);
      }
    } catch (const std::logic_error&) {
      throw UsageError("cli: cannot parse integer list item '" + item + "'");
    }
  }
  return values;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw UsageError("cli: empty item in number list '" + text + "'");
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw UsageError("cli: cannot parse number '" + item + "'");
    }
  }
  return values;
}

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("HAKERNEL_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 0;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Principal-component highly adaptive lasso / ridge regression"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: HAKERNEL_THREADS, else all cores)");

  FitOptions fit;
  auto add_fit_flags = [&fit](CLI::App* c) {
    c->add_option("train", fit.train, "Training CSV")->required()->check(CLI::ExistingFile);
    c->add_option("--response", fit.response, "Response column name or 1-based index (default: last)");
    c->add_option("--kind", fit.kind, "pchal or pchar");
    c->add_option("--m", fit.m, "Fix the interaction order instead of profiling");
    c->add_option("--m-max", fit.m_max, "Largest interaction order to profile (default d)");
    c->add_option("--folds", fit.folds, "Cross-validation folds");
    c->add_option("--seed", fit.seed, "Fold assignment seed");
    c->add_option("--k-grid", fit.k_grid, "Candidate ranks, e.g. 1:20,40");
    c->add_option("--lambda-grid", fit.lambda_grid, "Candidate penalties, e.g. 1e-4,1e-3");
    c->add_option("--select-k-by", fit.select_k_by, "train (default) or cv");
    c->add_flag("--no-stop", fit.no_stop, "Profile every m up to m-max, ignoring the stopping rule");
    c->add_option("--report", fit.report, "Write the CV table CSV here");
    c->add_option("--fitted", fit.fitted, "Write in-sample fitted values here");
    c->add_option("--dump-gram", fit.dump_gram, "Write the uncentered training Gram (selected m) as CSV");
    c->add_option("--dump-spectrum", fit.dump_spectrum, "Write the centered Gram eigenvalues as CSV");
    c->add_option("--debug-design", fit.debug_design, "Write the explicit design matrix (small n only)");
  };
  auto* fit_cmd = app.add_subcommand("fit", "Tune (m, k, lambda) by cross-validation and save a model");
  add_fit_flags(fit_cmd);
  fit_cmd->add_option("-o,--output", fit.output, "Model file")->required();

  auto* tune_cmd = app.add_subcommand("tune", "Run the cross-validation search and report it, without saving");
  add_fit_flags(tune_cmd);

  std::string model_path, input, pred_out;
  auto* predict_cmd = app.add_subcommand("predict", "Predict new rows with a saved model");
  predict_cmd->add_option("model", model_path, "Model file")->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("input", input, "CSV of new covariates")->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("-o,--output", pred_out, "Predictions CSV (default stdout)");

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run the simulation experiments");
  sim_cmd->add_option("--experiment", sim.experiment, "interaction or mse");
  sim_cmd->add_option("--reps", sim.reps, "Replicates (default 20 for interaction, 5 for mse)");
  sim_cmd->add_option("--seed", sim.seed, "Experiment seed");
  sim_cmd->add_option("-o,--output", sim.output, "Output directory");
  sim_cmd->add_option("--ns", sim.ns, "Training sample sizes");
  sim_cmd->add_option("--dims", sim.dims, "DGP dimensions for mse (1..10)");
  sim_cmd->add_option("--kind", sim.kind, "Restrict to pchal or pchar");
  sim_cmd->add_option("--n-test", sim.n_test, "Test sample size");
  sim_cmd->add_flag("--full-grid", sim.full_grid, "mse over d = 1..10 and n = 200, 400, 600");
  sim_cmd->add_option("--figure", sim.figure, "eigen: eigenvector overlay data");
  sim_cmd->add_option("--figure-n", sim.figure_n, "Sample size for the overlay");
  sim_cmd->add_option("--figure-d", sim.figure_d, "Dimension for the overlay");

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Time Gram assembly per SIMD variant and the eigensolver");
  bench_cmd->add_option("--n", bench.n, "Sample size");
  bench_cmd->add_option("--d", bench.d, "Dimension");
  bench_cmd->add_option("--m", bench.m, "Interaction order (default d)");

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }

  try {
    const int t = resolve_threads(threads);
    if (t > 0) omp_set_num_threads(t);
    if (fit_cmd->parsed()) return cmd_fit(fit, true, out, err);
    if (tune_cmd->parsed()) {
      cmd_fit(fit, false, out, err);
      return 0;
    }
    if (predict_cmd->parsed()) return cmd_predict(model_path, input, pred_out, out, err);
    if (sim_cmd->parsed()) return cmd_simulate(sim, out);
    if (bench_cmd->parsed()) return cmd_bench(bench, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}

}  // namespace hakernel::cli
