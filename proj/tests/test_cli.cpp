#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "hakernel/cli.hpp"
#include "hakernel/data.hpp"
#include "hakernel/errors.hpp"

namespace fs = std::filesystem;
using hakernel::cli::run;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome call(std::vector<std::string> args) {
  args.insert(args.begin(), "hakernel");
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("hakernel_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// 2 features plus response, n rows on a loose grid with a smooth signal.
std::string training_csv(int n) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::ostringstream s;
  s << "a,b,y\n";
  for (int i = 0; i < n; ++i) {
    const double a = u(rng), b = u(rng);
    s << hakernel::format_double(a) << ',' << hakernel::format_double(b) << ','
      << hakernel::format_double(std::sin(3 * a) + a * b) << '\n';
  }
  return s.str();
}

std::vector<double> column(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  std::vector<double> v;
  while (std::getline(in, line)) v.push_back(std::stod(line));
  return v;
}

}  // namespace

TEST_CASE("list parsing") {
  CHECK(hakernel::cli::parse_int_list("1:5,10") == std::vector<long long>{1, 2, 3, 4, 5, 10});
  CHECK(hakernel::cli::parse_int_list("").empty());
  CHECK(hakernel::cli::parse_double_list("1e-4,0.5") == std::vector<double>{1e-4, 0.5});
  CHECK_THROWS_AS(hakernel::cli::parse_int_list("5:1"), hakernel::UsageError);
  CHECK_THROWS_AS(hakernel::cli::parse_int_list("x"), hakernel::UsageError);
  CHECK_THROWS_AS(hakernel::cli::parse_double_list("1,,2"), hakernel::UsageError);
}

TEST_CASE("thread resolution") {
  CHECK(hakernel::cli::resolve_threads(3) == 3);
  ::setenv("HAKERNEL_THREADS", "2", 1);
  CHECK(hakernel::cli::resolve_threads(0) == 2);
  ::unsetenv("HAKERNEL_THREADS");
  CHECK(hakernel::cli::resolve_threads(0) == 0);
}

TEST_CASE("exit codes") {
  const fs::path dir = scratch("codes");
  CHECK(call({}).code == 2);
  CHECK(call({"frobnicate"}).code == 2);
  CHECK(call({"fit"}).code == 2);
  CHECK(call({"fit", (dir / "missing.csv").string(), "-o", (dir / "m.bin").string()}).code == 2);

  spit(dir / "bad.csv", "a,y\n1,2\nfoo,3\n");
  const Outcome bad = call({"fit", (dir / "bad.csv").string(), "-o", (dir / "m.bin").string()});
  CHECK(bad.code == 3);
  CHECK(bad.err.find("foo") != std::string::npos);

  spit(dir / "train.csv", training_csv(30));
  CHECK(call({"fit", (dir / "train.csv").string(), "-o", (dir / "m.bin").string(), "--kind", "ols"}).code == 2);
  CHECK(call({"fit", (dir / "train.csv").string(), "-o", (dir / "m.bin").string(), "--m", "3"}).code == 2);
  CHECK(call({"simulate", "--experiment", "nope", "-o", dir.string()}).code == 2);

  spit(dir / "junk.bin", "HAKERNEL-MODEL\nversion 9\n");
  spit(dir / "new.csv", "a,b\n0.5,0.5\n");
  CHECK(call({"predict", (dir / "junk.bin").string(), (dir / "new.csv").string()}).code == 3);
}

TEST_CASE("fit, predict and report") {
  const fs::path dir = scratch("fit");
  spit(dir / "train.csv", training_csv(40));
  const std::string train = (dir / "train.csv").string();

  const Outcome fit = call({"fit", train, "-o", (dir / "m.bin").string(), "--m", "1", "--report",
                            (dir / "report.csv").string(), "--fitted", (dir / "fitted.csv").string(),
                            "--lambda-grid", "1e-6,1e-3,1e-1"});
  REQUIRE(fit.code == 0);
  CHECK(fit.out.rfind("selected m=1 ", 0) == 0);

  std::istringstream report(slurp(dir / "report.csv"));
  std::string line;
  std::getline(report, line);
  CHECK(line == "m,k,lambda,cv_risk,feasible");
  int rows = 0;
  while (std::getline(report, line)) {
    if (line.rfind("#", 0) == 0) continue;
    CHECK(line.rfind("1,", 0) == 0);
    ++rows;
  }
  CHECK(rows > 0);

  const std::string bytes = slurp(dir / "m.bin");
  REQUIRE(call({"fit", train, "-o", (dir / "m2.bin").string(), "--m", "1", "--lambda-grid", "1e-6,1e-3,1e-1"})
              .code == 0);
  CHECK(slurp(dir / "m2.bin") == bytes);

  const Outcome pred = call({"predict", (dir / "m.bin").string(), train, "-o", (dir / "pred.csv").string()});
  REQUIRE(pred.code == 0);
  const std::string pred_text = slurp(dir / "pred.csv");
  CHECK(pred_text.rfind("prediction\n", 0) == 0);
  const auto p = column(pred_text);
  const auto f = column(slurp(dir / "fitted.csv"));
  REQUIRE(p.size() == 40);
  REQUIRE(f.size() == 40);
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(std::abs(p[i] - f[i]) < 1e-8);

  spit(dir / "empty.csv", "a,b\n");
  const Outcome empty = call({"predict", (dir / "m.bin").string(), (dir / "empty.csv").string()});
  CHECK(empty.code == 0);
  CHECK(empty.out.empty());

  spit(dir / "far.csv", "a,b\n5,0.5\n0.5,0.5\n");
  const Outcome far = call({"predict", (dir / "m.bin").string(), (dir / "far.csv").string()});
  CHECK(far.code == 0);
  CHECK(far.err.find("warning: 1 row") != std::string::npos);
  CHECK(column(far.out).size() == 2);

  const Outcome tune = call({"tune", train, "--k-grid", "1:5", "--lambda-grid", "1e-3", "--seed", "4"});
  CHECK(tune.code == 0);
  CHECK(tune.out.find("folds=5 seed=4") != std::string::npos);
}

TEST_CASE("simulate writes its tables") {
  const fs::path dir = scratch("sim");
  const Outcome inter = call({"simulate", "--experiment", "interaction", "--reps", "1", "--ns", "30,40,50", "--n-test",
                              "100", "-o", dir.string()});
  REQUIRE(inter.code == 0);
  for (const char* name : {"interaction_oracle.csv", "interaction_cv.csv"}) {
    std::istringstream t(slurp(dir / name));
    std::string line;
    std::getline(t, line);
    CHECK(line == "n,m1,m2,m3");
    int rows = 0;
    while (std::getline(t, line)) {
      ++rows;
      std::istringstream fields(line);
      std::string cell;
      std::getline(fields, cell, ',');
      double total = 0.0;
      while (std::getline(fields, cell, ',')) {
        const double v = std::stod(cell);
        CHECK((v == 0.0 || v == 1.0));
        total += v;
      }
      CHECK(total == 1.0);
    }
    CHECK(rows == 3);
  }

  const Outcome mse = call({"simulate", "--experiment", "mse", "--reps", "1", "--dims", "1", "--ns", "30", "--n-test",
                            "50", "-o", dir.string()});
  REQUIRE(mse.code == 0);
  const std::string table = slurp(dir / "mse_table.csv");
  CHECK(table.rfind("n,method,d1\n", 0) == 0);
  CHECK(table.find("30,pchal,") != std::string::npos);
  CHECK(table.find("30,pchar,") != std::string::npos);

  CHECK(call({"simulate", "--figure", "eigen", "--figure-n", "30", "-o", dir.string()}).code == 0);
  CHECK(fs::exists(dir / "eigen_overlay.csv"));
}
