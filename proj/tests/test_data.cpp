#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "hakernel/data.hpp"
#include "hakernel/errors.hpp"
#include "oracles.hpp"

using namespace hakernel;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("hakernel_test_" + name);
  std::ofstream(path) << text;
  return path;
}

std::string error_of(const std::string& text, const ColumnRef& ref) {
  try {
    parse_csv(text, ref);
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("load_csv reads a small table and splits off the response") {
  const auto path = write_temp("abc.csv", "a,b,y\n1,2,3\n4,5,6\n7,8,9\n");
  const Dataset ds = load_csv(path, std::string("y"));
  CHECK(ds.n() == 3);
  CHECK(ds.d() == 2);
  CHECK(ds.X(1, 0) == 4.0);
  CHECK(ds.X(2, 1) == 8.0);
  CHECK(ds.y(2) == 9.0);
  CHECK(ds.feature_names == std::vector<std::string>{"a", "b"});

  const Dataset by_index = load_csv(path, 3);
  CHECK(by_index.X == ds.X);
  CHECK(by_index.y == ds.y);
}

TEST_CASE("response column may sit anywhere") {
  const Dataset ds = parse_csv("y,a,b\n1,2,3\n", std::string("y"));
  CHECK(ds.y(0) == 1.0);
  CHECK(ds.X(0, 0) == 2.0);
  CHECK(ds.X(0, 1) == 3.0);
}

TEST_CASE("csv errors name the offending row and column") {
  const std::string missing = error_of("a,b,y\n1,2,3\n4,,6\n", std::string("y"));
  CHECK(missing.find("row 2") != std::string::npos);
  CHECK(missing.find("'b'") != std::string::npos);

  const std::string bad = error_of("a,b,y\n1,2,3\n4,5,6\nx7,8,9\n", std::string("y"));
  CHECK(bad.find("row 3") != std::string::npos);
  CHECK(bad.find("'a'") != std::string::npos);

  CHECK_THROWS_AS(parse_csv("a,b,y\n", std::string("y")), DataError);
  CHECK_THROWS_AS(parse_csv("a,b,y\n1,2,3\n", std::string("z")), DataError);
  CHECK_THROWS_AS(parse_csv("a,b,y\n1,2,3\n", 4), DataError);
  CHECK_THROWS_AS(load_csv("/nonexistent/file.csv", std::string("y")), DataError);
}

TEST_CASE("min-max scaling") {
  Dataset ds;
  ds.X.resize(3, 2);
  ds.X << 2, 5, 4, 5, 6, 5;
  ds.y = Vector::Zero(3);
  const Scaler s = scale_fit(ds);
  const Dataset scaled = scale_apply(s, ds);
  CHECK(scaled.X(0, 0) == 0.0);
  CHECK(scaled.X(1, 0) == 0.5);
  CHECK(scaled.X(2, 0) == 1.0);
  CHECK(scaled.X.col(1).isZero());

  Matrix test(2, 2);
  test << 8, 5, 3, 5;
  std::size_t clamped = 0;
  const Matrix t = scale_apply(s, test, &clamped);
  CHECK(t(0, 0) == 1.0);
  CHECK(t(1, 0) == doctest::Approx(0.25));
  CHECK(clamped == 1);

  Matrix wrong(1, 3);
  wrong.setZero();
  CHECK_THROWS_AS(scale_apply(s, wrong), DataError);
}

TEST_CASE("scaling round trip on random data") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Dataset ds;
    ds.X = oracle::uniform(15, 4, rng) * 37.0;
    ds.X.array() -= 5.0;
    ds.y = Vector::Zero(15);
    const Scaler s = scale_fit(ds);
    const Dataset scaled = scale_apply(s, ds);
    for (Eigen::Index j = 0; j < 4; ++j) {
      CHECK(scaled.X.col(j).minCoeff() == 0.0);
      CHECK(scaled.X.col(j).maxCoeff() == 1.0);
    }
    const Matrix back = s.invert(scaled.X);
    CHECK((back - ds.X).cwiseAbs().maxCoeff() <= 1e-12 * ds.X.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("make_folds sizes and determinism") {
  const FoldAssignment f10 = make_folds(10, 5, 3);
  std::vector<int> sizes(5, 0);
  for (int v : f10.fold_of) ++sizes[static_cast<std::size_t>(v - 1)];
  CHECK(sizes == std::vector<int>{2, 2, 2, 2, 2});

  const FoldAssignment f7 = make_folds(7, 3, 3);
  std::multiset<Eigen::Index> s7;
  for (int v = 1; v <= 3; ++v) s7.insert(static_cast<Eigen::Index>(f7.test_rows(v).size()));
  CHECK(s7 == std::multiset<Eigen::Index>{2, 2, 3});

  CHECK(make_folds(50, 5, 99).fold_of == make_folds(50, 5, 99).fold_of);
  CHECK(make_folds(50, 5, 99).fold_of != make_folds(50, 5, 100).fold_of);

  CHECK_THROWS_AS(make_folds(4, 5, 1), UsageError);
  CHECK_THROWS_AS(make_folds(4, 1, 1), UsageError);
}

TEST_CASE("folds partition the rows") {
  for (Eigen::Index n : {2, 9, 31, 100}) {
    for (int V : {2, 3, 5}) {
      if (V > n) continue;
      const FoldAssignment f = make_folds(n, V, static_cast<std::uint64_t>(n * 7 + V));
      std::vector<int> seen(static_cast<std::size_t>(n), 0);
      std::size_t lo = static_cast<std::size_t>(n), hi = 0;
      for (int v = 1; v <= V; ++v) {
        const auto rows = f.test_rows(v);
        lo = std::min(lo, rows.size());
        hi = std::max(hi, rows.size());
        for (auto i : rows) ++seen[static_cast<std::size_t>(i)];
        CHECK(f.train_rows(v).size() + rows.size() == static_cast<std::size_t>(n));
      }
      CHECK(lo >= 1);
      CHECK(hi - lo <= 1);
      CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
    }
  }
}

TEST_CASE("format_double round-trips") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng) / 3.0;
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.5) == "0.5");
}
