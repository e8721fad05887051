#include <doctest.h>

#include <filesystem>
#include <random>

#include "hakernel/errors.hpp"
#include "hakernel/model_io.hpp"
#include "oracles.hpp"

using namespace hakernel;

namespace {

FittedModel sample_model() {
  std::mt19937_64 rng(61);
  Dataset ds;
  ds.X = oracle::uniform(20, 2, rng);
  ds.y = ds.X.col(0) + ds.X.col(1).cwiseProduct(ds.X.col(0));
  ds.feature_names = {"alpha", "beta"};
  Scaler sc;
  sc.min = Vector::Constant(2, -3.0);
  sc.max = Vector::Constant(2, 7.5);
  return fit_model(ds, sc, 2, 6, 1e-4, EstimatorKind::Ridge);
}

}  // namespace

TEST_CASE("model round trip is exact") {
  const FittedModel m = sample_model();
  const std::string bytes = serialize_model(m);
  CHECK(bytes.rfind("HAKERNEL-MODEL\nversion 1\n", 0) == 0);
  const FittedModel back = deserialize_model(bytes);
  CHECK(back.kind == m.kind);
  CHECK(back.m == m.m);
  CHECK(back.k == m.k);
  CHECK(back.lambda == m.lambda);
  CHECK(back.y_mean == m.y_mean);
  CHECK(back.feature_names == m.feature_names);
  CHECK(back.X_train == m.X_train);
  CHECK(back.U_k == m.U_k);
  CHECK(back.beta == m.beta);
  CHECK(back.scaler.min == m.scaler.min);
  std::mt19937_64 rng(62);
  const Matrix X = oracle::uniform(9, 2, rng) * 10.0;
  CHECK(predict(back, X) == predict(m, X));
  CHECK(serialize_model(back) == bytes);

  const auto path = std::filesystem::temp_directory_path() / "hakernel_test_model.bin";
  save_model(m, path);
  CHECK(predict(load_model(path), X) == predict(m, X));
}

TEST_CASE("corrupted, truncated and foreign-version files are refused") {
  const std::string bytes = serialize_model(sample_model());
  std::string flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x01;
  CHECK_THROWS_AS(deserialize_model(flipped), DataError);
  CHECK_THROWS_AS(deserialize_model(bytes.substr(0, bytes.size() - 9)), DataError);
  CHECK_THROWS_AS(deserialize_model("hello"), DataError);

  std::string v2 = bytes;
  v2.replace(v2.find("version 1"), 9, "version 2");
  try {
    deserialize_model(v2);
    FAIL("version 2 accepted");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("version") != std::string::npos);
  }
  CHECK_THROWS_AS(load_model("/nonexistent/model.bin"), DataError);
}

TEST_CASE("fnv1a64 reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}
