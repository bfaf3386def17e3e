#include <doctest.h>

#include <fstream>
#include <random>

#include "smia/error.hpp"
#include "smia/io.hpp"
#include "test_support.hpp"

using namespace smia;
using smia::testing::error_kind;
using smia::testing::TempDir;

namespace {

void write_raw(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

AuditReport sample_report() {
  AuditReport r;
  r.method = Method::SmiaM;
  r.alpha_p5 = 0.1;
  r.alpha_p50 = 0.3;
  r.alpha_p95 = 0.5;
  r.k_bootstrap = 200;
  r.seed = 18446744073709551615ULL;
  r.n_member = 10;
  r.n_nonmember = 11;
  r.n_audit = 12;
  r.kernel = KernelSpec::rbf(0.7071067811865476);
  r.diagnostics["failed_groups"] = 0;
  r.diagnostics["sigma"] = 1.0 / 3.0;
  return r;
}

}  // namespace

TEST_CASE("load parses header and rows") {
  TempDir dir("io");
  write_raw(dir / "m.csv", "f0,f1\n0,0\n2,0\n");
  const auto m = load_feature_matrix(dir / "m.csv");
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 2);
  CHECK(m(1, 0) == 2.0);
  CHECK(m(1, 1) == 0.0);
}

TEST_CASE("CRLF endings and no trailing newline are accepted") {
  const auto m = parse_feature_csv("f0,f1\r\n1.5,-2e-3\r\n3,4");
  CHECK(m.rows() == 2);
  CHECK(m(0, 1) == -2e-3);
  CHECK(m(1, 1) == 4.0);
}

TEST_CASE("load error paths") {
  TempDir dir("io");
  CHECK(error_kind([&] { load_feature_matrix(dir / "absent.csv"); }) == ErrorKind::MissingFile);

  write_raw(dir / "header_only.csv", "f0,f1\n");
  CHECK(error_kind([&] { load_feature_matrix(dir / "header_only.csv"); }) ==
        ErrorKind::EmptyMatrix);
  write_raw(dir / "empty.csv", "");
  CHECK(error_kind([&] { load_feature_matrix(dir / "empty.csv"); }) == ErrorKind::EmptyMatrix);

  write_raw(dir / "ragged.csv", "f0,f1\n1,2\n3\n");
  try {
    load_feature_matrix(dir / "ragged.csv");
    FAIL("ragged file accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::RaggedRow);
    CHECK(std::string(e.what()).find("data row 1") != std::string::npos);
  }
  write_raw(dir / "long.csv", "f0\n1,2\n");
  CHECK(error_kind([&] { load_feature_matrix(dir / "long.csv"); }) == ErrorKind::RaggedRow);

  write_raw(dir / "nan.csv", "f0,f1\n1,nan\n");
  CHECK(error_kind([&] { load_feature_matrix(dir / "nan.csv"); }) == ErrorKind::NonFiniteValue);
  write_raw(dir / "inf.csv", "f0\ninf\n");
  CHECK(error_kind([&] { load_feature_matrix(dir / "inf.csv"); }) == ErrorKind::NonFiniteValue);
  write_raw(dir / "comma_decimal.csv", "f0\n1;5\n");
  CHECK(error_kind([&] { load_feature_matrix(dir / "comma_decimal.csv"); }) ==
        ErrorKind::MalformedValue);
}

TEST_CASE("1x1 matrix serializes to the documented layout") {
  CHECK(format_feature_csv(FeatureMatrix{{1.0}}) == "f0\n1\n");
  CHECK(format_feature_csv(FeatureMatrix{{0.5, -2.0}}) == "f0,f1\n0.5,-2\n");
}

TEST_CASE("write/load round trip over random matrices") {
  TempDir dir("io");
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<Index> dim(1, 6);
  std::uniform_real_distribution<double> expo(-30.0, 30.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = dim(rng), d = dim(rng);
    Eigen::MatrixXd values(n, d);
    std::normal_distribution<double> normal;
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < d; ++j) values(i, j) = normal(rng) * std::pow(10.0, expo(rng));
    }
    const FeatureMatrix m(values);
    const auto path = dir / ("m" + std::to_string(trial) + ".csv");
    write_feature_matrix(m, path);
    const auto back = load_feature_matrix(path);
    REQUIRE(back.rows() == n);
    REQUIRE(back.cols() == d);
    // 17 significant digits make the round trip exact for binary64.
    CHECK((back.values() - values).cwiseAbs().maxCoeff() <= 1e-12 * values.cwiseAbs().maxCoeff());
    CHECK(back == m);
  }
}

TEST_CASE("write to an unwritable path fails") {
  TempDir dir("io");
  CHECK(error_kind([&] { write_feature_matrix(FeatureMatrix{{1.0}}, dir / "no/such/dir/m.csv"); }) ==
        ErrorKind::IoFailure);
}

TEST_CASE("report JSON has the documented keys in order") {
  const auto json = report_to_json(sample_report());
  const char* keys[] = {"\"method\"",      "\"alpha_p5\"", "\"alpha_p50\"",   "\"alpha_p95\"",
                        "\"k_bootstrap\"", "\"seed\"",     "\"n_member\"",    "\"n_nonmember\"",
                        "\"n_audit\"",     "\"kernel\"",   "\"epsilon\"",     "\"diagnostics\""};
  std::size_t last = 0;
  for (const char* key : keys) {
    const auto pos = json.find(key);
    REQUIRE_MESSAGE(pos != std::string::npos, key);
    CHECK(pos >= last);
    last = pos;
  }
  CHECK(json.find("\"alpha_p50\": 0.3") != std::string::npos);
  CHECK(json.find("\"method\": \"smia_m\"") != std::string::npos);
  CHECK(json.find("\"epsilon\": null") != std::string::npos);
  CHECK(json.find("\"family\": \"rbf\"") != std::string::npos);
}

TEST_CASE("report JSON round trip reproduces numbers exactly") {
  TempDir dir("io");
  auto r = sample_report();
  r.epsilon = 0.012345678901234567;
  write_report(r, dir / "r.json");
  const auto back = load_report(dir / "r.json");
  CHECK(back.method == r.method);
  CHECK(back.alpha_p5 == r.alpha_p5);
  CHECK(back.alpha_p50 == r.alpha_p50);
  CHECK(back.alpha_p95 == r.alpha_p95);
  CHECK(back.k_bootstrap == r.k_bootstrap);
  CHECK(back.seed == r.seed);
  CHECK(back.n_member == r.n_member);
  CHECK(back.n_nonmember == r.n_nonmember);
  CHECK(back.n_audit == r.n_audit);
  REQUIRE(back.kernel.has_value());
  CHECK(*back.kernel->sigma == *r.kernel->sigma);
  CHECK(*back.epsilon == *r.epsilon);
  CHECK(back.diagnostics == r.diagnostics);
  CHECK(report_to_json(back) == report_to_json(r));
}

TEST_CASE("reports violating alpha ordering are rejected before writing") {
  TempDir dir("io");
  auto r = sample_report();
  r.alpha_p5 = 0.6;
  CHECK(error_kind([&] { write_report(r, dir / "bad.json"); }) == ErrorKind::ValidationError);
  CHECK_FALSE(std::filesystem::exists(dir / "bad.json"));
  r = sample_report();
  r.alpha_p95 = 1.5;
  CHECK(error_kind([&] { report_to_json(r); }) == ErrorKind::ValidationError);
}
