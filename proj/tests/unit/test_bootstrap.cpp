#include <doctest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "smia/bootstrap.hpp"
#include "smia/smia_zero.hpp"
#include "smia/synth.hpp"
#include "test_support.hpp"

using namespace smia;
using smia::testing::error_kind;
using smia::testing::random_matrix;

namespace {

FeatureMatrix indexed_rows(Index n) {
  Eigen::MatrixXd m(n, 1);
  for (Index i = 0; i < n; ++i) m(i, 0) = double(i);
  return FeatureMatrix(m);
}

}  // namespace

TEST_CASE("bootstrap resampling") {
  RngStream s1(7);
  const FeatureMatrix one{{1.5, -2.0}};
  const auto copies = bootstrap_resample(one, 3, s1);
  CHECK(copies.rows() == 3);
  for (Index i = 0; i < 3; ++i) CHECK(copies.row(i) == one.row(0));

  const auto x = indexed_rows(10);
  RngStream a = make_stream(5, 1), b = make_stream(5, 1);
  CHECK(bootstrap_resample(x, 50, a) == bootstrap_resample(x, 50, b));

  // Indices and rows consume the stream identically.
  RngStream c = make_stream(5, 2), d = make_stream(5, 2);
  const auto idx = bootstrap_indices(10, 20, c);
  const auto rows = bootstrap_resample(x, 20, d);
  for (std::size_t i = 0; i < idx.size(); ++i) CHECK(rows.values()(Index(i), 0) == double(idx[i]));

  RngStream e = make_stream(9, 0);
  const auto many = bootstrap_resample(x, 10000, e);
  std::map<double, int> freq;
  for (Index i = 0; i < many.rows(); ++i) ++freq[many.values()(i, 0)];
  CHECK(freq.size() == 10);
  for (const auto& [value, count] : freq) {
    CHECK(count >= 700);
    CHECK(count <= 1300);
  }
  CHECK(error_kind([] {
          RngStream s(1);
          bootstrap_indices(0, 3, s);
        }) == ErrorKind::EmptyMatrix);
}

TEST_CASE("substreams depend only on master seed and index") {
  CHECK(substream_seed(42, 3) == substream_seed(42, 3));
  CHECK(substream_seed(42, 3) != substream_seed(42, 4));
  CHECK(substream_seed(42, 3) != substream_seed(43, 3));
  BootstrapConfig cfg;
  const auto g7 = draw_group(30, 20, 10, cfg, 7);
  draw_group(30, 20, 10, cfg, 6);
  CHECK(draw_group(30, 20, 10, cfg, 7).f == g7.f);
  CHECK(g7.t.size() == 30);
  CHECK(g7.v.size() == 20);
  CHECK(g7.f.size() == 10);
  cfg.resample_fraction = 0.5;
  CHECK(draw_group(31, 20, 1, cfg, 0).t.size() == 16);  // 15.5 rounds up
  CHECK(draw_group(31, 20, 1, cfg, 0).f.size() == 1);
}

TEST_CASE("nearest-rank percentiles") {
  const std::vector<double> flat(17, 0.3);
  const auto s = percentile_summary(flat);
  CHECK(s.p5 == 0.3);
  CHECK(s.p50 == 0.3);
  CHECK(s.p95 == 0.3);

  std::vector<double> twenty;
  for (int i = 20; i >= 1; --i) twenty.push_back(0.01 * i);
  const auto t = percentile_summary(twenty);
  CHECK(t.p5 == 0.01 * 1);
  CHECK(t.p50 == 0.01 * 10);
  CHECK(t.p95 == 0.01 * 19);

  const std::vector<double> single{0.77};
  CHECK(percentile_summary(single).p5 == 0.77);
  CHECK(percentile_summary(single).p95 == 0.77);
  CHECK(error_kind([] { percentile_summary(std::vector<double>{}); }) == ErrorKind::EmptyList);

  // Independent restatement: smallest value with at least q of the mass at
  // or below it.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit;
  for (int k = 1; k <= 250; ++k) {
    std::vector<double> xs(static_cast<std::size_t>(k));
    for (auto& x : xs) x = unit(rng);
    const auto got = percentile_summary(xs);
    std::sort(xs.begin(), xs.end());
    auto oracle = [&](double q) {
      for (std::size_t i = 0; i < xs.size(); ++i) {
        if (double(i + 1) >= q * double(k) - 1e-9) return xs[i];
      }
      return xs.back();
    };
    CHECK(got.p5 == oracle(0.05));
    CHECK(got.p50 == oracle(0.50));
    CHECK(got.p95 == oracle(0.95));
    CHECK(got.p5 <= got.p50);
    CHECK(got.p50 <= got.p95);
  }
}

TEST_CASE("constant estimator") {
  std::mt19937_64 rng(4);
  const auto x = random_matrix(rng, 12, 2);
  BootstrapConfig cfg;
  cfg.k = 37;
  const auto r = run_bootstrap_audit(
      Method::Smia0, [](const auto&, const auto&, const auto&) { return 0.42; }, x, x, x, cfg);
  CHECK(r.alpha_p5 == 0.42);
  CHECK(r.alpha_p50 == 0.42);
  CHECK(r.alpha_p95 == 0.42);
  CHECK(r.k_bootstrap == 37);
  CHECK(r.seed == 42);
  CHECK(r.n_member == 12);
  CHECK(r.diagnostics.at("failed_groups") == 0.0);
}

TEST_CASE("degenerate groups are excluded up to the cap") {
  std::mt19937_64 rng(5);
  const auto x = random_matrix(rng, 8, 2);
  BootstrapConfig cfg;
  cfg.k = 50;
  // Exactly 10 of 50 groups (20%) failing is tolerated, 11 is not.
  std::vector<GroupDraw> reference;
  for (std::uint64_t g = 0; g < cfg.k; ++g) reference.push_back(draw_group(8, 8, 8, cfg, g));
  auto estimator_failing = [&](std::size_t n_fail) {
    return [&, n_fail](std::span<const GroupDraw> draws) {
      std::vector<std::optional<double>> out;
      for (const auto& d : draws) {
        std::size_t g = 0;
        while (reference[g].t != d.t || reference[g].f != d.f) ++g;
        if (g < n_fail) {
          out.push_back(std::nullopt);
        } else {
          out.push_back(0.01 * double(g));
        }
      }
      return out;
    };
  };
  const auto ok = run_bootstrap_batched(estimator_failing(10), 8, 8, 8, cfg, 16);
  CHECK(ok.failed_groups.size() == 10);
  CHECK(ok.alphas.size() == 40);
  CHECK(ok.alphas.front() == 0.01 * 10);
  const auto report = summarize_bootstrap(Method::SmiaM, ok, 8, 8, 8, cfg);
  CHECK(report.diagnostics.at("failed_groups") == 10.0);

  const auto too_many = run_bootstrap_batched(estimator_failing(11), 8, 8, 8, cfg, 16);
  CHECK(error_kind([&] { summarize_bootstrap(Method::SmiaM, too_many, 8, 8, 8, cfg); }) ==
        ErrorKind::TooManyFailedGroups);

  // The closure path records thrown degeneracy the same way.
  const auto thrown = run_bootstrap(
      [](const FeatureMatrix&, const FeatureMatrix&, const FeatureMatrix&) -> double {
        fail(ErrorKind::DegenerateEmbeddings, "forced");
      },
      x, x, x, cfg);
  CHECK(thrown.failed_groups.size() == 50);
  CHECK(error_kind([&] {
          run_bootstrap_audit(
              Method::SmiaM,
              [](const FeatureMatrix&, const FeatureMatrix&, const FeatureMatrix&) -> double {
                fail(ErrorKind::DegeneratePopulations, "forced");
              },
              x, x, x, cfg);
        }) == ErrorKind::TooManyFailedGroups);

  // Other errors are not swallowed.
  CHECK(error_kind([&] {
          run_bootstrap(
              [](const FeatureMatrix&, const FeatureMatrix&, const FeatureMatrix&) -> double {
                fail(ErrorKind::InvalidParam, "boom");
              },
              x, x, x, cfg);
        }) == ErrorKind::InvalidParam);
}

TEST_CASE("results do not depend on thread count or chunking") {
  const auto data = make_synthetic_audit({0.3, 200, 2, 3.0, 11});
  auto estimator = [](const FeatureMatrix& t, const FeatureMatrix& v, const FeatureMatrix& f) {
    return smia0_point_estimate(t, v, f);
  };
  BootstrapConfig cfg;
  cfg.k = 40;
  const auto serial =
      run_bootstrap(estimator, data.member, data.nonmember, data.audit.x_f, cfg);
  for (unsigned threads : {2u, 4u, 8u}) {
    cfg.threads = threads;
    const auto parallel =
        run_bootstrap(estimator, data.member, data.nonmember, data.audit.x_f, cfg);
    CHECK(parallel.alphas == serial.alphas);
  }

  auto batch = [&](std::span<const GroupDraw> draws) {
    std::vector<std::optional<double>> out;
    for (const auto& d : draws) {
      out.push_back(estimator(data.member.select_rows(d.t), data.nonmember.select_rows(d.v),
                              data.audit.x_f.select_rows(d.f)));
    }
    return out;
  };
  for (std::size_t chunk : {1, 7, 16, 64}) {
    cfg.threads = 3;
    const auto batched = run_bootstrap_batched(batch, 200, 200, 200, cfg, chunk);
    CHECK(batched.alphas == serial.alphas);
  }
}

TEST_CASE("SMIA-0 bootstrap on a known mixture") {
  const auto data = make_synthetic_audit({0.3, 1000, 2, 3.0, 12});
  BootstrapConfig cfg;
  cfg.threads = 4;
  const auto r = run_bootstrap_audit(
      Method::Smia0,
      [](const FeatureMatrix& t, const FeatureMatrix& v, const FeatureMatrix& f) {
        return smia0_point_estimate(t, v, f);
      },
      data.member, data.nonmember, data.audit.x_f, cfg);
  CHECK(r.k_bootstrap == 200);
  CHECK(r.alpha_p50 >= 0.25);
  CHECK(r.alpha_p50 <= 0.35);
  CHECK(r.alpha_p5 <= r.alpha_p50);
  CHECK(r.alpha_p50 <= r.alpha_p95);
  CHECK(r.alpha_p5 <= 0.3);
  CHECK(r.alpha_p95 >= 0.3);
}

TEST_CASE("configuration validation") {
  std::mt19937_64 rng(6);
  const auto x = random_matrix(rng, 4, 2);
  auto constant = [](const FeatureMatrix&, const FeatureMatrix&, const FeatureMatrix&) {
    return 0.1;
  };
  BootstrapConfig cfg;
  cfg.k = 0;
  CHECK(error_kind([&] { run_bootstrap(constant, x, x, x, cfg); }) == ErrorKind::InvalidParam);
  cfg = {};
  cfg.resample_fraction = 0.0;
  CHECK(error_kind([&] { run_bootstrap(constant, x, x, x, cfg); }) == ErrorKind::InvalidParam);
  cfg.resample_fraction = 1.5;
  CHECK(error_kind([&] { run_bootstrap(constant, x, x, x, cfg); }) == ErrorKind::InvalidParam);
  cfg = {};
  CHECK(error_kind([&] { run_bootstrap_audit(Method::Smia0, constant, x, FeatureMatrix{{1.0}}, x, cfg); }) ==
        ErrorKind::DimMismatch);
}
