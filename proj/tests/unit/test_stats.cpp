#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "smia/smia_zero.hpp"
#include "smia/stats.hpp"
#include "smia/synth.hpp"
#include "test_support.hpp"

using namespace smia;
using smia::testing::error_kind;
using smia::testing::random_matrix;

namespace {

// Plain double loop, divisor n.
MomentStats naive_moments(const FeatureMatrix& x) {
  const Index n = x.rows(), d = x.cols();
  MomentStats s;
  s.n = n;
  s.mu = Eigen::VectorXd::Zero(d);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) s.mu[j] += x(i, j);
  }
  s.mu /= double(n);
  s.sigma = Eigen::MatrixXd::Zero(d, d);
  for (Index a = 0; a < d; ++a) {
    for (Index b = 0; b < d; ++b) {
      double acc = 0.0;
      for (Index i = 0; i < n; ++i) acc += (x(i, a) - s.mu[a]) * (x(i, b) - s.mu[b]);
      s.sigma(a, b) = acc / double(n);
    }
  }
  return s;
}

}  // namespace

TEST_CASE("estimate_moments worked examples") {
  const auto single = estimate_moments(FeatureMatrix{{1.0, 1.0}});
  CHECK(single.mu == Eigen::Vector2d(1.0, 1.0));
  CHECK(single.sigma.isZero(0.0));

  const auto two = estimate_moments(FeatureMatrix{{0.0, 0.0}, {2.0, 0.0}});
  CHECK(two.mu == Eigen::Vector2d(1.0, 0.0));
  CHECK(two.sigma(0, 0) == doctest::Approx(1.0));
  CHECK(two.sigma(0, 1) == 0.0);
  CHECK(two.sigma(1, 1) == 0.0);
  CHECK(two.n == 2);
}

TEST_CASE("sample divisor uses n - 1") {
  const auto s = estimate_moments(FeatureMatrix{{0.0}, {2.0}}, CovarianceDivisor::Sample);
  CHECK(s.sigma(0, 0) == doctest::Approx(2.0));
  CHECK(error_kind([] { estimate_moments(FeatureMatrix{{1.0}}, CovarianceDivisor::Sample); }) ==
        ErrorKind::TooFewSamples);
}

TEST_CASE("estimate_moments agrees with a double-loop oracle") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = random_matrix(rng, 50, 4, 2.0, 0.5);
    const auto fast = estimate_moments(x);
    const auto slow = naive_moments(x);
    CHECK((fast.mu - slow.mu).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((fast.sigma - slow.sigma).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((fast.sigma - fast.sigma.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(fast.sigma.diagonal().minCoeff() >= -1e-12);
  }
}

TEST_CASE("estimate_moments is permutation invariant") {
  std::mt19937_64 rng(12);
  const auto x = random_matrix(rng, 40, 3);
  std::vector<Index> perm(40);
  std::iota(perm.begin(), perm.end(), Index{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  const auto a = estimate_moments(x);
  const auto b = estimate_moments(x.select_rows(perm));
  CHECK((a.mu - b.mu).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((a.sigma - b.sigma).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("pooling identity holds exactly for finite splits") {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<Index> size(1, 60);
  std::uniform_int_distribution<Index> dim(1, 5);
  for (int trial = 0; trial < 100; ++trial) {
    const Index d = dim(rng);
    const auto xa = random_matrix(rng, size(rng), d, 1.0, 0.0);
    const auto xb = random_matrix(rng, size(rng), d, 2.0, 1.5);
    const double alpha = double(xb.rows()) / double(xa.rows() + xb.rows());
    const auto pooled = estimate_moments(vstack(xa, xb));
    const auto mix = mixture_moments(alpha, estimate_moments(xa), estimate_moments(xb));
    CHECK((pooled.mu - mix.mu).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((pooled.sigma - mix.sigma).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("mean_gap_outer") {
  CHECK(mean_gap_outer(Eigen::Vector2d(1, 2), Eigen::Vector2d(1, 2)).isZero(0.0));
  CHECK(mean_gap_outer(Eigen::VectorXd::Constant(1, 2.0), Eigen::VectorXd::Zero(1))(0, 0) == 4.0);
  const auto g = mean_gap_outer(Eigen::Vector2d(1, 2), Eigen::Vector2d(0, 0));
  CHECK(g(0, 0) == 1.0);
  CHECK(g(0, 1) == 2.0);
  CHECK(g(1, 0) == 2.0);
  CHECK(g(1, 1) == 4.0);
  CHECK(error_kind([] { mean_gap_outer(Eigen::Vector2d(1, 2), Eigen::Vector3d(1, 2, 3)); }) ==
        ErrorKind::DimMismatch);
}

TEST_CASE("mean_gap_outer is symmetric PSD with rank at most one") {
  std::mt19937_64 rng(14);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd a(4), b(4);
    for (int i = 0; i < 4; ++i) {
      a[i] = normal(rng);
      b[i] = normal(rng);
    }
    const auto g = mean_gap_outer(a, b);
    CHECK((g - g.transpose()).cwiseAbs().maxCoeff() == 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g);
    const auto ev = eig.eigenvalues();
    CHECK(ev.minCoeff() >= -1e-12);
    // All but the largest eigenvalue vanish.
    CHECK(ev.head(3).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, ev[3]));
  }
}

TEST_CASE("filter_outliers") {
  MomentStats ref;
  ref.mu = Eigen::Vector2d::Zero();
  ref.sigma = Eigen::Matrix2d::Identity();
  ref.n = 1000;

  const FeatureMatrix calm{{0.1, -0.2}, {1.0, 2.0}, {-3.0, 0.0}};
  const auto unchanged = filter_outliers(calm, ref, 6.0);
  CHECK(unchanged.removed.empty());
  CHECK(unchanged.kept == calm);

  const FeatureMatrix spiked{{0.1, 0.2}, {1e9, 0.0}, {0.3, -0.4}};
  const auto filtered = filter_outliers(spiked, ref, 6.0);
  REQUIRE(filtered.removed.size() == 1);
  CHECK(filtered.removed[0] == 1);
  CHECK(filtered.kept == FeatureMatrix{{0.1, 0.2}, {0.3, -0.4}});

  // Filtering again with the same reference removes nothing.
  const auto again = filter_outliers(filtered.kept, ref, 6.0);
  CHECK(again.removed.empty());
  CHECK(again.kept == filtered.kept);

  CHECK(error_kind([&] { filter_outliers(FeatureMatrix{{1e9, 1e9}}, ref, 6.0); }) ==
        ErrorKind::AllRowsRemoved);
  CHECK(error_kind([&] { filter_outliers(calm, ref, 0.0); }) == ErrorKind::InvalidParam);
  MomentStats tiny = ref;
  tiny.n = 1;
  CHECK(error_kind([&] { filter_outliers(calm, tiny, 6.0); }) == ErrorKind::TooFewSamples);
}

TEST_CASE("filter_outliers keeps nearly all Gaussian rows") {
  const auto x = gen_gaussian({Eigen::Vector2d::Zero(), Eigen::Matrix2d::Identity(), 1000, 99});
  const auto result = filter_outliers(x, estimate_moments(x), 6.0);
  CHECK(double(result.removed.size()) / 1000.0 < 0.01);
}
