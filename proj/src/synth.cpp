#include "smia/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "smia/error.hpp"
#include "smia/rng.hpp"

namespace smia {

namespace {

// Factor L with L L^T = sigma. Cholesky for the definite case, pivoted
// LDL^T for semidefinite covariances so rank-deficient inputs stay exact.
Eigen::MatrixXd covariance_factor(const Eigen::MatrixXd& sigma) {
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() == Eigen::Success) return llt.matrixL();

  Eigen::LDLT<Eigen::MatrixXd> ldlt(sigma);
  if (ldlt.info() != Eigen::Success) fail(ErrorKind::NotPSD, "covariance factorization failed");
  const Eigen::VectorXd d = ldlt.vectorD();
  if (d.minCoeff() < -1e-10) fail(ErrorKind::NotPSD, "covariance is not positive semidefinite");
  const Eigen::VectorXd root = d.cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd lower = Eigen::MatrixXd(ldlt.matrixL()) * root.asDiagonal();
  return ldlt.transpositionsP().transpose() * lower;
}

}  // namespace

FeatureMatrix gen_gaussian(const GaussianPopulationSpec& spec) {
  const Index d = spec.mu.size();
  if (d < 1) fail(ErrorKind::InvalidParam, "Gaussian mean must be nonempty");
  if (spec.sigma.rows() != d || spec.sigma.cols() != d) {
    fail(ErrorKind::DimMismatch, "covariance shape does not match the mean");
  }
  if (spec.n < 1) fail(ErrorKind::InvalidParam, "sample count must be positive");
  if ((spec.sigma - spec.sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    fail(ErrorKind::NotPSD, "covariance is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(spec.sigma, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10) {
    fail(ErrorKind::NotPSD, "covariance has a negative eigenvalue");
  }
  const Eigen::MatrixXd factor = covariance_factor(spec.sigma);

  RngStream stream(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd out(spec.n, d);
  Eigen::VectorXd z(d);
  for (Index i = 0; i < spec.n; ++i) {
    for (Index j = 0; j < d; ++j) z[j] = normal(stream);
    out.row(i) = (spec.mu + factor * z).transpose();
  }
  return FeatureMatrix(std::move(out));
}

MixtureDraw gen_mixture(const FeatureMatrix& pool_t, const FeatureMatrix& pool_v, double alpha,
                        Index n, std::uint64_t seed) {
  require_same_dim(pool_t, pool_v);
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    fail(ErrorKind::AlphaOutOfRange, "alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
  if (n < 1) fail(ErrorKind::InvalidParam, "mixture size must be positive");

  const auto n_v = static_cast<Index>(std::floor(alpha * double(n) + 0.5));
  const Index n_t = n - n_v;
  RngStream stream(seed);
  std::uniform_int_distribution<Index> pick_t(0, pool_t.rows() - 1);
  std::uniform_int_distribution<Index> pick_v(0, pool_v.rows() - 1);

  Eigen::MatrixXd rows(n, pool_t.cols());
  for (Index i = 0; i < n_t; ++i) rows.row(i) = pool_t.row(pick_t(stream));
  for (Index i = 0; i < n_v; ++i) rows.row(n_t + i) = pool_v.row(pick_v(stream));

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::shuffle(order.begin(), order.end(), stream);
  Eigen::MatrixXd shuffled(n, pool_t.cols());
  for (Index i = 0; i < n; ++i) shuffled.row(i) = rows.row(order[static_cast<std::size_t>(i)]);

  return {FeatureMatrix(std::move(shuffled)), n_t, n_v};
}

SyntheticAudit make_synthetic_audit(const SyntheticAuditConfig& cfg) {
  if (cfg.n < 1 || cfg.d < 1) fail(ErrorKind::InvalidParam, "n and d must be positive");
  if (!std::isfinite(cfg.sep)) fail(ErrorKind::InvalidParam, "separation must be finite");
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(cfg.d, cfg.d);
  const Eigen::VectorXd mu_t = Eigen::VectorXd::Zero(cfg.d);
  const Eigen::VectorXd mu_v = Eigen::VectorXd::Constant(cfg.d, cfg.sep);
  auto population = [&](const Eigen::VectorXd& mu, std::uint64_t stream) {
    return gen_gaussian({mu, identity, cfg.n, substream_seed(cfg.seed, stream)});
  };
  auto member = population(mu_t, 0);
  auto nonmember = population(mu_v, 1);
  // The audit set is drawn from fresh pools so it shares no rows with the
  // reference sets.
  const auto pool_t = population(mu_t, 2);
  const auto pool_v = population(mu_v, 3);
  auto audit = gen_mixture(pool_t, pool_v, cfg.alpha, cfg.n, substream_seed(cfg.seed, 4));
  return {std::move(member), std::move(nonmember), std::move(audit)};
}

}  // namespace smia
