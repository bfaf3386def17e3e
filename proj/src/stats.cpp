#include "smia/stats.hpp"

#include <cmath>
#include <string>

#include "smia/error.hpp"

namespace smia {

MomentStats estimate_moments(const FeatureMatrix& x, CovarianceDivisor divisor) {
  const Index n = x.rows();
  if (divisor == CovarianceDivisor::Sample && n < 2) {
    fail(ErrorKind::TooFewSamples, "sample covariance needs at least two rows");
  }
  MomentStats s;
  s.n = n;
  s.mu = x.values().colwise().mean().transpose();
  const Eigen::MatrixXd centered = x.values().rowwise() - s.mu.transpose();
  const double denom =
      divisor == CovarianceDivisor::Population ? double(n) : double(n - 1);
  Eigen::MatrixXd cov = (centered.transpose() * centered) / denom;
  s.sigma = 0.5 * (cov + cov.transpose());
  return s;
}

Eigen::MatrixXd mean_gap_outer(const Eigen::VectorXd& mu_v, const Eigen::VectorXd& mu_t) {
  if (mu_v.size() != mu_t.size()) {
    fail(ErrorKind::DimMismatch, "mean vectors differ in length: " +
                                     std::to_string(mu_v.size()) + " vs " +
                                     std::to_string(mu_t.size()));
  }
  const Eigen::VectorXd gap = mu_v - mu_t;
  return gap * gap.transpose();
}

FilterResult filter_outliers(const FeatureMatrix& x, const MomentStats& ref,
                             double z_threshold) {
  constexpr double kVarianceFloor = 1e-12;
  if (ref.n < 2) fail(ErrorKind::TooFewSamples, "outlier reference needs at least two rows");
  if (!(z_threshold > 0.0)) fail(ErrorKind::InvalidParam, "z_threshold must be positive");
  if (ref.dim() != x.cols()) {
    fail(ErrorKind::DimMismatch, "outlier reference dimension differs from data");
  }

  const Eigen::ArrayXd scale = (ref.sigma.diagonal().array() + kVarianceFloor).sqrt();
  std::vector<Index> kept;
  std::vector<Index> removed;
  kept.reserve(static_cast<std::size_t>(x.rows()));
  for (Index i = 0; i < x.rows(); ++i) {
    const Eigen::ArrayXd z =
        (x.row(i).transpose() - ref.mu).array().abs() / scale;
    if (z.maxCoeff() > z_threshold) {
      removed.push_back(i);
    } else {
      kept.push_back(i);
    }
  }
  if (kept.empty()) {
    fail(ErrorKind::AllRowsRemoved,
         "outlier filter removed all " + std::to_string(x.rows()) +
             " rows; the input looks pathological (threshold " +
             std::to_string(z_threshold) + ")");
  }
  return {x.select_rows(kept), std::move(removed)};
}

}  // namespace smia
