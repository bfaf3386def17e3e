#ifndef SMIA_STATS_HPP_
#define SMIA_STATS_HPP_

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "smia/feature_matrix.hpp"

namespace smia {

/// Mean and covariance of a population sample.
struct MomentStats {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;
  Index n = 0;

  Index dim() const noexcept { return mu.size(); }
};

enum class CovarianceDivisor {
  Population,  // 1/n
  Sample,      // 1/(n-1)
};

/// Column means and covariance, symmetrized as (S + S^T)/2.
///
/// The population divisor makes the two-population pooling identity exact
/// for concatenated finite samples, which is what the moment-matching
/// estimator relies on. The sample divisor needs n >= 2.
MomentStats estimate_moments(const FeatureMatrix& x,
                             CovarianceDivisor divisor = CovarianceDivisor::Population);

/// (mu_v - mu_t)(mu_v - mu_t)^T. Symmetric, PSD, rank at most one.
Eigen::MatrixXd mean_gap_outer(const Eigen::VectorXd& mu_v,
                               const Eigen::VectorXd& mu_t);

struct FilterResult {
  FeatureMatrix kept;
  std::vector<Index> removed;
};

inline constexpr double kDefaultZThreshold = 6.0;

/// Drops rows whose largest per-coordinate z-score against `ref` exceeds
/// z_threshold. Survivors keep their original order.
FilterResult filter_outliers(const FeatureMatrix& x, const MomentStats& ref,
                             double z_threshold = kDefaultZThreshold);

}  // namespace smia

#endif  // SMIA_STATS_HPP_
