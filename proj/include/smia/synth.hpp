#ifndef SMIA_SYNTH_HPP_
#define SMIA_SYNTH_HPP_

#include <cstdint>

#include <Eigen/Dense>

#include "smia/feature_matrix.hpp"

namespace smia {

struct GaussianPopulationSpec {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;
  Index n = 1;
  std::uint64_t seed = 0;
};

/// n i.i.d. draws from N(mu, sigma). Semidefinite sigma is supported
/// (sigma = 0 yields n copies of mu).
FeatureMatrix gen_gaussian(const GaussianPopulationSpec& spec);

struct MixtureDraw {
  FeatureMatrix x_f;
  Index n_from_t = 0;
  Index n_from_v = 0;
};

/// round-half-up(alpha * n) rows from pool_v, the rest from pool_t, each
/// drawn with replacement, then shuffled together.
MixtureDraw gen_mixture(const FeatureMatrix& pool_t, const FeatureMatrix& pool_v,
                        double alpha, Index n, std::uint64_t seed);

/// Member N(0, I), non-member N(sep * 1, I) reference sets and an audit set
/// mixed at alpha from independent pools of the same two populations.
struct SyntheticAudit {
  FeatureMatrix member;
  FeatureMatrix nonmember;
  MixtureDraw audit;
};

struct SyntheticAuditConfig {
  double alpha = 0.3;
  Index n = 1000;  // rows per set
  Index d = 2;
  double sep = 3.0;
  std::uint64_t seed = 42;
};

SyntheticAudit make_synthetic_audit(const SyntheticAuditConfig& cfg);

}  // namespace smia

#endif  // SMIA_SYNTH_HPP_
