#ifndef SMIA_SMIA_ZERO_HPP_
#define SMIA_SMIA_ZERO_HPP_

#include "smia/feature_matrix.hpp"
#include "smia/stats.hpp"

namespace smia {

// Forgetting-rate estimation by matching the first two moments of the
// audit set against the two-population mixture.

struct Smia0Config {
  double grid_step = 1e-3;
  double refine_tol = 1e-6;
  // Weight of the squared mean residual. Zero leaves a pure covariance
  // (Frobenius) objective.
  double mean_weight = 1.0;

  void validate() const;
};

/// Moments of alpha * v + (1 - alpha) * t.
MomentStats mixture_moments(double alpha, const MomentStats& t,
                            const MomentStats& v);

/// R^2(alpha) = ||Sigma_f - Sigma_mix(alpha)||_F^2
///              + mean_weight * ||mu_f - mu_mix(alpha)||_2^2
double residual(double alpha, const MomentStats& t, const MomentStats& v,
                const MomentStats& f, double mean_weight);

struct Smia0Solution {
  double alpha = 0.0;
  double residual_at_opt = 0.0;
};

/// Minimizes R^2 over [0, 1]: a coarse grid followed by trisection around
/// the best grid point. Ties resolve toward the smaller alpha.
Smia0Solution solve_alpha(const MomentStats& t, const MomentStats& v,
                          const MomentStats& f, const Smia0Config& cfg = {});

double smia0_point_estimate(const FeatureMatrix& x_t, const FeatureMatrix& x_v,
                            const FeatureMatrix& x_f, const Smia0Config& cfg = {});

}  // namespace smia

#endif  // SMIA_SMIA_ZERO_HPP_
