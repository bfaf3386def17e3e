#ifndef SMIA_TRANSPORT_HPP_
#define SMIA_TRANSPORT_HPP_

#include <optional>
#include <string_view>

#include <Eigen/Dense>

#include "smia/feature_matrix.hpp"

namespace smia {

/// Entropic regularization is epsilon_scale * median(C) unless epsilon is
/// given explicitly.
struct SinkhornConfig {
  std::optional<double> epsilon;
  double epsilon_scale = 0.05;
  int p = 2;
  int max_iters = 1000;
  double tol = 1e-6;
  bool log_domain = true;

  void validate() const;
};

struct TransportPlan {
  Eigen::MatrixXd gamma;
  Eigen::MatrixXd cost;
  double w_eps = 0.0;    // sum gamma .* cost, no entropy term
  double entropy = 0.0;  // -sum gamma log gamma
  double epsilon = 0.0;  // regularization actually used
  int iterations = 0;
  double max_marginal_violation = 0.0;
  bool converged = false;
};

/// C(i, j) = ||x_i - y_j||_2^p
Eigen::MatrixXd cost_matrix(const FeatureMatrix& x, const FeatureMatrix& y, int p);

/// Median entry of C; falls back to the mean when more than half of the
/// entries are zero, and to 1 when C is identically zero.
double cost_scale(const Eigen::MatrixXd& c);

/// Sinkhorn-Knopp scaling for the coupling between weights a and b.
/// Stops once the worst marginal error is at most tol, or at max_iters.
TransportPlan sinkhorn(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                       const Eigen::MatrixXd& c, const SinkhornConfig& cfg);

/// Uniform-weight plan between two point sets.
TransportPlan sinkhorn_uniform(const FeatureMatrix& x, const FeatureMatrix& y,
                               const SinkhornConfig& cfg);

/// Exact W_p^p between equal-size uniform point sets by enumerating all
/// matchings. Only for n <= 8; used as a reference solution.
double exact_ot_small(const FeatureMatrix& x, const FeatureMatrix& y, int p);

enum class WassersteinMode { Ratio, Polarization };

std::string_view to_string(WassersteinMode mode);
WassersteinMode parse_wasserstein_mode(std::string_view name);

struct SmiaWSolution {
  double alpha = 0.0;
  double alpha_unclamped = 0.0;
  double w_ft = 0.0;
  double w_vt = 0.0;
  std::optional<double> w_fv;
  int iterations = 0;  // largest Sinkhorn iteration count among the solves
};

SmiaWSolution smia_w_solve(const FeatureMatrix& x_t, const FeatureMatrix& x_v,
                           const FeatureMatrix& x_f, const SinkhornConfig& cfg,
                           WassersteinMode mode = WassersteinMode::Ratio);

inline double smia_w_point_estimate(const FeatureMatrix& x_t, const FeatureMatrix& x_v,
                                    const FeatureMatrix& x_f, const SinkhornConfig& cfg,
                                    WassersteinMode mode = WassersteinMode::Ratio) {
  return smia_w_solve(x_t, x_v, x_f, cfg, mode).alpha;
}

}  // namespace smia

#endif  // SMIA_TRANSPORT_HPP_
