#include "smia/smia_zero.hpp"

#include <cmath>
#include <string>

#include "smia/error.hpp"

namespace smia {

namespace {

void require_same_dim(const MomentStats& a, const MomentStats& b) {
  if (a.dim() != b.dim() || a.sigma.rows() != b.sigma.rows()) {
    fail(ErrorKind::DimMismatch, "moment dimensions differ: " + std::to_string(a.dim()) +
                                     " vs " + std::to_string(b.dim()));
  }
}

// Precomputed pieces of R^2 so the grid scan does no allocation.
struct Residual {
  Eigen::MatrixXd sigma_t, sigma_v, delta2, sigma_f;
  Eigen::VectorXd mu_t, mu_v, mu_f;
  double mean_weight;

  double operator()(double a) const {
    const double cov_part =
        (sigma_f - a * sigma_v - (1.0 - a) * sigma_t - (a - a * a) * delta2).squaredNorm();
    if (mean_weight == 0.0) return cov_part;
    return cov_part + mean_weight * (mu_f - a * mu_v - (1.0 - a) * mu_t).squaredNorm();
  }
};

Residual make_residual(const MomentStats& t, const MomentStats& v, const MomentStats& f,
                       double mean_weight) {
  require_same_dim(t, v);
  require_same_dim(t, f);
  return {t.sigma, v.sigma, mean_gap_outer(v.mu, t.mu), f.sigma,
          t.mu,    v.mu,    f.mu,                       mean_weight};
}

}  // namespace

void Smia0Config::validate() const {
  if (!(grid_step > 0.0 && grid_step <= 0.1)) {
    fail(ErrorKind::InvalidParam, "grid_step must lie in (0, 0.1]");
  }
  if (!(refine_tol > 0.0 && refine_tol <= grid_step)) {
    fail(ErrorKind::InvalidParam, "refine_tol must lie in (0, grid_step]");
  }
  if (!(mean_weight >= 0.0) || !std::isfinite(mean_weight)) {
    fail(ErrorKind::InvalidParam, "mean_weight must be nonnegative");
  }
}

MomentStats mixture_moments(double alpha, const MomentStats& t, const MomentStats& v) {
  require_same_dim(t, v);
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    fail(ErrorKind::AlphaOutOfRange, "alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
  MomentStats f;
  f.mu = alpha * v.mu + (1.0 - alpha) * t.mu;
  f.sigma = alpha * v.sigma + (1.0 - alpha) * t.sigma +
            (alpha - alpha * alpha) * mean_gap_outer(v.mu, t.mu);
  f.n = 0;
  return f;
}

double residual(double alpha, const MomentStats& t, const MomentStats& v,
                const MomentStats& f, double mean_weight) {
  return make_residual(t, v, f, mean_weight)(alpha);
}

Smia0Solution solve_alpha(const MomentStats& t, const MomentStats& v, const MomentStats& f,
                          const Smia0Config& cfg) {
  cfg.validate();
  const Residual r2 = make_residual(t, v, f, cfg.mean_weight);

  constexpr double kDegenerate = 1e-10;
  if ((v.mu - t.mu).norm() < kDegenerate && (v.sigma - t.sigma).norm() < kDegenerate) {
    fail(ErrorKind::DegeneratePopulations,
         "member and non-member moments coincide; the forgetting rate is not identifiable");
  }

  // Coarse scan. Strict '<' keeps the first (smallest) minimizer.
  const auto steps = static_cast<long>(std::ceil(1.0 / cfg.grid_step - 1e-9));
  double best_alpha = 0.0;
  double best_value = r2(0.0);
  for (long i = 1; i <= steps; ++i) {
    const double a = std::min(1.0, static_cast<double>(i) * cfg.grid_step);
    const double value = r2(a);
    if (value < best_value) {
      best_value = value;
      best_alpha = a;
    }
  }

  // Trisection inside the neighbouring grid cells.
  double lo = std::max(0.0, best_alpha - cfg.grid_step);
  double hi = std::min(1.0, best_alpha + cfg.grid_step);
  while (hi - lo > cfg.refine_tol) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (r2(m1) <= r2(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }

  Smia0Solution sol{best_alpha, best_value};
  for (double a : {lo, 0.5 * (lo + hi), hi}) {
    const double value = r2(a);
    if (value < sol.residual_at_opt || (value == sol.residual_at_opt && a < sol.alpha)) {
      sol = {a, value};
    }
  }
  return sol;
}

double smia0_point_estimate(const FeatureMatrix& x_t, const FeatureMatrix& x_v,
                            const FeatureMatrix& x_f, const Smia0Config& cfg) {
  require_same_dim(x_t, x_v);
  require_same_dim(x_t, x_f);
  return solve_alpha(estimate_moments(x_t), estimate_moments(x_v), estimate_moments(x_f),
                     cfg)
      .alpha;
}

}  // namespace smia
