#include "smia/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "smia/error.hpp"

namespace smia {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kDivisionFloor = 1e-300;

void check_weights(const Eigen::VectorXd& w, const char* name) {
  if (w.size() == 0) fail(ErrorKind::NonProbabilityWeights, std::string(name) + " is empty");
  for (Index i = 0; i < w.size(); ++i) {
    if (!std::isfinite(w[i]) || w[i] < 0.0) {
      fail(ErrorKind::NonProbabilityWeights,
           std::string(name) + " has a negative or non-finite entry at " + std::to_string(i));
    }
  }
  if (std::abs(w.sum() - 1.0) > 1e-9) {
    fail(ErrorKind::NonProbabilityWeights,
         std::string(name) + " sums to " + std::to_string(w.sum()) + ", expected 1");
  }
}

// log(sum(exp(x))) that tolerates -inf entries.
double log_sum_exp(const Eigen::Ref<const Eigen::ArrayXd>& x) {
  const double m = x.maxCoeff();
  if (m == kNegInf) return kNegInf;
  return m + std::log((x - m).exp().sum());
}

double max_violation(const Eigen::MatrixXd& gamma, const Eigen::VectorXd& a,
                     const Eigen::VectorXd& b) {
  const double rows = (gamma.rowwise().sum() - a).cwiseAbs().maxCoeff();
  const double cols = (gamma.colwise().sum().transpose() - b).cwiseAbs().maxCoeff();
  return std::max(rows, cols);
}

void finish(TransportPlan& plan) {
  plan.w_eps = (plan.gamma.array() * plan.cost.array()).sum();
  double h = 0.0;
  for (Index j = 0; j < plan.gamma.cols(); ++j) {
    for (Index i = 0; i < plan.gamma.rows(); ++i) {
      const double g = plan.gamma(i, j);
      if (g > 0.0) h -= g * std::log(g);
    }
  }
  plan.entropy = h;
}

// One log-domain run at fixed eps. f and g hold the dual potentials in cost
// units, so they carry over between runs at different eps.
//
// After a g update the column marginals are exact, and the row marginals
// fall out of the log-sum-exp the next f update needs anyway; the plan is
// only materialized once that cheap check passes.
bool sinkhorn_log_stage(const Eigen::ArrayXd& log_a, const Eigen::ArrayXd& log_b,
                        const Eigen::VectorXd& a, const Eigen::VectorXd& b, double eps,
                        int max_iters, double tol, Eigen::ArrayXd& f, Eigen::ArrayXd& g,
                        TransportPlan& plan) {
  const Index n = log_a.size();
  const Index m = log_b.size();
  const Eigen::ArrayXXd neg_c = -plan.cost.array() / eps;  // column j: costs to y_j
  const Eigen::ArrayXXd neg_ct = neg_c.transpose();        // column i: costs from x_i
  Eigen::ArrayXd fs = f / eps;
  Eigen::ArrayXd gs = g / eps;
  Eigen::ArrayXd lse_rows(n);

  auto update_g = [&] {
    for (Index j = 0; j < m; ++j) {
      gs[j] = log_b[j] == kNegInf ? kNegInf : log_b[j] - log_sum_exp(neg_c.col(j) + fs);
    }
  };
  auto materialize = [&] {
    plan.gamma = ((neg_c.colwise() + fs).rowwise() + gs.transpose()).exp().matrix();
    plan.max_marginal_violation = max_violation(plan.gamma, a, b);
    return plan.max_marginal_violation <= tol;
  };

  bool have_g = false;
  bool done = false;
  for (int it = 1; it <= max_iters && !done; ++it) {
    for (Index i = 0; i < n; ++i) lse_rows[i] = log_sum_exp(neg_ct.col(i) + gs);
    if (have_g) {
      double row_err = 0.0;
      for (Index i = 0; i < n; ++i) {
        const double mass = fs[i] == kNegInf ? 0.0 : std::exp(fs[i] + lse_rows[i]);
        row_err = std::max(row_err, std::abs(mass - a[i]));
      }
      if (row_err <= tol && materialize()) {
        done = true;
        break;
      }
    }
    for (Index i = 0; i < n; ++i) fs[i] = log_a[i] == kNegInf ? kNegInf : log_a[i] - lse_rows[i];
    update_g();
    have_g = true;
    ++plan.iterations;
  }
  if (!done) done = materialize();
  // Zero-weight atoms keep a finite potential so later stages stay defined.
  f = (fs == kNegInf).select(0.0, fs * eps);
  g = (gs == kNegInf).select(0.0, gs * eps);
  return done;
}

// Small eps is reached by halving from the cost scale, warm-starting each
// stage from the previous potentials. Started cold, the potentials need on
// the order of C/eps sweeps to travel from zero, which at eps = 1e-3 max(C)
// means hundreds of thousands of iterations.
void sinkhorn_log(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double eps,
                  const SinkhornConfig& cfg, TransportPlan& plan) {
  const Eigen::ArrayXd log_a = a.array().log();
  const Eigen::ArrayXd log_b = b.array().log();
  Eigen::ArrayXd f = Eigen::ArrayXd::Zero(a.size());
  Eigen::ArrayXd g = Eigen::ArrayXd::Zero(b.size());

  std::vector<double> schedule;
  for (double e = cost_scale(plan.cost); e > eps; e *= 0.5) schedule.push_back(e);
  schedule.push_back(eps);

  // Intermediate stages only need to land near their own optimum, and may
  // use at most half the budget; the target eps always gets a run.
  const double coarse_tol = std::max(cfg.tol, 1e-3);
  const int coarse_budget = cfg.max_iters / 2;
  for (std::size_t k = 0; k + 1 < schedule.size(); ++k) {
    const int budget = coarse_budget - plan.iterations;
    if (budget <= 0) break;
    sinkhorn_log_stage(log_a, log_b, a, b, schedule[k], budget, coarse_tol, f, g, plan);
  }
  plan.converged = sinkhorn_log_stage(log_a, log_b, a, b, eps, cfg.max_iters - plan.iterations,
                                      cfg.tol, f, g, plan);
}

void sinkhorn_linear(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double eps,
                     const SinkhornConfig& cfg, TransportPlan& plan) {
  const Eigen::MatrixXd kernel = (-plan.cost.array() / eps).exp().matrix();
  const auto underflow = [&](const std::string& where) {
    fail(ErrorKind::NumericalUnderflow,
         "Gibbs kernel underflow (" + where + ") at epsilon " + std::to_string(eps) +
             "; retry in the log domain or with a larger epsilon");
  };
  for (Index i = 0; i < kernel.rows(); ++i) {
    if (a[i] > 0.0 && kernel.row(i).maxCoeff() == 0.0) underflow("row " + std::to_string(i));
  }
  for (Index j = 0; j < kernel.cols(); ++j) {
    if (b[j] > 0.0 && kernel.col(j).maxCoeff() == 0.0) underflow("column " + std::to_string(j));
  }

  Eigen::VectorXd u = Eigen::VectorXd::Ones(a.size());
  Eigen::VectorXd v = Eigen::VectorXd::Ones(b.size());
  for (int it = 1; it <= cfg.max_iters; ++it) {
    const Eigen::VectorXd kv = kernel * v;
    for (Index i = 0; i < u.size(); ++i) {
      if (a[i] > 0.0 && kv[i] < kDivisionFloor) underflow("scaling denominator");
      u[i] = a[i] / std::max(kv[i], kDivisionFloor);
    }
    const Eigen::VectorXd ktu = kernel.transpose() * u;
    for (Index j = 0; j < v.size(); ++j) {
      if (b[j] > 0.0 && ktu[j] < kDivisionFloor) underflow("scaling denominator");
      v[j] = b[j] / std::max(ktu[j], kDivisionFloor);
    }
    plan.gamma = u.asDiagonal() * kernel * v.asDiagonal();
    plan.iterations = it;
    plan.max_marginal_violation = max_violation(plan.gamma, a, b);
    if (plan.max_marginal_violation <= cfg.tol) {
      plan.converged = true;
      return;
    }
  }
}

}  // namespace

void SinkhornConfig::validate() const {
  if (epsilon && !(*epsilon > 0.0 && std::isfinite(*epsilon))) {
    fail(ErrorKind::InvalidParam, "epsilon must be positive");
  }
  if (!(epsilon_scale > 0.0) || !std::isfinite(epsilon_scale)) {
    fail(ErrorKind::InvalidParam, "epsilon scale must be positive");
  }
  if (p < 1) fail(ErrorKind::InvalidParam, "cost exponent p must be positive");
  if (max_iters < 1) fail(ErrorKind::InvalidParam, "max_iters must be positive");
  if (!(tol > 0.0)) fail(ErrorKind::InvalidParam, "tol must be positive");
}

Eigen::MatrixXd cost_matrix(const FeatureMatrix& x, const FeatureMatrix& y, int p) {
  require_same_dim(x, y);
  if (p < 1) fail(ErrorKind::InvalidParam, "cost exponent p must be positive");
  Eigen::MatrixXd c(x.rows(), y.rows());
  for (Index j = 0; j < y.rows(); ++j) {
    const Eigen::ArrayXd sq =
        (x.values().rowwise() - y.row(j)).rowwise().squaredNorm().array();
    if (p == 2) {
      c.col(j) = sq.matrix();
    } else if (p == 1) {
      c.col(j) = sq.sqrt().matrix();
    } else {
      c.col(j) = sq.sqrt().pow(double(p)).matrix();
    }
  }
  return c;
}

double cost_scale(const Eigen::MatrixXd& c) {
  std::vector<double> entries(c.data(), c.data() + c.size());
  const auto mid = entries.begin() + static_cast<std::ptrdiff_t>((entries.size() - 1) / 2);
  std::nth_element(entries.begin(), mid, entries.end());
  if (*mid > 0.0) return *mid;
  const double mean = c.mean();
  return mean > 0.0 ? mean : 1.0;
}

TransportPlan sinkhorn(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                       const Eigen::MatrixXd& c, const SinkhornConfig& cfg) {
  cfg.validate();
  check_weights(a, "source weights");
  check_weights(b, "target weights");
  if (c.rows() != a.size() || c.cols() != b.size()) {
    fail(ErrorKind::DimMismatch, "cost matrix shape does not match the weights");
  }
  if (!c.allFinite()) fail(ErrorKind::InvalidParam, "cost matrix has non-finite entries");

  TransportPlan plan;
  plan.cost = c;
  plan.epsilon = cfg.epsilon ? *cfg.epsilon : cfg.epsilon_scale * cost_scale(c);
  if (cfg.log_domain) {
    sinkhorn_log(a, b, plan.epsilon, cfg, plan);
  } else {
    sinkhorn_linear(a, b, plan.epsilon, cfg, plan);
  }
  finish(plan);
  return plan;
}

TransportPlan sinkhorn_uniform(const FeatureMatrix& x, const FeatureMatrix& y,
                               const SinkhornConfig& cfg) {
  const Eigen::VectorXd a = Eigen::VectorXd::Constant(x.rows(), 1.0 / double(x.rows()));
  const Eigen::VectorXd b = Eigen::VectorXd::Constant(y.rows(), 1.0 / double(y.rows()));
  return sinkhorn(a, b, cost_matrix(x, y, cfg.p), cfg);
}

double exact_ot_small(const FeatureMatrix& x, const FeatureMatrix& y, int p) {
  if (x.rows() != y.rows()) {
    fail(ErrorKind::UnequalSizes, "exact matching needs equal set sizes");
  }
  if (x.rows() > 8) fail(ErrorKind::TooLarge, "exact matching is limited to 8 points");
  const Eigen::MatrixXd c = cost_matrix(x, y, p);
  std::vector<Index> perm(static_cast<std::size_t>(x.rows()));
  std::iota(perm.begin(), perm.end(), Index{0});
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i) total += c(static_cast<Index>(i), perm[i]);
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / double(x.rows());
}

std::string_view to_string(WassersteinMode mode) {
  return mode == WassersteinMode::Ratio ? "ratio" : "polarization";
}

WassersteinMode parse_wasserstein_mode(std::string_view name) {
  if (name == "ratio") return WassersteinMode::Ratio;
  if (name == "polarization") return WassersteinMode::Polarization;
  fail(ErrorKind::InvalidParam, "unknown transport mode '" + std::string(name) + "'");
}

SmiaWSolution smia_w_solve(const FeatureMatrix& x_t, const FeatureMatrix& x_v,
                           const FeatureMatrix& x_f, const SinkhornConfig& cfg,
                           WassersteinMode mode) {
  require_same_dim(x_t, x_v);
  require_same_dim(x_t, x_f);
  SmiaWSolution sol;
  const auto ft = sinkhorn_uniform(x_f, x_t, cfg);
  const auto vt = sinkhorn_uniform(x_v, x_t, cfg);
  sol.w_ft = ft.w_eps;
  sol.w_vt = vt.w_eps;
  sol.iterations = std::max(ft.iterations, vt.iterations);
  if (!(sol.w_vt >= 1e-9)) {
    fail(ErrorKind::DegeneratePopulations,
         "member/non-member transport cost " + std::to_string(sol.w_vt) +
             " is below 1e-9; the forgetting rate is not identifiable");
  }
  if (mode == WassersteinMode::Ratio) {
    sol.alpha_unclamped = sol.w_ft / sol.w_vt;
  } else {
    const auto fv = sinkhorn_uniform(x_f, x_v, cfg);
    sol.w_fv = fv.w_eps;
    sol.iterations = std::max(sol.iterations, fv.iterations);
    const double inner =
        0.5 * (sol.w_ft * sol.w_ft + sol.w_vt * sol.w_vt - fv.w_eps * fv.w_eps);
    sol.alpha_unclamped = inner / (sol.w_vt * sol.w_vt);
  }
  sol.alpha = std::clamp(sol.alpha_unclamped, 0.0, 1.0);
  return sol;
}

}  // namespace smia
