#include "smia/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "smia/error.hpp"

namespace smia {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_same_support(const DiscreteDistribution& a, const DiscreteDistribution& b) {
  if (a.size() != b.size()) {
    fail(ErrorKind::DimMismatch, "distributions have different support sizes: " +
                                     std::to_string(a.size()) + " vs " +
                                     std::to_string(b.size()));
  }
}

}  // namespace

DiscreteDistribution::DiscreteDistribution(std::vector<double> probs)
    : probs_(std::move(probs)) {
  if (probs_.empty()) fail(ErrorKind::InvalidRange, "distribution has empty support");
  for (double p : probs_) {
    if (!std::isfinite(p) || p < 0.0) {
      fail(ErrorKind::InvalidRange, "probabilities must be finite and nonnegative");
    }
  }
  const double total = std::accumulate(probs_.begin(), probs_.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-9) {
    fail(ErrorKind::InvalidRange, "probabilities sum to " + std::to_string(total));
  }
}

double chi2_divergence(const DiscreteDistribution& q, const DiscreteDistribution& p) {
  require_same_support(q, p);
  double total = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (p[i] > 0.0) {
      const double d = q[i] - p[i];
      total += d * d / p[i];
    } else if (q[i] > 0.0) {
      return kInf;
    }
  }
  return total;
}

double renyi_inf_divergence(const DiscreteDistribution& dt, const DiscreteDistribution& df) {
  require_same_support(dt, df);
  double worst = 0.0;
  for (std::size_t i = 0; i < dt.size(); ++i) {
    if (dt[i] <= 0.0) continue;
    if (df[i] <= 0.0) return kInf;
    worst = std::max(worst, dt[i] / df[i]);
  }
  // The largest ratio over a shared probability simplex is at least one.
  return std::max(0.0, std::log(worst));
}

double statistical_error_term(double chi2, long long m, double delta) {
  if (!(chi2 >= 0.0) || std::isnan(chi2)) fail(ErrorKind::InvalidRange, "chi2 must be >= 0");
  if (m < 1) fail(ErrorKind::InvalidRange, "sample count m must be positive");
  if (!(delta > 0.0 && delta <= 1.0)) fail(ErrorKind::InvalidRange, "delta must lie in (0, 1)");
  return std::sqrt((2.0 / double(m)) * (chi2 + 1.0) * std::log(1.0 / delta));
}

double auditing_bound(const BoundInputs& b) {
  if (!(b.empirical_risk >= 0.0 && b.empirical_risk <= 1.0)) {
    fail(ErrorKind::InvalidRange, "empirical risk must lie in [0, 1]");
  }
  if (!(b.d_inf >= 0.0) || std::isnan(b.d_inf)) {
    fail(ErrorKind::InvalidRange, "d_inf must be >= 0");
  }
  return b.empirical_risk + statistical_error_term(b.chi2, b.m, b.delta) +
         std::sqrt(b.d_inf / 2.0);
}

TnrPoint tnr_curve(double accuracy, double tpr, double p_nonmember) {
  if (!(accuracy > 0.0 && accuracy <= 1.0)) {
    fail(ErrorKind::InvalidRange, "accuracy must lie in (0, 1]");
  }
  if (!(tpr > 0.0 && tpr <= 1.0)) fail(ErrorKind::InvalidRange, "tpr must lie in (0, 1]");
  if (!(p_nonmember > 0.0 && p_nonmember <= 1.0)) {
    fail(ErrorKind::InvalidRange, "non-member proportion must lie in (0, 1]");
  }
  const double raw = (accuracy - (1.0 - p_nonmember) * tpr) / p_nonmember;
  return {std::clamp(raw, 0.0, 1.0), raw >= 0.0 && raw <= 1.0};
}

}  // namespace smia
