#ifndef SMIA_THEORY_HPP_
#define SMIA_THEORY_HPP_

#include <vector>

namespace smia {

// Finite-support evaluators for the auditing error bounds.

/// Probability vector; entries nonnegative and summing to one within 1e-9.
class DiscreteDistribution {
 public:
  explicit DiscreteDistribution(std::vector<double> probs);

  const std::vector<double>& probs() const noexcept { return probs_; }
  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }

 private:
  std::vector<double> probs_;
};

/// sum (q_i - p_i)^2 / p_i; +inf when q puts mass where p has none.
double chi2_divergence(const DiscreteDistribution& q, const DiscreteDistribution& p);

/// log max_i dt_i / df_i over the support of dt; +inf when df vanishes there.
double renyi_inf_divergence(const DiscreteDistribution& dt, const DiscreteDistribution& df);

/// sqrt((2/m) (chi2 + 1) log(1/delta))
double statistical_error_term(double chi2, long long m, double delta);

struct BoundInputs {
  double empirical_risk = 0.0;
  double chi2 = 0.0;
  long long m = 1;
  double delta = 0.05;
  double d_inf = 0.0;
};

/// empirical_risk + statistical_error_term + sqrt(d_inf / 2)
double auditing_bound(const BoundInputs& b);

struct TnrPoint {
  double tnr = 0.0;
  bool feasible = true;
};

/// Solves accuracy = (1 - p) tpr + p tnr for tnr, clamped to [0, 1].
/// p is the non-member share of the audited population.
TnrPoint tnr_curve(double accuracy, double tpr, double p_nonmember);

}  // namespace smia

#endif  // SMIA_THEORY_HPP_
