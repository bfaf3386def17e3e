#ifndef SMIA_KERNEL_MMD_HPP_
#define SMIA_KERNEL_MMD_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "smia/feature_matrix.hpp"
#include "smia/kernel.hpp"

namespace smia {

/// Largest row count accepted by the O(n^2) Gram routines unless the caller
/// raises it. Larger inputs are rejected, never subsampled.
inline constexpr Index kDefaultMaxGramRows = 20000;

/// Median pairwise Euclidean distance over the rows of x and y combined.
/// For an even number of pairs the lower middle value is taken.
double median_heuristic(const FeatureMatrix& x, const FeatureMatrix& y,
                        Index max_rows = kDefaultMaxGramRows);

/// Fills sigma by median heuristic over x_t and x_v when the family needs
/// a bandwidth and none was given.
KernelSpec resolve_bandwidth(KernelSpec k, const FeatureMatrix& x_t,
                             const FeatureMatrix& x_v);

/// Mean of k(a_i, b_j) over all pairs, i.e. <mu_a, mu_b>_H for the biased
/// empirical embeddings. Symmetric in (a, b) bit for bit.
double embedding_inner(const FeatureMatrix& a, const FeatureMatrix& b,
                       const KernelSpec& k, Index max_rows = kDefaultMaxGramRows);

double mmd2_biased(const FeatureMatrix& x, const FeatureMatrix& y,
                   const KernelSpec& k, Index max_rows = kDefaultMaxGramRows);

/// U-statistic version; may be negative. Needs two rows in each set.
double mmd2_unbiased(const FeatureMatrix& x, const FeatureMatrix& y,
                     const KernelSpec& k, Index max_rows = kDefaultMaxGramRows);

/// Pairwise embedding inner products of the member (t), non-member (v) and
/// audit (f) sets.
struct EmbeddingGeometry {
  double tt = 0, vv = 0, ff = 0, tv = 0, tf = 0, vf = 0;

  /// ||mu_v - mu_t||_H^2
  double gap_sq() const noexcept { return (vv - tv) - (tv - tt); }
  /// <mu_f - mu_t, mu_v - mu_t>_H
  double projection() const noexcept { return (vf - tv) - (tf - tt); }
  /// ||mu_f - alpha mu_v - (1 - alpha) mu_t||_H^2
  double objective(double alpha) const noexcept;
};

EmbeddingGeometry embedding_geometry(const FeatureMatrix& x_t, const FeatureMatrix& x_v,
                                     const FeatureMatrix& x_f, const KernelSpec& k,
                                     Index max_rows = kDefaultMaxGramRows);

struct SmiaMSolution {
  double alpha = 0.0;
  double alpha_unclamped = 0.0;
};

/// Closed-form minimizer of the embedding objective on [0, 1].
SmiaMSolution smia_m_solve(const EmbeddingGeometry& geom);

inline double smia_m_alpha(const EmbeddingGeometry& geom) {
  return smia_m_solve(geom).alpha;
}

double smia_m_point_estimate(const FeatureMatrix& x_t, const FeatureMatrix& x_v,
                             const FeatureMatrix& x_f, const KernelSpec& k);

/// Caches the Gram matrix over the stacked (t, v, f) rows so that bootstrap
/// groups, which only reweight the original rows, cost a few matrix
/// products instead of fresh kernel evaluations.
class EmbeddingGramCache {
 public:
  /// Upper bound on cache memory; above it `fits` reports false.
  static constexpr std::size_t kDefaultMemoryBudget = std::size_t{1} << 30;

  static bool fits(Index n_t, Index n_v, Index n_f,
                   std::size_t budget_bytes = kDefaultMemoryBudget) noexcept;

  EmbeddingGramCache(const FeatureMatrix& x_t, const FeatureMatrix& x_v,
                     const FeatureMatrix& x_f, const KernelSpec& k);

  Index n_t() const noexcept { return n_t_; }
  Index n_v() const noexcept { return n_v_; }
  Index n_f() const noexcept { return n_f_; }

  /// Geometry for per-row weights (each weight vector sums to one).
  EmbeddingGeometry geometry(const Eigen::VectorXd& w_t, const Eigen::VectorXd& w_v,
                             const Eigen::VectorXd& w_f) const;

  /// Column g of each weight matrix describes one reweighting.
  std::vector<EmbeddingGeometry> geometries(const Eigen::MatrixXd& w_t,
                                            const Eigen::MatrixXd& w_v,
                                            const Eigen::MatrixXd& w_f) const;

 private:
  Index n_t_, n_v_, n_f_;
  Eigen::MatrixXd col_t_;  // (t, v, f) x t
  Eigen::MatrixXd col_v_;  // (v, f) x v
  Eigen::MatrixXd col_f_;  // f x f
};

}  // namespace smia

#endif  // SMIA_KERNEL_MMD_HPP_
