#ifndef SMIA_BOOTSTRAP_HPP_
#define SMIA_BOOTSTRAP_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "smia/feature_matrix.hpp"
#include "smia/report.hpp"
#include "smia/rng.hpp"

namespace smia {

struct BootstrapConfig {
  std::uint64_t k = 200;
  std::uint64_t seed = 42;
  double resample_fraction = 1.0;
  // Worker threads; results do not depend on it.
  unsigned threads = 1;
  // Audit fails when more than this share of groups is degenerate.
  double max_failed_fraction = 0.2;

  void validate() const;
};

/// n_draw rows drawn uniformly with replacement, in draw order.
FeatureMatrix bootstrap_resample(const FeatureMatrix& x, Index n_draw, RngStream& stream);

/// Indices behind bootstrap_resample; consumes the stream identically.
std::vector<Index> bootstrap_indices(Index n_rows, Index n_draw, RngStream& stream);

struct PercentileSummary {
  double p5 = 0.0;
  double p50 = 0.0;
  double p95 = 0.0;
};

/// Nearest-rank 5th/50th/95th percentiles.
PercentileSummary percentile_summary(std::span<const double> alphas);

/// Row indices of one bootstrap group into the original member,
/// non-member and audit sets.
struct GroupDraw {
  std::vector<Index> t;
  std::vector<Index> v;
  std::vector<Index> f;
};

/// Resample size used for a set of n rows.
Index resample_size(Index n, double resample_fraction);

/// The draw for group `index`, derived from the master seed alone.
GroupDraw draw_group(Index n_t, Index n_v, Index n_f, const BootstrapConfig& cfg,
                     std::uint64_t index);

using PointEstimator = std::function<double(
    const FeatureMatrix& x_t, const FeatureMatrix& x_v, const FeatureMatrix& x_f)>;

/// Estimates for a batch of groups. An empty optional marks a degenerate
/// group. Must return exactly one entry per draw.
using BatchEstimator =
    std::function<std::vector<std::optional<double>>(std::span<const GroupDraw>)>;

struct BootstrapOutcome {
  std::vector<double> alphas;  // successful groups, in group order
  std::vector<std::uint64_t> failed_groups;
};

/// Runs every group through the estimator. Groups whose estimator throws a
/// degeneracy error are recorded as failed; other errors propagate.
BootstrapOutcome run_bootstrap(const PointEstimator& estimator, const FeatureMatrix& x_t,
                               const FeatureMatrix& x_v, const FeatureMatrix& x_f,
                               const BootstrapConfig& cfg);

/// Same group draws, handed to the estimator in fixed-size chunks so a
/// batched estimator can amortize work across groups.
BootstrapOutcome run_bootstrap_batched(const BatchEstimator& estimator, Index n_t,
                                       Index n_v, Index n_f, const BootstrapConfig& cfg,
                                       std::size_t chunk_size = 16);

/// Applies the failure policy and fills the percentile and bookkeeping
/// fields of a report.
AuditReport summarize_bootstrap(Method method, const BootstrapOutcome& outcome,
                                Index n_t, Index n_v, Index n_f,
                                const BootstrapConfig& cfg);

AuditReport run_bootstrap_audit(Method method, const PointEstimator& estimator,
                                const FeatureMatrix& x_t, const FeatureMatrix& x_v,
                                const FeatureMatrix& x_f, const BootstrapConfig& cfg);

}  // namespace smia

#endif  // SMIA_BOOTSTRAP_HPP_
