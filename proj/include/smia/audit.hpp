#ifndef SMIA_AUDIT_HPP_
#define SMIA_AUDIT_HPP_

#include "smia/bootstrap.hpp"
#include "smia/feature_matrix.hpp"
#include "smia/kernel.hpp"
#include "smia/report.hpp"
#include "smia/smia_zero.hpp"
#include "smia/stats.hpp"
#include "smia/transport.hpp"

namespace smia {

/// Everything an end-to-end audit needs besides the three feature sets.
struct AuditOptions {
  Method method = Method::Smia0;
  BootstrapConfig bootstrap;
  Smia0Config smia0;
  KernelSpec kernel = KernelSpec::rbf();
  SinkhornConfig sinkhorn;
  WassersteinMode mode = WassersteinMode::Ratio;
  bool filter = true;
  double z_threshold = kDefaultZThreshold;
  // Kernel audits reuse one Gram matrix across bootstrap groups when it
  // fits in this many bytes.
  std::size_t gram_cache_budget = std::size_t{1} << 30;
};

/// Outlier filtering, a full-sample estimate for diagnostics, then the
/// bootstrap percentile summary. Settings are echoed into diagnostics.
///
/// The kernel bandwidth, when not given, is fixed once from the filtered
/// member and non-member sets before resampling.
AuditReport run_audit(const FeatureMatrix& x_t, const FeatureMatrix& x_v,
                      const FeatureMatrix& x_f, const AuditOptions& opts);

}  // namespace smia

#endif  // SMIA_AUDIT_HPP_
