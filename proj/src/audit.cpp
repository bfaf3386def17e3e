#include "smia/audit.hpp"

#include <optional>

#include "smia/error.hpp"
#include "smia/kernel_mmd.hpp"

namespace smia {

namespace {

Eigen::MatrixXd count_weights(std::span<const GroupDraw> draws, Index n,
                              std::vector<Index> GroupDraw::*member) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, static_cast<Index>(draws.size()));
  for (std::size_t g = 0; g < draws.size(); ++g) {
    const auto& idx = draws[g].*member;
    const double unit = 1.0 / double(idx.size());
    for (Index i : idx) w(i, static_cast<Index>(g)) += unit;
  }
  return w;
}

// Groups per batched Gram product. Wide batches amortize each pass over the
// cached Gram; the width is fixed so results never depend on thread count.
constexpr std::size_t kGroupsPerBatch = 100;

BootstrapOutcome bootstrap_smia_m(const FeatureMatrix& x_t, const FeatureMatrix& x_v,
                                  const FeatureMatrix& x_f, const KernelSpec& kernel,
                                  const AuditOptions& opts,
                                  std::map<std::string, double>& diag) {
  const bool cached =
      EmbeddingGramCache::fits(x_t.rows(), x_v.rows(), x_f.rows(), opts.gram_cache_budget);
  diag["gram_cached"] = cached ? 1.0 : 0.0;
  if (!cached) {
    const auto full = smia_m_solve(embedding_geometry(x_t, x_v, x_f, kernel));
    diag["alpha_full_sample"] = full.alpha;
    diag["alpha_unclamped_full_sample"] = full.alpha_unclamped;
    const PointEstimator estimator = [&](const FeatureMatrix& t, const FeatureMatrix& v,
                                         const FeatureMatrix& f) {
      return smia_m_alpha(embedding_geometry(t, v, f, kernel));
    };
    return run_bootstrap(estimator, x_t, x_v, x_f, opts.bootstrap);
  }
  const EmbeddingGramCache cache(x_t, x_v, x_f, kernel);
  const auto uniform = [](Index n) { return Eigen::VectorXd::Constant(n, 1.0 / double(n)); };
  const auto full = smia_m_solve(
      cache.geometry(uniform(x_t.rows()), uniform(x_v.rows()), uniform(x_f.rows())));
  diag["alpha_full_sample"] = full.alpha;
  diag["alpha_unclamped_full_sample"] = full.alpha_unclamped;
  const BatchEstimator estimator = [&](std::span<const GroupDraw> draws) {
    const auto geoms = cache.geometries(count_weights(draws, x_t.rows(), &GroupDraw::t),
                                        count_weights(draws, x_v.rows(), &GroupDraw::v),
                                        count_weights(draws, x_f.rows(), &GroupDraw::f));
    std::vector<std::optional<double>> out;
    out.reserve(geoms.size());
    for (const auto& g : geoms) {
      try {
        out.emplace_back(smia_m_alpha(g));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::DegenerateEmbeddings) throw;
        out.emplace_back(std::nullopt);
      }
    }
    return out;
  };
  return run_bootstrap_batched(estimator, x_t.rows(), x_v.rows(), x_f.rows(), opts.bootstrap,
                               kGroupsPerBatch);
}

}  // namespace

AuditReport run_audit(const FeatureMatrix& x_t_in, const FeatureMatrix& x_v_in,
                      const FeatureMatrix& x_f_in, const AuditOptions& opts) {
  require_same_dim(x_t_in, x_v_in);
  require_same_dim(x_t_in, x_f_in);
  opts.bootstrap.validate();

  std::map<std::string, double> diag;
  diag["filter_enabled"] = opts.filter ? 1.0 : 0.0;
  diag["z_threshold"] = opts.z_threshold;

  std::optional<FeatureMatrix> x_t, x_v, x_f;
  if (opts.filter) {
    const MomentStats ref = estimate_moments(vstack(x_t_in, x_v_in));
    auto ft = filter_outliers(x_t_in, ref, opts.z_threshold);
    auto fv = filter_outliers(x_v_in, ref, opts.z_threshold);
    auto ff = filter_outliers(x_f_in, ref, opts.z_threshold);
    diag["removed_member"] = double(ft.removed.size());
    diag["removed_nonmember"] = double(fv.removed.size());
    diag["removed_audit"] = double(ff.removed.size());
    x_t.emplace(std::move(ft.kept));
    x_v.emplace(std::move(fv.kept));
    x_f.emplace(std::move(ff.kept));
  } else {
    x_t.emplace(x_t_in);
    x_v.emplace(x_v_in);
    x_f.emplace(x_f_in);
  }

  BootstrapOutcome outcome;
  std::optional<KernelSpec> kernel;
  std::optional<double> epsilon;

  switch (opts.method) {
    case Method::Smia0: {
      opts.smia0.validate();
      const auto full = solve_alpha(estimate_moments(*x_t), estimate_moments(*x_v),
                                    estimate_moments(*x_f), opts.smia0);
      diag["alpha_full_sample"] = full.alpha;
      diag["residual_at_opt"] = full.residual_at_opt;
      diag["grid_step"] = opts.smia0.grid_step;
      diag["refine_tol"] = opts.smia0.refine_tol;
      diag["mean_weight"] = opts.smia0.mean_weight;
      const Smia0Config cfg = opts.smia0;
      outcome = run_bootstrap(
          [cfg](const FeatureMatrix& t, const FeatureMatrix& v, const FeatureMatrix& f) {
            return smia0_point_estimate(t, v, f, cfg);
          },
          *x_t, *x_v, *x_f, opts.bootstrap);
      break;
    }
    case Method::SmiaM: {
      diag["sigma_from_median_heuristic"] =
          (opts.kernel.uses_bandwidth() && !opts.kernel.sigma) ? 1.0 : 0.0;
      kernel = resolve_bandwidth(opts.kernel, *x_t, *x_v);
      outcome = bootstrap_smia_m(*x_t, *x_v, *x_f, *kernel, opts, diag);
      break;
    }
    case Method::SmiaW: {
      opts.sinkhorn.validate();
      epsilon = opts.sinkhorn.epsilon;
      const auto full = smia_w_solve(*x_t, *x_v, *x_f, opts.sinkhorn, opts.mode);
      diag["alpha_full_sample"] = full.alpha;
      diag["alpha_unclamped_full_sample"] = full.alpha_unclamped;
      diag["w_ft_full_sample"] = full.w_ft;
      diag["w_vt_full_sample"] = full.w_vt;
      if (full.w_fv) diag["w_fv_full_sample"] = *full.w_fv;
      diag["sinkhorn_iterations_full_sample"] = full.iterations;
      diag["epsilon_scale"] = opts.sinkhorn.epsilon_scale;
      diag["wp"] = opts.sinkhorn.p;
      diag["max_iters"] = opts.sinkhorn.max_iters;
      diag["tol"] = opts.sinkhorn.tol;
      diag["log_domain"] = opts.sinkhorn.log_domain ? 1.0 : 0.0;
      diag["mode_polarization"] = opts.mode == WassersteinMode::Polarization ? 1.0 : 0.0;
      const SinkhornConfig cfg = opts.sinkhorn;
      const WassersteinMode mode = opts.mode;
      outcome = run_bootstrap(
          [cfg, mode](const FeatureMatrix& t, const FeatureMatrix& v, const FeatureMatrix& f) {
            return smia_w_point_estimate(t, v, f, cfg, mode);
          },
          *x_t, *x_v, *x_f, opts.bootstrap);
      break;
    }
  }

  auto summary = summarize_bootstrap(opts.method, outcome, x_t->rows(), x_v->rows(),
                                     x_f->rows(), opts.bootstrap);
  summary.kernel = kernel;
  summary.epsilon = epsilon;
  summary.diagnostics.insert(diag.begin(), diag.end());
  summary.validate();
  return summary;
}

}  // namespace smia
