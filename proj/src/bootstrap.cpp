#include "smia/bootstrap.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include "smia/error.hpp"

namespace smia {

namespace {

bool is_degenerate(const Error& e) {
  return e.kind() == ErrorKind::DegeneratePopulations ||
         e.kind() == ErrorKind::DegenerateEmbeddings;
}

// Runs job(i) for i in [0, count) on up to `threads` workers. The first
// exception by index is rethrown so failures do not depend on scheduling.
template <typename Job>
void parallel_for(std::size_t count, unsigned threads, Job&& job) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto n_workers =
      static_cast<std::size_t>(std::max(1u, std::min<unsigned>(threads, unsigned(count))));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

void BootstrapConfig::validate() const {
  if (k < 1) fail(ErrorKind::InvalidParam, "number of bootstrap groups must be positive");
  if (!(resample_fraction > 0.0 && resample_fraction <= 1.0)) {
    fail(ErrorKind::InvalidParam, "resample fraction must lie in (0, 1]");
  }
  if (!(max_failed_fraction >= 0.0 && max_failed_fraction <= 1.0)) {
    fail(ErrorKind::InvalidParam, "failed-group fraction must lie in [0, 1]");
  }
}

std::vector<Index> bootstrap_indices(Index n_rows, Index n_draw, RngStream& stream) {
  if (n_rows < 1) fail(ErrorKind::EmptyMatrix, "cannot resample an empty set");
  std::uniform_int_distribution<Index> pick(0, n_rows - 1);
  std::vector<Index> idx(static_cast<std::size_t>(std::max<Index>(n_draw, 0)));
  for (auto& i : idx) i = pick(stream);
  return idx;
}

FeatureMatrix bootstrap_resample(const FeatureMatrix& x, Index n_draw, RngStream& stream) {
  if (n_draw < 1) fail(ErrorKind::InvalidParam, "resample size must be positive");
  const auto idx = bootstrap_indices(x.rows(), n_draw, stream);
  return x.select_rows(idx);
}

PercentileSummary percentile_summary(std::span<const double> alphas) {
  if (alphas.empty()) fail(ErrorKind::EmptyList, "no values to summarize");
  std::vector<double> sorted(alphas.begin(), alphas.end());
  std::sort(sorted.begin(), sorted.end());
  const auto k = static_cast<long long>(sorted.size());
  auto rank = [&](long long pct) {
    // ceil(pct * k / 100) - 1, in integers.
    const long long idx = std::clamp((pct * k + 99) / 100 - 1, 0LL, k - 1);
    return sorted[static_cast<std::size_t>(idx)];
  };
  return {rank(5), rank(50), rank(95)};
}

Index resample_size(Index n, double resample_fraction) {
  return std::max<Index>(1, static_cast<Index>(std::llround(resample_fraction * double(n))));
}

GroupDraw draw_group(Index n_t, Index n_v, Index n_f, const BootstrapConfig& cfg,
                     std::uint64_t index) {
  auto stream = make_stream(cfg.seed, index);
  GroupDraw d;
  d.t = bootstrap_indices(n_t, resample_size(n_t, cfg.resample_fraction), stream);
  d.v = bootstrap_indices(n_v, resample_size(n_v, cfg.resample_fraction), stream);
  d.f = bootstrap_indices(n_f, resample_size(n_f, cfg.resample_fraction), stream);
  return d;
}

namespace {

BootstrapOutcome collect(const std::vector<std::optional<double>>& results) {
  BootstrapOutcome out;
  for (std::size_t g = 0; g < results.size(); ++g) {
    if (results[g]) {
      if (!std::isfinite(*results[g])) {
        fail(ErrorKind::ValidationError,
             "estimator returned a non-finite value for group " + std::to_string(g));
      }
      out.alphas.push_back(*results[g]);
    } else {
      out.failed_groups.push_back(g);
    }
  }
  return out;
}

}  // namespace

BootstrapOutcome run_bootstrap(const PointEstimator& estimator, const FeatureMatrix& x_t,
                               const FeatureMatrix& x_v, const FeatureMatrix& x_f,
                               const BootstrapConfig& cfg) {
  cfg.validate();
  std::vector<std::optional<double>> results(static_cast<std::size_t>(cfg.k));
  parallel_for(results.size(), cfg.threads, [&](std::size_t g) {
    const auto d = draw_group(x_t.rows(), x_v.rows(), x_f.rows(), cfg, g);
    try {
      results[g] = estimator(x_t.select_rows(d.t), x_v.select_rows(d.v), x_f.select_rows(d.f));
    } catch (const Error& e) {
      if (!is_degenerate(e)) throw;
    }
  });
  return collect(results);
}

BootstrapOutcome run_bootstrap_batched(const BatchEstimator& estimator, Index n_t, Index n_v,
                                       Index n_f, const BootstrapConfig& cfg,
                                       std::size_t chunk_size) {
  cfg.validate();
  if (chunk_size < 1) fail(ErrorKind::InvalidParam, "chunk size must be positive");
  const auto k = static_cast<std::size_t>(cfg.k);
  std::vector<std::optional<double>> results(k);
  const std::size_t chunks = (k + chunk_size - 1) / chunk_size;
  parallel_for(chunks, cfg.threads, [&](std::size_t c) {
    const std::size_t begin = c * chunk_size;
    const std::size_t end = std::min(k, begin + chunk_size);
    std::vector<GroupDraw> draws;
    draws.reserve(end - begin);
    for (std::size_t g = begin; g < end; ++g) draws.push_back(draw_group(n_t, n_v, n_f, cfg, g));
    auto values = estimator(draws);
    if (values.size() != draws.size()) {
      fail(ErrorKind::ValidationError, "batch estimator returned the wrong number of values");
    }
    std::move(values.begin(), values.end(), results.begin() + std::ptrdiff_t(begin));
  });
  return collect(results);
}

AuditReport summarize_bootstrap(Method method, const BootstrapOutcome& outcome, Index n_t,
                                Index n_v, Index n_f, const BootstrapConfig& cfg) {
  const double failed = double(outcome.failed_groups.size());
  if (outcome.alphas.empty() || failed > cfg.max_failed_fraction * double(cfg.k)) {
    fail(ErrorKind::TooManyFailedGroups,
         std::to_string(outcome.failed_groups.size()) + " of " + std::to_string(cfg.k) +
             " bootstrap groups were degenerate (limit " +
             std::to_string(cfg.max_failed_fraction * 100.0) + "%)");
  }
  const auto summary = percentile_summary(outcome.alphas);
  AuditReport r;
  r.method = method;
  r.alpha_p5 = summary.p5;
  r.alpha_p50 = summary.p50;
  r.alpha_p95 = summary.p95;
  r.k_bootstrap = cfg.k;
  r.seed = cfg.seed;
  r.n_member = static_cast<std::uint64_t>(n_t);
  r.n_nonmember = static_cast<std::uint64_t>(n_v);
  r.n_audit = static_cast<std::uint64_t>(n_f);
  r.diagnostics["failed_groups"] = failed;
  r.diagnostics["resample_fraction"] = cfg.resample_fraction;
  return r;
}

AuditReport run_bootstrap_audit(Method method, const PointEstimator& estimator,
                                const FeatureMatrix& x_t, const FeatureMatrix& x_v,
                                const FeatureMatrix& x_f, const BootstrapConfig& cfg) {
  require_same_dim(x_t, x_v);
  require_same_dim(x_t, x_f);
  const auto outcome = run_bootstrap(estimator, x_t, x_v, x_f, cfg);
  return summarize_bootstrap(method, outcome, x_t.rows(), x_v.rows(), x_f.rows(), cfg);
}

}  // namespace smia
