#include "smia/kernel_mmd.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "smia/error.hpp"

namespace smia {

namespace {

constexpr Index kTileRows = 256;

void check_rows(const FeatureMatrix& x, Index max_rows) {
  if (x.rows() > max_rows) {
    fail(ErrorKind::InputTooLarge,
         "kernel routines accept at most " + std::to_string(max_rows) + " rows per set, got " +
             std::to_string(x.rows()) + "; subsample explicitly or raise the cap");
  }
}

// Strict weak order on matrices so symmetric quantities can be evaluated
// with their arguments in a fixed order.
bool canonical_less(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows()) return a.rows() < b.rows();
  if (a.cols() != b.cols()) return a.cols() < b.cols();
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(),
                                      b.data() + b.size());
}

// Sum of k(a_i, b_j) over all pairs, accumulated tile by tile so memory
// stays O(n * tile) whatever the input size.
double gram_sum(const KernelSpec& k, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  double total = 0.0;
  for (Index j0 = 0; j0 < b.rows(); j0 += kTileRows) {
    const Index len = std::min(kTileRows, b.rows() - j0);
    total += gram_block(k, a, b.middleRows(j0, len)).sum();
  }
  return total;
}

double gram_trace(const KernelSpec& k, const Eigen::MatrixXd& a) {
  double total = 0.0;
  for (Index i = 0; i < a.rows(); ++i) {
    total += kernel_eval(k, a.row(i).transpose(), a.row(i).transpose());
  }
  return total;
}

// Calls visit(first, count) with the squared distances from row i to rows
// i+1..n-1, for every i.
template <typename Visit>
void for_each_pair_sq_distance(const Eigen::MatrixXd& z, Visit&& visit) {
  const Index n = z.rows();
  Eigen::ArrayXd sq(n);
  for (Index i = 0; i + 1 < n; ++i) {
    const Index rest = n - i - 1;
    sq.head(rest).setZero();
    for (Index c = 0; c < z.cols(); ++c) {
      sq.head(rest) += (z.col(c).tail(rest).array() - z(i, c)).square();
    }
    visit(sq.data(), rest);
  }
}

// Exact lower median of all pairwise squared distances. Large inputs avoid
// materializing every pair: a strided sample brackets the target rank, a
// second pass counts what falls below the bracket and keeps what falls in
// it. A missed bracket falls back to the full selection.
double lower_median_pair_sq_distance(const Eigen::MatrixXd& z) {
  const auto n = static_cast<std::size_t>(z.rows());
  const std::size_t pairs = n * (n - 1) / 2;
  const std::size_t rank = (pairs - 1) / 2;
  auto select_all = [&] {
    std::vector<double> all;
    all.reserve(pairs);
    for_each_pair_sq_distance(z, [&](const double* d, Index m) { all.insert(all.end(), d, d + m); });
    std::nth_element(all.begin(), all.begin() + std::ptrdiff_t(rank), all.end());
    return all[rank];
  };
  constexpr std::size_t kSampleTarget = 1 << 16;
  if (pairs <= 16 * kSampleTarget) return select_all();

  const std::size_t stride = pairs / kSampleTarget;
  std::vector<double> sample;
  sample.reserve(pairs / stride + 1);
  std::size_t index = 0;
  for_each_pair_sq_distance(z, [&](const double* d, Index m) {
    for (Index k = 0; k < m; ++k, ++index) {
      if (index % stride == 0) sample.push_back(d[k]);
    }
  });
  std::sort(sample.begin(), sample.end());
  // Generous margin: about ten standard deviations of the sample rank.
  const auto m = sample.size();
  const auto centre = static_cast<std::size_t>(double(rank) / double(pairs) * double(m));
  const auto margin = static_cast<std::size_t>(10.0 * std::sqrt(double(m)) / 2.0) + 1;
  const double lo = sample[centre > margin ? centre - margin : 0];
  const double hi = sample[std::min(m - 1, centre + margin)];

  std::size_t below = 0;
  std::vector<double> inside;
  for_each_pair_sq_distance(z, [&](const double* d, Index count) {
    for (Index k = 0; k < count; ++k) {
      if (d[k] < lo) {
        ++below;
      } else if (d[k] <= hi) {
        inside.push_back(d[k]);
      }
    }
  });
  if (rank < below || rank >= below + inside.size()) return select_all();
  const auto target = inside.begin() + std::ptrdiff_t(rank - below);
  std::nth_element(inside.begin(), target, inside.end());
  return *target;
}

}  // namespace

double median_heuristic(const FeatureMatrix& x, const FeatureMatrix& y, Index max_rows) {
  require_same_dim(x, y);
  const Index n = x.rows() + y.rows();
  if (n > max_rows) {
    fail(ErrorKind::InputTooLarge, "median heuristic accepts at most " +
                                       std::to_string(max_rows) + " combined rows");
  }
  Eigen::MatrixXd z(n, x.cols());
  z << x.values(), y.values();

  // Squared distances share the median's position; one sqrt at the end.
  const double lower_sq = lower_median_pair_sq_distance(z);
  if (!(lower_sq > 0.0)) {
    fail(ErrorKind::AllPointsIdentical,
         "median pairwise distance is zero; supply the kernel bandwidth explicitly");
  }
  return std::sqrt(lower_sq);
}

KernelSpec resolve_bandwidth(KernelSpec k, const FeatureMatrix& x_t, const FeatureMatrix& x_v) {
  if (k.uses_bandwidth() && !k.sigma) k.sigma = median_heuristic(x_t, x_v);
  validate_kernel(k);
  return k;
}

double embedding_inner(const FeatureMatrix& a, const FeatureMatrix& b, const KernelSpec& k,
                       Index max_rows) {
  require_same_dim(a, b);
  check_rows(a, max_rows);
  check_rows(b, max_rows);
  validate_kernel(k);
  const auto* lhs = &a.values();
  const auto* rhs = &b.values();
  if (canonical_less(*rhs, *lhs)) std::swap(lhs, rhs);
  return gram_sum(k, *lhs, *rhs) / (double(lhs->rows()) * double(rhs->rows()));
}

double mmd2_biased(const FeatureMatrix& x, const FeatureMatrix& y, const KernelSpec& k,
                   Index max_rows) {
  const double xx = embedding_inner(x, x, k, max_rows);
  const double yy = embedding_inner(y, y, k, max_rows);
  const double xy = embedding_inner(x, y, k, max_rows);
  const double value = (xx + yy) - 2.0 * xy;
  return (value < 0.0 && value > -1e-12) ? 0.0 : value;
}

double mmd2_unbiased(const FeatureMatrix& x, const FeatureMatrix& y, const KernelSpec& k,
                     Index max_rows) {
  if (x.rows() < 2 || y.rows() < 2) {
    fail(ErrorKind::TooFewSamples, "unbiased MMD needs at least two rows in each set");
  }
  require_same_dim(x, y);
  check_rows(x, max_rows);
  check_rows(y, max_rows);
  validate_kernel(k);
  auto within = [&](const Eigen::MatrixXd& a) {
    const double n = double(a.rows());
    return (gram_sum(k, a, a) - gram_trace(k, a)) / (n * (n - 1.0));
  };
  const double xx = within(x.values());
  const double yy = within(y.values());
  const double xy = embedding_inner(x, y, k, max_rows);
  return (xx + yy) - 2.0 * xy;
}

double EmbeddingGeometry::objective(double alpha) const noexcept {
  const double b = 1.0 - alpha;
  return ff - 2.0 * alpha * vf - 2.0 * b * tf + alpha * alpha * vv + 2.0 * alpha * b * tv +
         b * b * tt;
}

EmbeddingGeometry embedding_geometry(const FeatureMatrix& x_t, const FeatureMatrix& x_v,
                                     const FeatureMatrix& x_f, const KernelSpec& k,
                                     Index max_rows) {
  require_same_dim(x_t, x_v);
  require_same_dim(x_t, x_f);
  EmbeddingGeometry g;
  g.tt = embedding_inner(x_t, x_t, k, max_rows);
  g.vv = embedding_inner(x_v, x_v, k, max_rows);
  g.ff = embedding_inner(x_f, x_f, k, max_rows);
  g.tv = embedding_inner(x_t, x_v, k, max_rows);
  g.tf = embedding_inner(x_t, x_f, k, max_rows);
  g.vf = embedding_inner(x_v, x_f, k, max_rows);
  return g;
}

SmiaMSolution smia_m_solve(const EmbeddingGeometry& geom) {
  const double gap = geom.gap_sq();
  if (!(gap > 1e-12)) {
    fail(ErrorKind::DegenerateEmbeddings,
         "member and non-member embeddings coincide (||mu_v - mu_t||^2 = " +
             std::to_string(gap) + "); the forgetting rate is not identifiable");
  }
  const double raw = geom.projection() / gap;
  return {std::clamp(raw, 0.0, 1.0), raw};
}

double smia_m_point_estimate(const FeatureMatrix& x_t, const FeatureMatrix& x_v,
                             const FeatureMatrix& x_f, const KernelSpec& k) {
  require_same_dim(x_t, x_v);
  require_same_dim(x_t, x_f);
  const KernelSpec resolved = resolve_bandwidth(k, x_t, x_v);
  return smia_m_alpha(embedding_geometry(x_t, x_v, x_f, resolved));
}

namespace {

// Doubles held by the three lower block-columns of the stacked Gram.
std::size_t cache_entries(std::size_t n_t, std::size_t n_v, std::size_t n_f) {
  return (n_t + n_v + n_f) * n_t + (n_v + n_f) * n_v + n_f * n_f;
}

}  // namespace

bool EmbeddingGramCache::fits(Index n_t, Index n_v, Index n_f,
                              std::size_t budget_bytes) noexcept {
  const auto entries = cache_entries(static_cast<std::size_t>(n_t), static_cast<std::size_t>(n_v),
                                     static_cast<std::size_t>(n_f));
  return entries <= budget_bytes / sizeof(double);
}

EmbeddingGramCache::EmbeddingGramCache(const FeatureMatrix& x_t, const FeatureMatrix& x_v,
                                       const FeatureMatrix& x_f, const KernelSpec& k)
    : n_t_(x_t.rows()), n_v_(x_v.rows()), n_f_(x_f.rows()) {
  require_same_dim(x_t, x_v);
  require_same_dim(x_t, x_f);
  for (const auto* x : {&x_t, &x_v, &x_f}) check_rows(*x, kDefaultMaxGramRows);
  validate_kernel(k);
  // Every product below reads only the lower block triangle, so only the
  // columns of t against (t, v, f), v against (v, f) and f against f are kept.
  Eigen::MatrixXd tvf(n_t_ + n_v_ + n_f_, x_t.cols());
  tvf << x_t.values(), x_v.values(), x_f.values();
  col_t_ = gram_block(k, tvf, x_t.values());
  col_v_ = gram_block(k, tvf.bottomRows(n_v_ + n_f_), x_v.values());
  col_f_ = gram_block(k, x_f.values(), x_f.values());
}

EmbeddingGeometry EmbeddingGramCache::geometry(const Eigen::VectorXd& w_t,
                                               const Eigen::VectorXd& w_v,
                                               const Eigen::VectorXd& w_f) const {
  return geometries(w_t, w_v, w_f).front();
}

std::vector<EmbeddingGeometry> EmbeddingGramCache::geometries(const Eigen::MatrixXd& w_t,
                                                              const Eigen::MatrixXd& w_v,
                                                              const Eigen::MatrixXd& w_f) const {
  if (w_t.rows() != n_t_ || w_v.rows() != n_v_ || w_f.rows() != n_f_ ||
      w_t.cols() != w_v.cols() || w_t.cols() != w_f.cols()) {
    fail(ErrorKind::DimMismatch, "weight matrices do not match the cached Gram layout");
  }
  const Index groups = w_t.cols();
  // Diagonal blocks are symmetric: w' K w = 2 w' (L w) + sum_i K_ii w_i^2
  // with L the strictly lower triangle, at half the cost of a full product.
  auto quad = [](const auto& block, const Eigen::MatrixXd& w) {
    Eigen::MatrixXd lw(w.rows(), w.cols());
    lw.noalias() = block.template triangularView<Eigen::StrictlyLower>() * w;
    const Eigen::ArrayXd diag = block.diagonal().array();
    Eigen::VectorXd q(w.cols());
    for (Index g = 0; g < w.cols(); ++g) {
      q[g] = 2.0 * w.col(g).dot(lw.col(g)) + (diag * w.col(g).array().square()).sum();
    }
    return q;
  };
  const Eigen::VectorXd tt = quad(col_t_.topRows(n_t_), w_t);
  const Eigen::VectorXd vv = quad(col_v_.topRows(n_v_), w_v);
  const Eigen::VectorXd ff = quad(col_f_, w_f);
  Eigen::MatrixXd cross_t(n_v_ + n_f_, groups);  // (v, f) x t block times w_t
  cross_t.noalias() = col_t_.bottomRows(n_v_ + n_f_) * w_t;
  Eigen::MatrixXd cross_v(n_f_, groups);  // f x v block times w_v
  cross_v.noalias() = col_v_.bottomRows(n_f_) * w_v;

  std::vector<EmbeddingGeometry> out(static_cast<std::size_t>(groups));
  for (Index g = 0; g < groups; ++g) {
    auto& geo = out[static_cast<std::size_t>(g)];
    geo.tt = tt[g];
    geo.vv = vv[g];
    geo.ff = ff[g];
    geo.tv = w_v.col(g).dot(cross_t.col(g).head(n_v_));
    geo.tf = w_f.col(g).dot(cross_t.col(g).tail(n_f_));
    geo.vf = w_f.col(g).dot(cross_v.col(g));
  }
  return out;
}

}  // namespace smia
