#include "smia/kernel.hpp"

#include <cmath>
#include <string>

#include "smia/error.hpp"

namespace smia {

std::string_view to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::Rbf: return "rbf";
    case KernelFamily::Laplacian: return "laplacian";
    case KernelFamily::Polynomial: return "polynomial";
    case KernelFamily::RationalQuadratic: return "rational_quadratic";
  }
  return "unknown";
}

KernelFamily parse_kernel_family(std::string_view name) {
  if (name == "rbf") return KernelFamily::Rbf;
  if (name == "laplacian") return KernelFamily::Laplacian;
  if (name == "polynomial" || name == "poly") return KernelFamily::Polynomial;
  if (name == "rational_quadratic" || name == "rq") return KernelFamily::RationalQuadratic;
  fail(ErrorKind::InvalidParam, "unknown kernel family '" + std::string(name) + "'");
}

void validate_kernel(const KernelSpec& k) {
  if (k.uses_bandwidth()) {
    if (!k.sigma) fail(ErrorKind::InvalidParam, "kernel bandwidth sigma is not set");
    if (!(*k.sigma > 0.0) || !std::isfinite(*k.sigma)) {
      fail(ErrorKind::InvalidParam, "kernel bandwidth sigma must be positive");
    }
  }
  switch (k.family) {
    case KernelFamily::Polynomial:
      if (!(k.c >= 0.0) || !std::isfinite(k.c)) {
        fail(ErrorKind::InvalidParam, "polynomial bias c must be nonnegative");
      }
      if (k.p < 1) fail(ErrorKind::InvalidParam, "polynomial degree p must be positive");
      break;
    case KernelFamily::RationalQuadratic:
      if (!(k.alpha_rq > 0.0) || !std::isfinite(k.alpha_rq)) {
        fail(ErrorKind::InvalidParam, "rational quadratic alpha must be positive");
      }
      break;
    default:
      break;
  }
}

namespace {

// Elementwise kernel value from the family's base quantity (squared
// distance, L1 distance or dot product).
template <typename Derived>
Eigen::ArrayXd apply_profile(const KernelSpec& k, const Eigen::ArrayBase<Derived>& base) {
  switch (k.family) {
    case KernelFamily::Rbf: {
      const double s = *k.sigma;
      return (-base / (2.0 * s * s)).exp();
    }
    case KernelFamily::Laplacian:
      return (-base / *k.sigma).exp();
    case KernelFamily::Polynomial:
      return (base + k.c).pow(static_cast<double>(k.p));
    case KernelFamily::RationalQuadratic: {
      const double s = *k.sigma;
      return (1.0 + base / (2.0 * k.alpha_rq * s * s)).pow(-k.alpha_rq);
    }
  }
  return {};
}

}  // namespace

double kernel_eval(const KernelSpec& k, const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& y) {
  validate_kernel(k);
  if (x.size() != y.size()) {
    fail(ErrorKind::DimMismatch, "kernel arguments differ in length");
  }
  switch (k.family) {
    case KernelFamily::Rbf: {
      const double s = *k.sigma;
      return std::exp(-(x - y).squaredNorm() / (2.0 * s * s));
    }
    case KernelFamily::Laplacian:
      return std::exp(-(x - y).lpNorm<1>() / *k.sigma);
    case KernelFamily::Polynomial:
      return std::pow(x.dot(y) + k.c, k.p);
    case KernelFamily::RationalQuadratic: {
      const double s = *k.sigma;
      return std::pow(1.0 + (x - y).squaredNorm() / (2.0 * k.alpha_rq * s * s), -k.alpha_rq);
    }
  }
  return 0.0;
}

Eigen::MatrixXd gram_block(const KernelSpec& k, const Eigen::MatrixXd& x,
                           const Eigen::MatrixXd& y) {
  validate_kernel(k);
  if (x.cols() != y.cols()) fail(ErrorKind::DimMismatch, "Gram inputs differ in dimension");
  Eigen::MatrixXd g(x.rows(), y.rows());
  Eigen::ArrayXd base(x.rows());
  // Coordinates are accumulated one column at a time, in the same order for
  // every entry, so k(a, b) and k(b, a) agree to the last bit.
  for (Eigen::Index j = 0; j < y.rows(); ++j) {
    base.setZero();
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      const auto diff = x.col(c).array() - y(j, c);
      switch (k.family) {
        case KernelFamily::Rbf:
        case KernelFamily::RationalQuadratic:
          base += diff.square();
          break;
        case KernelFamily::Laplacian:
          base += diff.abs();
          break;
        case KernelFamily::Polynomial:
          base += x.col(c).array() * y(j, c);
          break;
      }
    }
    g.col(j) = apply_profile(k, base).matrix();
  }
  return g;
}

}  // namespace smia
