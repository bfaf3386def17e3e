#ifndef SMIA_KERNEL_HPP_
#define SMIA_KERNEL_HPP_

#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace smia {

enum class KernelFamily { Rbf, Laplacian, Polynomial, RationalQuadratic };

std::string_view to_string(KernelFamily family);
/// Accepts the canonical names plus the CLI short forms "poly" and "rq".
KernelFamily parse_kernel_family(std::string_view name);

/// Kernel family and its parameters. Only the parameters relevant to the
/// family are consulted. An unset sigma means "choose by median heuristic".
struct KernelSpec {
  KernelFamily family = KernelFamily::Rbf;
  std::optional<double> sigma;
  double c = 1.0;
  int p = 2;
  double alpha_rq = 1.0;

  bool uses_bandwidth() const noexcept {
    return family != KernelFamily::Polynomial;
  }

  static KernelSpec rbf(std::optional<double> sigma = std::nullopt) {
    return {KernelFamily::Rbf, sigma, 1.0, 2, 1.0};
  }
  static KernelSpec laplacian(std::optional<double> sigma = std::nullopt) {
    return {KernelFamily::Laplacian, sigma, 1.0, 2, 1.0};
  }
  static KernelSpec polynomial(double c, int p) {
    return {KernelFamily::Polynomial, std::nullopt, c, p, 1.0};
  }
  static KernelSpec rational_quadratic(std::optional<double> sigma,
                                       double alpha_rq) {
    return {KernelFamily::RationalQuadratic, sigma, 1.0, 2, alpha_rq};
  }
};

/// Throws InvalidParam unless every parameter is usable (sigma included).
void validate_kernel(const KernelSpec& k);

/// k(x, y). x and y are row or column vectors of equal length.
double kernel_eval(const KernelSpec& k, const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& y);

/// Dense block G(i, j) = k(x_i, y_j) over the rows of x and y.
Eigen::MatrixXd gram_block(const KernelSpec& k, const Eigen::MatrixXd& x,
                           const Eigen::MatrixXd& y);

}  // namespace smia

#endif  // SMIA_KERNEL_HPP_
