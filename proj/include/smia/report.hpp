#ifndef SMIA_REPORT_HPP_
#define SMIA_REPORT_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "smia/kernel.hpp"

namespace smia {

enum class Method { Smia0, SmiaM, SmiaW };

/// Report spelling: "smia0", "smia_m", "smia_w".
std::string_view to_string(Method method);
/// Accepts the report spelling and the CLI spelling ("smia-m", "smia-w").
Method parse_method(std::string_view name);

struct AuditReport {
  Method method = Method::Smia0;
  double alpha_p5 = 0.0;
  double alpha_p50 = 0.0;
  double alpha_p95 = 0.0;
  std::uint64_t k_bootstrap = 0;
  std::uint64_t seed = 0;
  std::uint64_t n_member = 0;
  std::uint64_t n_nonmember = 0;
  std::uint64_t n_audit = 0;
  std::optional<KernelSpec> kernel;
  std::optional<double> epsilon;
  std::map<std::string, double> diagnostics;

  /// Throws ValidationError on ordering/range violations.
  void validate() const;
};

}  // namespace smia

#endif  // SMIA_REPORT_HPP_
