#include "smia/report.hpp"

#include <cmath>

#include "smia/error.hpp"

namespace smia {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::Smia0: return "smia0";
    case Method::SmiaM: return "smia_m";
    case Method::SmiaW: return "smia_w";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "smia0") return Method::Smia0;
  if (name == "smia_m" || name == "smia-m") return Method::SmiaM;
  if (name == "smia_w" || name == "smia-w") return Method::SmiaW;
  fail(ErrorKind::InvalidParam, "unknown method '" + std::string(name) + "'");
}

void AuditReport::validate() const {
  auto in_unit = [](double a) { return std::isfinite(a) && a >= 0.0 && a <= 1.0; };
  if (!in_unit(alpha_p5) || !in_unit(alpha_p50) || !in_unit(alpha_p95)) {
    fail(ErrorKind::ValidationError, "alpha percentiles must lie in [0, 1]");
  }
  if (!(alpha_p5 <= alpha_p50 && alpha_p50 <= alpha_p95)) {
    fail(ErrorKind::ValidationError, "alpha percentiles must satisfy p5 <= p50 <= p95");
  }
  if (k_bootstrap < 1) fail(ErrorKind::ValidationError, "k_bootstrap must be positive");
  if (n_member < 1 || n_nonmember < 1 || n_audit < 1) {
    fail(ErrorKind::ValidationError, "sample counts must be positive");
  }
  if (epsilon && !(std::isfinite(*epsilon) && *epsilon > 0.0)) {
    fail(ErrorKind::ValidationError, "epsilon must be positive when present");
  }
  for (const auto& [key, value] : diagnostics) {
    if (!std::isfinite(value)) {
      fail(ErrorKind::ValidationError, "diagnostic '" + key + "' is not finite");
    }
  }
}

}  // namespace smia
