#ifndef SMIA_IO_HPP_
#define SMIA_IO_HPP_

#include <filesystem>
#include <string>

#include "smia/feature_matrix.hpp"
#include "smia/report.hpp"

namespace smia {

// Feature CSV: header "f0,...,f{d-1}", then one line of d decimal fields per
// sample. '.' decimal separator, ',' field separator, LF or CRLF endings.

FeatureMatrix load_feature_matrix(const std::filesystem::path& path);
FeatureMatrix parse_feature_csv(const std::string& text, const std::string& source = "<memory>");

void write_feature_matrix(const FeatureMatrix& m, const std::filesystem::path& path);
std::string format_feature_csv(const FeatureMatrix& m);

/// Round-trip-exact decimal form (17 significant digits), locale independent.
std::string format_double(double v);

std::string report_to_json(const AuditReport& r);
AuditReport report_from_json(const std::string& text);

void write_report(const AuditReport& r, const std::filesystem::path& path);
AuditReport load_report(const std::filesystem::path& path);

/// Writes text to path, throwing IoFailure on any error.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace smia

#endif  // SMIA_IO_HPP_
