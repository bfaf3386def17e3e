#include "smia/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "smia/error.hpp"

namespace smia {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

template <typename F>
void for_each_field(std::string_view line, F&& f) {
  std::size_t start = 0;
  while (true) {
    auto end = line.find(',', start);
    if (end == std::string_view::npos) {
      f(line.substr(start));
      return;
    }
    f(line.substr(start, end - start));
    start = end + 1;
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    fail(ErrorKind::MissingFile, "no such file: " + path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoFailure, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(ErrorKind::IoFailure, "read error on " + path.string());
  return ss.str();
}

ordered_json kernel_to_json(const KernelSpec& k) {
  ordered_json j;
  j["family"] = std::string(to_string(k.family));
  j["sigma"] = k.sigma ? ordered_json(*k.sigma) : ordered_json(nullptr);
  j["c"] = k.c;
  j["p"] = k.p;
  j["alpha_rq"] = k.alpha_rq;
  return j;
}

KernelSpec kernel_from_json(const ordered_json& j) {
  KernelSpec k;
  k.family = parse_kernel_family(j.at("family").get<std::string>());
  if (!j.at("sigma").is_null()) k.sigma = j.at("sigma").get<double>();
  k.c = j.at("c").get<double>();
  k.p = j.at("p").get<int>();
  k.alpha_rq = j.at("alpha_rq").get<double>();
  return k;
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 64> buf{};
  // Shortest representation that parses back to the same double.
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) fail(ErrorKind::IoFailure, "cannot format value");
  return std::string(buf.data(), ptr);
}

FeatureMatrix parse_feature_csv(const std::string& text, const std::string& source) {
  auto lines = split_lines(text);
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || trim(lines.front()).empty()) {
    fail(ErrorKind::EmptyMatrix, source + ": missing header row");
  }

  Index d = 0;
  for_each_field(lines.front(), [&](std::string_view) { ++d; });
  const auto n = static_cast<Index>(lines.size()) - 1;
  if (n < 1) fail(ErrorKind::EmptyMatrix, source + ": header present but no data rows");

  Eigen::MatrixXd values(n, d);
  for (Index i = 0; i < n; ++i) {
    const auto line = lines[static_cast<std::size_t>(i) + 1];
    Index j = 0;
    for_each_field(line, [&](std::string_view raw) {
      if (j >= d) {
        ++j;
        return;
      }
      const auto field = trim(raw);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
        fail(ErrorKind::MalformedValue, source + ": data row " + std::to_string(i) +
                                            ", column " + std::to_string(j) +
                                            ": cannot parse '" + std::string(field) + "'");
      }
      if (!std::isfinite(v)) {
        fail(ErrorKind::NonFiniteValue, source + ": data row " + std::to_string(i) +
                                            ", column " + std::to_string(j) +
                                            " is not finite");
      }
      values(i, j++) = v;
    });
    if (j != d) {
      fail(ErrorKind::RaggedRow, source + ": data row " + std::to_string(i) + " has " +
                                     std::to_string(j) + " fields, header has " +
                                     std::to_string(d));
    }
  }
  return FeatureMatrix(std::move(values));
}

FeatureMatrix load_feature_matrix(const std::filesystem::path& path) {
  return parse_feature_csv(read_file(path), path.string());
}

std::string format_feature_csv(const FeatureMatrix& m) {
  std::string out;
  for (Index j = 0; j < m.cols(); ++j) {
    if (j > 0) out += ',';
    out += 'f';
    out += std::to_string(j);
  }
  out += '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::IoFailure, "cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) fail(ErrorKind::IoFailure, "write failed for " + path.string());
}

void write_feature_matrix(const FeatureMatrix& m, const std::filesystem::path& path) {
  write_text_file(path, format_feature_csv(m));
}

std::string report_to_json(const AuditReport& r) {
  r.validate();
  ordered_json j;
  j["method"] = std::string(to_string(r.method));
  j["alpha_p5"] = r.alpha_p5;
  j["alpha_p50"] = r.alpha_p50;
  j["alpha_p95"] = r.alpha_p95;
  j["k_bootstrap"] = r.k_bootstrap;
  j["seed"] = r.seed;
  j["n_member"] = r.n_member;
  j["n_nonmember"] = r.n_nonmember;
  j["n_audit"] = r.n_audit;
  j["kernel"] = r.kernel ? kernel_to_json(*r.kernel) : ordered_json(nullptr);
  j["epsilon"] = r.epsilon ? ordered_json(*r.epsilon) : ordered_json(nullptr);
  ordered_json diag = ordered_json::object();
  for (const auto& [key, value] : r.diagnostics) diag[key] = value;
  j["diagnostics"] = std::move(diag);
  return j.dump(2) + "\n";
}

AuditReport report_from_json(const std::string& text) {
  AuditReport r;
  try {
    const auto j = ordered_json::parse(text);
    r.method = parse_method(j.at("method").get<std::string>());
    r.alpha_p5 = j.at("alpha_p5").get<double>();
    r.alpha_p50 = j.at("alpha_p50").get<double>();
    r.alpha_p95 = j.at("alpha_p95").get<double>();
    r.k_bootstrap = j.at("k_bootstrap").get<std::uint64_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.n_member = j.at("n_member").get<std::uint64_t>();
    r.n_nonmember = j.at("n_nonmember").get<std::uint64_t>();
    r.n_audit = j.at("n_audit").get<std::uint64_t>();
    if (!j.at("kernel").is_null()) r.kernel = kernel_from_json(j.at("kernel"));
    if (!j.at("epsilon").is_null()) r.epsilon = j.at("epsilon").get<double>();
    for (const auto& [key, value] : j.at("diagnostics").items()) {
      r.diagnostics[key] = value.get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ValidationError, std::string("malformed report JSON: ") + e.what());
  }
  r.validate();
  return r;
}

void write_report(const AuditReport& r, const std::filesystem::path& path) {
  write_text_file(path, report_to_json(r));
}

AuditReport load_report(const std::filesystem::path& path) {
  return report_from_json(read_file(path));
}

}  // namespace smia
