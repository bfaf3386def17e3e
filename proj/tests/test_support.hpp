#ifndef SMIA_TEST_SUPPORT_HPP_
#define SMIA_TEST_SUPPORT_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "smia/error.hpp"
#include "smia/feature_matrix.hpp"

namespace smia::testing {

inline FeatureMatrix random_matrix(std::mt19937_64& rng, Index n, Index d, double scale = 1.0,
                                   double shift = 0.0) {
  std::normal_distribution<double> normal(shift, scale);
  Eigen::MatrixXd m(n, d);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) m(i, j) = normal(rng);
  }
  return FeatureMatrix(std::move(m));
}

/// Kind of the smia::Error thrown by fn, or nullopt if it returned.
template <typename F>
std::optional<ErrorKind> error_kind(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("smia-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace smia::testing

#endif  // SMIA_TEST_SUPPORT_HPP_
