#ifndef SMIA_FEATURE_MATRIX_HPP_
#define SMIA_FEATURE_MATRIX_HPP_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace smia {

using Index = Eigen::Index;

/// Per-sample audit features, one row per sample.
///
/// Always holds at least one row and one column, and every entry is finite.
/// The constructors enforce this, so downstream code never re-validates.
class FeatureMatrix {
 public:
  explicit FeatureMatrix(Eigen::MatrixXd values);
  FeatureMatrix(std::initializer_list<std::initializer_list<double>> rows);

  Index rows() const noexcept { return values_.rows(); }
  Index cols() const noexcept { return values_.cols(); }
  const Eigen::MatrixXd& values() const noexcept { return values_; }
  auto row(Index i) const { return values_.row(i); }
  double operator()(Index i, Index j) const { return values_(i, j); }

  /// Rows selected by index, in the order given (indices may repeat).
  FeatureMatrix select_rows(std::span<const Index> indices) const;

  friend bool operator==(const FeatureMatrix& a, const FeatureMatrix& b) {
    return a.values_.rows() == b.values_.rows() &&
           a.values_.cols() == b.values_.cols() && a.values_ == b.values_;
  }

 private:
  Eigen::MatrixXd values_;
};

/// Stacks a on top of b. Column counts must agree.
FeatureMatrix vstack(const FeatureMatrix& a, const FeatureMatrix& b);

void require_same_dim(const FeatureMatrix& a, const FeatureMatrix& b);

}  // namespace smia

#endif  // SMIA_FEATURE_MATRIX_HPP_
