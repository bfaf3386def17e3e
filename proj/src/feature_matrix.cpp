#include "smia/feature_matrix.hpp"

#include <cmath>
#include <string>

#include "smia/error.hpp"

namespace smia {

namespace {

void check(const Eigen::MatrixXd& m) {
  if (m.rows() < 1 || m.cols() < 1) {
    fail(ErrorKind::EmptyMatrix, "feature matrix must have at least one row and one column");
  }
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      if (!std::isfinite(m(i, j))) {
        fail(ErrorKind::NonFiniteValue, "non-finite feature at row " + std::to_string(i) +
                                            ", column " + std::to_string(j));
      }
    }
  }
}

}  // namespace

FeatureMatrix::FeatureMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
  check(values_);
}

FeatureMatrix::FeatureMatrix(std::initializer_list<std::initializer_list<double>> rows) {
  const auto n = static_cast<Index>(rows.size());
  const auto d = n > 0 ? static_cast<Index>(rows.begin()->size()) : 0;
  values_.resize(n, d);
  Index i = 0;
  for (const auto& r : rows) {
    if (static_cast<Index>(r.size()) != d) {
      fail(ErrorKind::RaggedRow, "row " + std::to_string(i) + " has " +
                                     std::to_string(r.size()) + " fields, expected " +
                                     std::to_string(d));
    }
    Index j = 0;
    for (double v : r) values_(i, j++) = v;
    ++i;
  }
  check(values_);
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const Index> indices) const {
  Eigen::MatrixXd out(static_cast<Index>(indices.size()), values_.cols());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    out.row(static_cast<Index>(r)) = values_.row(indices[r]);
  }
  return FeatureMatrix(std::move(out));
}

void require_same_dim(const FeatureMatrix& a, const FeatureMatrix& b) {
  if (a.cols() != b.cols()) {
    fail(ErrorKind::DimMismatch, "feature dimensions differ: " + std::to_string(a.cols()) +
                                     " vs " + std::to_string(b.cols()));
  }
}

FeatureMatrix vstack(const FeatureMatrix& a, const FeatureMatrix& b) {
  require_same_dim(a, b);
  Eigen::MatrixXd out(a.rows() + b.rows(), a.cols());
  out << a.values(), b.values();
  return FeatureMatrix(std::move(out));
}

}  // namespace smia
