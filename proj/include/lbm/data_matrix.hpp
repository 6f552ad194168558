#pragma once

#include <Eigen/Dense>

#include <string>
#include <string_view>
#include <vector>

namespace lbm {

/// Observation model carried by a data matrix.
enum class Variant { Binary, Continuous };

std::string_view to_string(Variant v);
Variant variant_from_string(std::string_view s);

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// An n x m matrix of observations. Binary matrices hold only 0/1 cells.
///
/// Rows and columns optionally carry names (from a header line or a row
/// annotation file); they are metadata only and never enter the model.
class DataMatrix {
 public:
  DataMatrix(RowMatrix values, Variant variant);

  int rows() const { return static_cast<int>(values_.rows()); }
  int cols() const { return static_cast<int>(values_.cols()); }
  Variant variant() const { return variant_; }

  double operator()(int i, int j) const { return values_(i, j); }
  const RowMatrix& values() const { return values_; }

  std::vector<std::string> column_names;

 private:
  RowMatrix values_;
  Variant variant_;
};

}  // namespace lbm
