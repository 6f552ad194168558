#include "lbm/data_matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace lbm {

std::string_view to_string(Variant v) {
  return v == Variant::Binary ? "binary" : "continuous";
}

Variant variant_from_string(std::string_view s) {
  if (s == "binary" || s == "bernoulli") return Variant::Binary;
  if (s == "continuous" || s == "gaussian") return Variant::Continuous;
  throw std::invalid_argument("unknown data variant '" + std::string(s) + "'");
}

DataMatrix::DataMatrix(RowMatrix values, Variant variant)
    : values_(std::move(values)), variant_(variant) {
  if (values_.rows() < 1 || values_.cols() < 1)
    throw std::invalid_argument("data matrix must have at least one row and one column");
  for (Eigen::Index i = 0; i < values_.rows(); ++i) {
    for (Eigen::Index j = 0; j < values_.cols(); ++j) {
      const double y = values_(i, j);
      if (!std::isfinite(y))
        throw std::invalid_argument("data matrix cell (" + std::to_string(i + 1) + ", " +
                                    std::to_string(j + 1) + ") is not finite");
      if (variant_ == Variant::Binary && y != 0.0 && y != 1.0)
        throw std::invalid_argument("binary data matrix cell (" + std::to_string(i + 1) +
                                    ", " + std::to_string(j + 1) + ") is not 0 or 1");
    }
  }
}

}  // namespace lbm
