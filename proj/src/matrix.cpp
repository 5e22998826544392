#include "rsrrr/matrix.hpp"

#include <sstream>

namespace rsrrr {

std::string shape_string(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

void require_finite(const Matrix& m, std::string_view what) {
  if (!m.allFinite()) {
    throw NumericalError(std::string(what) + " (" + shape_string(m) + ") contains non-finite entries");
  }
}

void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, std::string_view what) {
  if (m.rows() != rows || m.cols() != cols) {
    std::ostringstream os;
    os << what << ": expected " << rows << "x" << cols << ", got " << shape_string(m);
    throw DimensionError(os.str());
  }
}

double l11_norm(const Matrix& m) { return m.cwiseAbs().sum(); }

double nuclear_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

}  // namespace rsrrr
