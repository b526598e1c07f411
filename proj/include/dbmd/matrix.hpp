#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace dbmd {

// Dense column-major storage everywhere; a sample is one contiguous column.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

inline void require_finite(const Matrix& m, const std::string& what) {
  if (!m.allFinite()) {
    throw std::runtime_error("non-finite values produced in " + what);
  }
}

inline void require_same_shape(const Matrix& a, const Matrix& b,
                               const std::string& what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(what + ": shape mismatch (" +
                                std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + " vs " +
                                std::to_string(b.rows()) + "x" +
                                std::to_string(b.cols()) + ")");
  }
}

}  // namespace dbmd
