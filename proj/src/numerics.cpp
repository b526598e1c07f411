#include "dbmd/numerics.hpp"

#include <cmath>

namespace dbmd {

Matrix soft_threshold(const Matrix& x, double t) {
  require(t >= 0.0, "soft_threshold: threshold must be >= 0");
  return x.unaryExpr([t](double v) {
    const double mag = std::abs(v) - t;
    if (mag <= 0.0) return 0.0;
    return v > 0.0 ? mag : -mag;
  });
}

double spectral_norm(const Matrix& a, double tol, int max_iters) {
  require(a.rows() == a.cols(), "spectral_norm: matrix must be square");
  require(tol > 0.0, "spectral_norm: tol must be positive");
  require(max_iters > 0, "spectral_norm: max_iters must be positive");
  const Eigen::Index n = a.rows();
  if (n == 0) return 0.0;

  Vector v = Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  double eig = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    const Vector av = a * v;
    const double norm = av.norm();
    if (norm == 0.0) return 0.0;
    const double next = v.dot(av);
    v = av / norm;
    if (std::abs(next - eig) <= tol * std::max(std::abs(next), 1e-300)) {
      return next;
    }
    eig = next;
  }
  return eig;
}

double frob_norm(const Matrix& x) { return x.norm(); }

Matrix gram(const Matrix& h) {
  Matrix g = Matrix::Zero(h.rows(), h.rows());
  g.selfadjointView<Eigen::Lower>().rankUpdate(h);
  g.triangularView<Eigen::StrictlyUpper>() =
      g.transpose().triangularView<Eigen::StrictlyUpper>();
  return g;
}

}  // namespace dbmd
