#include "dbmd/h_solver.hpp"

#include <cmath>

namespace dbmd {

namespace {

constexpr int kMaxIters = 200;
constexpr int kMaxBacktracks = 60;
constexpr double kRelTol = 1e-8;

double column_value(const Vector& h, const Vector& wtx_j, const Matrix& wtw,
                    double x_sq, const Vector& alpha, bool has_alpha) {
  double value = 0.5 * (x_sq - 2.0 * h.dot(wtx_j) + h.dot(wtw * h));
  if (has_alpha) value -= alpha.dot(h.array().log().matrix());
  return value;
}

// Exponentiated-gradient step folded into an epsilon interior mixture, so the
// result sums to one exactly and every entry is >= eps.
Vector eg_step(const Vector& h, const Vector& g, double eta, double eps) {
  Vector s = (h.array().log() - eta * g.array()).matrix();
  const double shift = s.maxCoeff();
  const Vector v = (s.array() - shift).exp().matrix();
  const double total = v.sum();
  const double r = static_cast<double>(h.size());
  return (eps + (1.0 - r * eps) * (v.array() / total)).matrix();
}

}  // namespace

Matrix update_h(const DataShard& shard, const Matrix& w, const Matrix& h0,
                const Hyperparams& hp) {
  const Eigen::Index r = hp.rank;
  require(w.rows() == shard.rows(), "update_h: basis row mismatch");
  require(w.cols() == r, "update_h: basis column count must equal rank");
  require(h0.rows() == r && h0.cols() == shard.cols(),
          "update_h: coefficient block shape mismatch");
  const double eps = hp.epsilon_h;
  require(eps > 0.0 && eps < 1.0 / static_cast<double>(r),
          "update_h: epsilon_h must lie in (0, 1/rank)");
  const Vector alpha = hp.alpha_or_zero();
  const bool has_alpha = (alpha.array() != 0.0).any();

  const Matrix wtw = w.transpose() * w;
  const Matrix wtx = w.transpose() * shard.x;

  Matrix out(r, shard.cols());
  for (Eigen::Index j = 0; j < shard.cols(); ++j) {
    Vector h = h0.col(j);
    require(std::abs(h.sum() - 1.0) <= 1e-8,
            "update_h: column " + std::to_string(j) + " does not sum to 1");
    require(h.minCoeff() >= eps - 1e-12,
            "update_h: column " + std::to_string(j) + " below the floor");
    const Vector wtx_j = wtx.col(j);
    const double x_sq = shard.x.col(j).squaredNorm();
    double value = column_value(h, wtx_j, wtw, x_sq, alpha, has_alpha);
    double eta = 1.0;
    for (int it = 0; it < kMaxIters; ++it) {
      Vector g = wtw * h - wtx_j;
      if (has_alpha) g -= (alpha.array() / h.array()).matrix();
      eta = std::min(eta * 2.0, 1e12);
      bool accepted = false;
      Vector cand;
      double cand_value = value;
      for (int bt = 0; bt < kMaxBacktracks; ++bt) {
        cand = eg_step(h, g, eta, eps);
        cand_value = column_value(cand, wtx_j, wtw, x_sq, alpha, has_alpha);
        if (cand_value <= value) {
          accepted = true;
          break;
        }
        eta *= 0.5;
      }
      if (!accepted) break;
      const double drop = value - cand_value;
      const double scale = std::max(std::abs(value), kRelTol);
      h = cand;
      value = cand_value;
      if (drop <= kRelTol * scale) break;
    }
    out.col(j) = h;
  }
  require_finite(out, "coefficient update");
  return out;
}

std::vector<int> assign_clusters(const Matrix& h) {
  require(h.rows() >= 1 && h.cols() >= 1, "assign_clusters: empty input");
  std::vector<int> labels(static_cast<std::size_t>(h.cols()));
  for (Eigen::Index j = 0; j < h.cols(); ++j) {
    int best = 0;
    for (Eigen::Index k = 1; k < h.rows(); ++k) {
      if (h(k, j) > h(best, j)) best = static_cast<int>(k);
    }
    labels[static_cast<std::size_t>(j)] = best;
  }
  return labels;
}

}  // namespace dbmd
