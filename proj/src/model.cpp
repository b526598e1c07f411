#include "dbmd/model.hpp"

#include <cmath>

#include "dbmd/numerics.hpp"

namespace dbmd {

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::kAgd: return "agd";
    case Strategy::kAdmm: return "admm";
    case Strategy::kCease: return "cease";
  }
  return "unknown";
}

Strategy strategy_from_string(const std::string& name) {
  if (name == "agd") return Strategy::kAgd;
  if (name == "admm") return Strategy::kAdmm;
  if (name == "cease") return Strategy::kCease;
  throw std::invalid_argument("unknown solver '" + name +
                              "' (expected agd, admm or cease)");
}

Vector Hyperparams::shifted_alpha(double alpha0, int rank) {
  require(alpha0 >= 1.0, "alpha0 must be >= 1");
  require(rank >= 1, "rank must be >= 1");
  return Vector::Constant(rank, alpha0 - 1.0);
}

void Hyperparams::validate() const {
  require(rank >= 1, "rank must be >= 1");
  require(lambda >= 0.0, "lambda must be >= 0");
  require(alpha.size() == 0 || alpha.size() == rank,
          "alpha must be empty or of length rank");
  require(alpha.size() == 0 || alpha.minCoeff() >= 0.0,
          "alpha entries must be >= 0");
  require(rho > 0.0, "rho must be positive");
  require(gamma >= 0.0, "gamma must be >= 0");
  require(w_tol > 0.0, "w_tol must be positive");
  require(max_w_iters >= 1, "max_w_iters must be >= 1");
  require(agd_min_iters >= 1, "agd_min_iters must be >= 1");
  require(max_outer >= 1, "max_outer must be >= 1");
  require(outer_tol > 0.0, "outer_tol must be positive");
  require(epsilon_h > 0.0 && epsilon_h < 1.0 / rank,
          "epsilon_h must lie in (0, 1/rank)");
  require(restarts >= 1, "restarts must be >= 1");
}

Vector Hyperparams::alpha_or_zero() const {
  if (alpha.size() == rank) return alpha;
  return Vector::Zero(rank);
}

double objective_full(const ModelState& state,
                      const std::vector<DataShard>& shards,
                      const Hyperparams& hp, bool use_sigma) {
  const std::size_t num_shards = shards.size();
  require(state.h.size() == num_shards,
          "objective_full: one coefficient block per shard required");
  if (use_sigma) {
    require(state.sigma2.size() == num_shards,
            "objective_full: sigma2 estimates missing");
  }
  const Vector alpha = hp.alpha_or_zero();
  double total = hp.lambda * state.w.lpNorm<1>();
  for (std::size_t c = 0; c < num_shards; ++c) {
    const Matrix& h = state.h[c];
    require(h.rows() == hp.rank && h.cols() == shards[c].cols(),
            "objective_full: coefficient block shape mismatch");
    const double resid = (shards[c].x - state.w * h).squaredNorm();
    if (use_sigma) {
      const double s2 = state.sigma2[c];
      require(s2 > 0.0, "objective_full: sigma2 must be positive");
      total += 0.5 * resid / s2;
      total += 0.5 * static_cast<double>(shards[c].rows() * shards[c].cols()) *
               std::log(s2);
    } else {
      total += 0.5 * resid;
    }
    if ((alpha.array() != 0.0).any()) {
      require(h.minCoeff() > 0.0,
              "objective_full: coefficients must be strictly positive");
      total -= (alpha.asDiagonal() * h.array().log().matrix()).sum();
    }
  }
  if (!std::isfinite(total)) {
    throw std::runtime_error("objective_full: non-finite value");
  }
  return total;
}

double objective_w(const Matrix& w, const std::vector<DataShard>& shards,
                   const std::vector<Matrix>& h_blocks, double lambda) {
  require(h_blocks.size() == shards.size(),
          "objective_w: one coefficient block per shard required");
  double total = lambda * w.lpNorm<1>();
  for (std::size_t c = 0; c < shards.size(); ++c) {
    total += 0.5 * (shards[c].x - w * h_blocks[c]).squaredNorm();
  }
  return total;
}

Matrix grad_fc(const Matrix& w, const DataShard& shard, const Matrix& h) {
  require(w.rows() == shard.rows(), "grad_fc: row mismatch");
  require(w.cols() == h.rows() && h.cols() == shard.cols(),
          "grad_fc: coefficient block shape mismatch");
  return (w * h - shard.x) * h.transpose();
}

double lipschitz_f(const std::vector<Matrix>& h_blocks) {
  require(!h_blocks.empty(), "lipschitz_f: no coefficient blocks");
  Matrix total = gram(h_blocks[0]);
  for (std::size_t c = 1; c < h_blocks.size(); ++c) {
    require(h_blocks[c].rows() == total.rows(),
            "lipschitz_f: rank mismatch between blocks");
    total += gram(h_blocks[c]);
  }
  return spectral_norm(total);
}

}  // namespace dbmd
