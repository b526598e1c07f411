#include "dbmd/noise.hpp"

#include <cmath>

#include "dbmd/datagen.hpp"
#include "dbmd/rng.hpp"
#include "dbmd/threads.hpp"
#include "dbmd/w_solvers.hpp"

namespace dbmd {

double estimate_sigma2(const DataShard& shard, const Matrix& w_ref,
                       const Matrix& h) {
  require(w_ref.rows() == shard.rows(), "estimate_sigma2: basis row mismatch");
  require(w_ref.cols() == h.rows() && h.cols() == shard.cols(),
          "estimate_sigma2: coefficient block shape mismatch");
  require(shard.rows() > 0 && shard.cols() > 0, "estimate_sigma2: empty shard");
  const double mse = (shard.x - w_ref * h).squaredNorm() /
                     static_cast<double>(shard.rows() * shard.cols());
  return std::max(mse, 1e-12);
}

Matrix weighted_mean(const std::vector<Matrix>& mats,
                     const std::vector<double>& sigma2) {
  require(!mats.empty(), "weighted_mean: no inputs");
  require(sigma2.size() == mats.size(),
          "weighted_mean: one sigma2 per matrix required");
  double total = 0.0;
  for (double s2 : sigma2) {
    require(s2 > 0.0, "weighted_mean: sigma2 must be positive");
    total += 1.0 / s2;
  }
  Matrix out = (1.0 / sigma2[0]) * mats[0];
  for (std::size_t c = 1; c < mats.size(); ++c) {
    require_same_shape(out, mats[c], "weighted_mean inputs");
    out += (1.0 / sigma2[c]) * mats[c];
  }
  return out / total;
}

double variance_ratio_theoretical(const std::vector<double>& sigma2) {
  require(!sigma2.empty(), "variance_ratio_theoretical: no variances");
  // The ratio is scale-free, so divide through by the first variance; equal
  // inputs then cancel exactly instead of within an ulp.
  const double scale = sigma2.front();
  require(scale > 0.0, "variance_ratio_theoretical: sigma2 must be positive");
  double inv_sum = 0.0;
  double sum = 0.0;
  for (double s2 : sigma2) {
    require(s2 > 0.0, "variance_ratio_theoretical: sigma2 must be positive");
    inv_sum += scale / s2;
    sum += s2 / scale;
  }
  const double count = static_cast<double>(sigma2.size());
  const double harmonic = count / inv_sum;
  const double arithmetic = sum / count;
  return harmonic / arithmetic;
}

VarianceRatioResult empirical_variance_ratio(const VarianceRatioConfig& cfg) {
  require(cfg.workers >= 1, "empirical_variance_ratio: workers must be >= 1");
  require(cfg.reps >= 2, "empirical_variance_ratio: need at least 2 reps");
  require(cfg.sigma.size() == static_cast<std::size_t>(cfg.workers),
          "empirical_variance_ratio: one sigma per worker required");
  require(cfg.strategy != Strategy::kAgd,
          "empirical_variance_ratio: weighting applies to the consensus and "
          "surrogate strategies only");

  const Matrix w_true = gen_basis(cfg.basis_value, cfg.basis_support,
                                  cfg.basis_overlap, cfg.rank);
  const auto count = static_cast<std::size_t>(cfg.workers);
  std::vector<Matrix> h_blocks(count);
  for (std::size_t c = 0; c < count; ++c) {
    h_blocks[c] =
        gen_h_bernoulli(cfg.rank, cfg.cols_per_shard, cfg.bernoulli_p,
                        CounterRng::derive(cfg.seed, kStreamHInit, c));
  }
  std::vector<double> sigma2(count);
  for (std::size_t c = 0; c < count; ++c) {
    sigma2[c] = std::max(cfg.sigma[c] * cfg.sigma[c], 1e-12);
  }

  Hyperparams hp;
  hp.rank = cfg.rank;
  hp.lambda = cfg.lambda;
  hp.rho = cfg.rho;
  hp.gamma = cfg.gamma;
  hp.w_tol = cfg.w_tol;
  hp.max_w_iters = cfg.max_w_iters;

  const Eigen::Index m = w_true.rows();
  const auto reps = static_cast<std::size_t>(cfg.reps);
  std::vector<Matrix> plain(reps), weighted(reps);
  std::vector<char> ok(reps, 0);
  parallel_for(cfg.reps, [&](int rep) {
    const auto slot = static_cast<std::size_t>(rep);
    const auto shards =
        gen_observations(w_true, h_blocks, cfg.sigma,
                         cfg.seed + static_cast<std::uint64_t>(rep));
    bool both = true;
    for (const bool use_weights : {false, true}) {
      ModelState state;
      state.w = Matrix::Ones(m, cfg.rank);
      state.h = h_blocks;
      state.sigma2 = sigma2;
      Hyperparams local = hp;
      local.weighted = use_weights;
      CommLedger ledger;
      const auto res =
          run_w_update(cfg.strategy, state, shards, local, ledger, false);
      if (!res.converged) {
        both = false;
        break;
      }
      (use_weights ? weighted[slot] : plain[slot]) = std::move(state.w);
    }
    ok[slot] = both ? 1 : 0;
  });

  VarianceRatioResult out;
  out.theoretical = variance_ratio_theoretical(sigma2);
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < reps; ++i) {
    if (ok[i]) kept.push_back(i);
  }
  out.reps_used = static_cast<int>(kept.size());
  out.reps_failed = cfg.reps - out.reps_used;
  require(kept.size() >= 2,
          "empirical_variance_ratio: fewer than 2 converged reps");

  Matrix mean_plain = Matrix::Zero(m, cfg.rank);
  Matrix mean_weighted = Matrix::Zero(m, cfg.rank);
  for (std::size_t i : kept) {
    mean_plain += plain[i];
    mean_weighted += weighted[i];
  }
  const double used = static_cast<double>(kept.size());
  mean_plain /= used;
  mean_weighted /= used;
  double var_plain = 0.0;
  double var_weighted = 0.0;
  for (std::size_t i : kept) {
    var_plain += (plain[i] - mean_plain).squaredNorm();
    var_weighted += (weighted[i] - mean_weighted).squaredNorm();
  }
  var_plain /= used - 1.0;
  var_weighted /= used - 1.0;
  require(var_plain > 0.0,
          "empirical_variance_ratio: degenerate unweighted variance");
  out.empirical = var_weighted / var_plain;
  return out;
}

}  // namespace dbmd
