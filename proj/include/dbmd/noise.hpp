#pragma once

#include <cstdint>
#include <vector>

#include "dbmd/model.hpp"

namespace dbmd {

// Mean squared residual of one shard against the basis it was fit with,
// floored at 1e-12.
double estimate_sigma2(const DataShard& shard, const Matrix& w_ref,
                       const Matrix& h);

// Inverse-variance weighted average: weights (1/sigma2_c) / sum_l (1/sigma2_l).
Matrix weighted_mean(const std::vector<Matrix>& mats,
                     const std::vector<double>& sigma2);

// Predicted variance of the weighted estimator relative to the plain average:
// the harmonic over the arithmetic mean of the shard variances. Always <= 1.
double variance_ratio_theoretical(const std::vector<double>& sigma2);

// Monte-Carlo counterpart over repeated noise draws on a fixed synthetic
// problem. Every rep regenerates only the observation noise, runs one basis
// update to convergence with and without weighting, and the per-entry
// variances of the two final bases are summed and divided.
struct VarianceRatioConfig {
  double basis_value = 1.5;
  int basis_support = 20;
  int basis_overlap = 2;
  int rank = 10;
  int cols_per_shard = 100;
  int workers = 5;
  double bernoulli_p = 0.1;
  std::vector<double> sigma;  // per-worker noise standard deviation
  Strategy strategy = Strategy::kAdmm;
  double rho = 50.0;
  double gamma = 1.0;
  double lambda = 0.0;
  int reps = 100;
  std::uint64_t seed = 0;
  double w_tol = 1e-6;
  int max_w_iters = 4000;
};

struct VarianceRatioResult {
  double empirical = 0.0;
  double theoretical = 0.0;
  int reps_used = 0;
  int reps_failed = 0;
};

VarianceRatioResult empirical_variance_ratio(const VarianceRatioConfig& cfg);

}  // namespace dbmd
