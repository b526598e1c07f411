#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dbmd/matrix.hpp"

namespace dbmd {

enum class Strategy { kAgd, kAdmm, kCease };

const char* to_string(Strategy s);
Strategy strategy_from_string(const std::string& name);

struct Hyperparams {
  int rank = 2;
  double lambda = 0.0;  // L1 weight on the basis
  // Simplex prior exponents, stored already shifted down by one, so the
  // coefficient penalty is -sum_k alpha[k] * ln h_k. Empty means all zero.
  Vector alpha;
  double rho = 50.0;    // consensus penalty
  double gamma = 0.001; // proximal weight in the surrogate-loss solver
  double w_tol = 1e-2;
  int max_w_iters = 1000;
  int agd_min_iters = 30;
  int max_outer = 50;
  double outer_tol = 1e-4;
  std::uint64_t seed = 0;
  bool weighted = false;
  double epsilon_h = 1e-8;  // interior floor for coefficient columns
  // Independent initializations of the alternating loop; the run with the
  // lowest final objective wins. The factorization is only determined up to
  // an invertible remix of the basis columns, so a single random start can
  // settle on a remix whose coefficient rows merge clusters; extra starts
  // with the L1 tie-break make that rare.
  int restarts = 1;

  // (alpha0 - 1) replicated over the rank; alpha0 must be >= 1.
  static Vector shifted_alpha(double alpha0, int rank);

  void validate() const;
  Vector alpha_or_zero() const;
};

// Column block of the data owned by one worker.
struct DataShard {
  Matrix x;             // m x n_c
  double sigma2 = 1.0;  // known (or generator-declared) noise variance

  Eigen::Index rows() const { return x.rows(); }
  Eigen::Index cols() const { return x.cols(); }
};

struct ModelState {
  Matrix w;                     // m x r shared basis
  std::vector<Matrix> h;        // r x n_c coefficients per shard
  std::vector<Matrix> w_local;  // per-shard basis iterates (admm, cease)
  std::vector<Matrix> u_dual;   // per-shard scaled duals (admm)
  std::vector<double> sigma2;   // live per-shard noise estimates
};

// Full negative log-posterior. With use_sigma the residual terms are scaled
// by 1/(2 sigma_c^2) and m n_c ln sigma_c is added per shard, reading the
// live estimates from state.sigma2; without it all sigma_c are taken as 1.
double objective_full(const ModelState& state,
                      const std::vector<DataShard>& shards,
                      const Hyperparams& hp, bool use_sigma);

// Residual-plus-penalty objective in W alone, with the coefficients fixed:
// sum_c 0.5 ||X_c - W H_c||_F^2 + lambda ||W||_1.
double objective_w(const Matrix& w, const std::vector<DataShard>& shards,
                   const std::vector<Matrix>& h_blocks, double lambda);

// Gradient of 0.5 ||X_c - W H_c||_F^2 in W.
Matrix grad_fc(const Matrix& w, const DataShard& shard, const Matrix& h);

// Smoothness constant of the pooled residual term: ||sum_c H_c H_c^T||_2.
double lipschitz_f(const std::vector<Matrix>& h_blocks);

}  // namespace dbmd
