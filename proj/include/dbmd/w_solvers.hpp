#pragma once

#include <functional>
#include <vector>

#include "dbmd/comm.hpp"
#include "dbmd/model.hpp"

namespace dbmd {

// Proximal accelerated gradient loop for min_W g(W) + lambda ||W||_1 with
// g smooth and lipschitz_bound >= L(g). Stops when the iterate moves by at
// most tol * max(||start||_F, 1).
using GradFn = std::function<Matrix(const Matrix&)>;
Matrix fista_prox_solve(const GradFn& smooth_grad, double lipschitz_bound,
                        double lambda, const Matrix& start, double tol,
                        int max_iters);

// One accelerated round of the gradient-pooling strategy. gradients holds the
// per-worker gradients evaluated at state.y; lipschitz must be
// ||sum_c H_c H_c^T||_2 for the current coefficients.
struct AgdState {
  Matrix w;
  Matrix y;
  Matrix w_prev;
  double momentum = 1.0;
  double lipschitz = 0.0;
};
AgdState agd_round(const AgdState& state, const std::vector<Matrix>& gradients,
                   double lambda);

// Consensus strategy, one worker step: ridge-regularized local basis solve
// around the shared iterate.
Matrix admm_local_w(const DataShard& shard, const Matrix& h,
                    const Matrix& u_dual, const Matrix& w_global, double rho);

// Consensus strategy, coordinator step: soft-thresholded (optionally
// noise-weighted) average of the worker bases and duals.
Matrix admm_aggregate(const std::vector<Matrix>& w_local,
                      const std::vector<Matrix>& u_dual, double rho,
                      double lambda, bool weighted = false,
                      const std::vector<double>* sigma2 = nullptr);

Matrix admm_dual_update(const Matrix& u_dual, const Matrix& w_global,
                        const Matrix& w_local, double rho);

// Surrogate-loss strategy, one worker step: minimizes the local objective
// with its gradient tilted toward the pooled one plus a proximal term.
// lambda here is the share of the L1 weight this worker carries.
Matrix cease_local(const DataShard& shard, const Matrix& h,
                   const Matrix& w_anchor, const Matrix& local_grad,
                   const Matrix& global_grad, double gamma, double lambda);

Matrix cease_aggregate(const std::vector<Matrix>& w_local,
                       const std::vector<double>& sigma2, bool weighted);

Matrix cease_grad_aggregate(const std::vector<Matrix>& grads,
                            const std::vector<double>& sigma2, bool weighted);

struct RoundTrace {
  double objective = 0.0;       // residual + L1 value at the shared iterate
  double step_norm = 0.0;       // ||W_k - W_{k-1}||_F
  double primal_residual = 0.0; // consensus gap, zero for non-consensus runs
};

struct WUpdateResult {
  int rounds = 0;
  bool converged = false;
  std::vector<RoundTrace> trace;
};

// Runs one full basis update with the chosen strategy, mutating state.w (and
// the per-shard bases/duals for the consensus and surrogate strategies) and
// charging every coordinator round to the ledger. Stops when the shared
// iterate moves by at most w_tol * ||W_0||_F (or after max_w_iters rounds);
// the accelerated strategy always runs at least agd_min_iters rounds.
WUpdateResult run_w_update(Strategy strategy, ModelState& state,
                           const std::vector<DataShard>& shards,
                           const Hyperparams& hp, CommLedger& ledger,
                           bool record_trace = false);

}  // namespace dbmd
