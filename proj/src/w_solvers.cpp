#include "dbmd/w_solvers.hpp"

#include <cmath>

#include "dbmd/noise.hpp"
#include "dbmd/numerics.hpp"
#include "dbmd/threads.hpp"

namespace dbmd {

namespace {

// Gram-side sufficient statistics of one shard for a fixed coefficient
// block. All per-round work below is O(m r^2) through these.
struct ShardOps {
  Matrix gram_h;  // r x r
  Matrix xht;     // m x r
  double x_sq = 0.0;
};

ShardOps make_ops(const DataShard& shard, const Matrix& h) {
  return {gram(h), shard.x * h.transpose(), shard.x.squaredNorm()};
}

Matrix partial_grad(const ShardOps& ops, const Matrix& w) {
  return w * ops.gram_h - ops.xht;
}

double partial_value(const ShardOps& ops, const Matrix& w) {
  return 0.5 * (ops.x_sq - 2.0 * w.cwiseProduct(ops.xht).sum() +
                (w * ops.gram_h).cwiseProduct(w).sum());
}

double residual_objective(const std::vector<ShardOps>& ops, const Matrix& w,
                          double lambda) {
  double total = lambda * w.lpNorm<1>();
  for (const auto& o : ops) total += partial_value(o, w);
  return total;
}

// Solves W (A) = B for W given the Cholesky factor of the SPD matrix A.
Matrix right_solve(const Eigen::LLT<Matrix>& llt, const Matrix& b) {
  return llt.solve(b.transpose()).transpose();
}

Eigen::LLT<Matrix> factor_shifted_gram(const Matrix& gram_h, double shift,
                                       const char* who) {
  Matrix a = gram_h;
  a.diagonal().array() += shift;
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error(std::string(who) +
                             ": local system not positive definite (increase "
                             "the ridge parameter)");
  }
  return llt;
}

std::vector<double> resolve_weights(const ModelState& state, std::size_t count,
                                    bool weighted) {
  if (!weighted) return {};
  require(state.sigma2.size() == count,
          "weighted basis update requires one sigma2 estimate per shard");
  for (double s2 : state.sigma2) {
    require(s2 > 0.0, "weighted basis update: sigma2 must be positive");
  }
  return state.sigma2;
}

}  // namespace

Matrix fista_prox_solve(const GradFn& smooth_grad, double lipschitz_bound,
                        double lambda, const Matrix& start, double tol,
                        int max_iters) {
  require(lipschitz_bound > 0.0, "fista_prox_solve: lipschitz bound must be positive");
  require(lambda >= 0.0, "fista_prox_solve: lambda must be >= 0");
  require(tol > 0.0, "fista_prox_solve: tol must be positive");
  require(max_iters >= 1, "fista_prox_solve: max_iters must be >= 1");
  const double stop = tol * std::max(start.norm(), 1.0);
  Matrix w = start;
  Matrix y = start;
  double momentum = 1.0;
  for (int it = 0; it < max_iters; ++it) {
    Matrix next = soft_threshold(y - smooth_grad(y) / lipschitz_bound,
                                 lambda / lipschitz_bound);
    const double momentum_next =
        0.5 * (1.0 + std::sqrt(4.0 * momentum * momentum + 1.0));
    y = next + ((momentum - 1.0) / momentum_next) * (next - w);
    const double moved = (next - w).norm();
    w = std::move(next);
    momentum = momentum_next;
    if (moved <= stop) break;
  }
  return w;
}

AgdState agd_round(const AgdState& state, const std::vector<Matrix>& gradients,
                   double lambda) {
  require(!gradients.empty(), "agd_round: no gradients");
  require(state.lipschitz > 0.0, "agd_round: lipschitz must be positive");
  require(lambda >= 0.0, "agd_round: lambda must be >= 0");
  Matrix pooled = gradients[0];
  for (std::size_t c = 1; c < gradients.size(); ++c) {
    require_same_shape(pooled, gradients[c], "agd_round gradients");
    pooled += gradients[c];
  }
  require_same_shape(pooled, state.y, "agd_round gradient vs search point");

  AgdState next;
  next.lipschitz = state.lipschitz;
  next.w = soft_threshold(state.y - pooled / state.lipschitz,
                          lambda / state.lipschitz);
  next.momentum =
      0.5 * (1.0 + std::sqrt(4.0 * state.momentum * state.momentum + 1.0));
  next.y = next.w + ((state.momentum - 1.0) / next.momentum) *
                        (next.w - state.w);
  next.w_prev = state.w;
  return next;
}

Matrix admm_local_w(const DataShard& shard, const Matrix& h,
                    const Matrix& u_dual, const Matrix& w_global, double rho) {
  require(rho > 0.0, "admm_local_w: rho must be positive");
  require(h.cols() == shard.cols(), "admm_local_w: coefficient block width");
  require(w_global.rows() == shard.rows() && w_global.cols() == h.rows(),
          "admm_local_w: basis shape mismatch");
  require_same_shape(u_dual, w_global, "admm_local_w dual");
  const auto llt = factor_shifted_gram(gram(h), rho, "admm_local_w");
  const Matrix b = shard.x * h.transpose() + u_dual + rho * w_global;
  return right_solve(llt, b);
}

Matrix admm_aggregate(const std::vector<Matrix>& w_local,
                      const std::vector<Matrix>& u_dual, double rho,
                      double lambda, bool weighted,
                      const std::vector<double>* sigma2) {
  const std::size_t count = w_local.size();
  require(count >= 1, "admm_aggregate: no worker bases");
  require(u_dual.size() == count, "admm_aggregate: one dual per worker");
  require(rho > 0.0, "admm_aggregate: rho must be positive");
  require(lambda >= 0.0, "admm_aggregate: lambda must be >= 0");
  std::vector<Matrix> shifted(count);
  for (std::size_t c = 0; c < count; ++c) {
    require_same_shape(w_local[c], u_dual[c], "admm_aggregate worker state");
    shifted[c] = w_local[c] - u_dual[c] / rho;
  }
  Matrix avg;
  if (weighted) {
    require(sigma2 != nullptr, "admm_aggregate: weighted mode needs sigma2");
    avg = weighted_mean(shifted, *sigma2);
  } else {
    avg = shifted[0];
    for (std::size_t c = 1; c < count; ++c) avg += shifted[c];
    avg /= static_cast<double>(count);
  }
  return soft_threshold(avg, lambda / (static_cast<double>(count) * rho));
}

Matrix admm_dual_update(const Matrix& u_dual, const Matrix& w_global,
                        const Matrix& w_local, double rho) {
  require(rho > 0.0, "admm_dual_update: rho must be positive");
  require_same_shape(u_dual, w_global, "admm_dual_update dual vs basis");
  require_same_shape(w_global, w_local, "admm_dual_update bases");
  return u_dual + rho * (w_global - w_local);
}

Matrix cease_local(const DataShard& shard, const Matrix& h,
                   const Matrix& w_anchor, const Matrix& local_grad,
                   const Matrix& global_grad, double gamma, double lambda) {
  require(gamma >= 0.0, "cease_local: gamma must be >= 0");
  require(lambda >= 0.0, "cease_local: lambda must be >= 0");
  require(h.cols() == shard.cols(), "cease_local: coefficient block width");
  require(w_anchor.rows() == shard.rows() && w_anchor.cols() == h.rows(),
          "cease_local: basis shape mismatch");
  require_same_shape(local_grad, w_anchor, "cease_local local gradient");
  require_same_shape(global_grad, w_anchor, "cease_local pooled gradient");
  const Matrix gram_h = gram(h);
  const Matrix xht = shard.x * h.transpose();
  const Matrix rhs = xht + (local_grad - global_grad) + gamma * w_anchor;
  if (lambda == 0.0) {
    const auto llt = factor_shifted_gram(gram_h, gamma, "cease_local");
    return right_solve(llt, rhs);
  }
  const double lipschitz = spectral_norm(gram_h) + gamma;
  const GradFn grad = [&](const Matrix& w) {
    return w * gram_h + gamma * w - rhs;
  };
  return fista_prox_solve(grad, lipschitz, lambda, w_anchor, 1e-6, 500);
}

Matrix cease_aggregate(const std::vector<Matrix>& w_local,
                       const std::vector<double>& sigma2, bool weighted) {
  require(!w_local.empty(), "cease_aggregate: no worker bases");
  if (weighted) return weighted_mean(w_local, sigma2);
  Matrix avg = w_local[0];
  for (std::size_t c = 1; c < w_local.size(); ++c) {
    require_same_shape(avg, w_local[c], "cease_aggregate worker bases");
    avg += w_local[c];
  }
  return avg / static_cast<double>(w_local.size());
}

Matrix cease_grad_aggregate(const std::vector<Matrix>& grads,
                            const std::vector<double>& sigma2, bool weighted) {
  require(!grads.empty(), "cease_grad_aggregate: no gradients");
  if (weighted) return weighted_mean(grads, sigma2);
  Matrix avg = grads[0];
  for (std::size_t c = 1; c < grads.size(); ++c) {
    require_same_shape(avg, grads[c], "cease_grad_aggregate gradients");
    avg += grads[c];
  }
  return avg / static_cast<double>(grads.size());
}

WUpdateResult run_w_update(Strategy strategy, ModelState& state,
                           const std::vector<DataShard>& shards,
                           const Hyperparams& hp, CommLedger& ledger,
                           bool record_trace) {
  const std::size_t count = shards.size();
  require(count >= 1, "run_w_update: no shards");
  require(state.h.size() == count, "run_w_update: one coefficient block per shard");
  const Eigen::Index m = shards[0].rows();
  const Eigen::Index r = hp.rank;
  require(state.w.rows() == m && state.w.cols() == r,
          "run_w_update: basis shape mismatch");
  require(hp.w_tol > 0.0, "run_w_update: w_tol must be positive");
  require(hp.max_w_iters >= 1, "run_w_update: max_w_iters must be >= 1");
  require(hp.lambda >= 0.0, "run_w_update: lambda must be >= 0");
  for (std::size_t c = 0; c < count; ++c) {
    require(shards[c].rows() == m, "run_w_update: shard row mismatch");
    require(state.h[c].rows() == r && state.h[c].cols() == shards[c].cols(),
            "run_w_update: coefficient block shape mismatch");
  }
  const int num = static_cast<int>(count);
  const std::uint64_t entries =
      static_cast<std::uint64_t>(m) * static_cast<std::uint64_t>(r);

  std::vector<ShardOps> ops(count);
  parallel_for(num, [&](int c) {
    ops[static_cast<std::size_t>(c)] =
        make_ops(shards[static_cast<std::size_t>(c)],
                 state.h[static_cast<std::size_t>(c)]);
  });

  const std::vector<double> weights = resolve_weights(state, count, hp.weighted);
  const double w0_norm = state.w.norm();
  const double stop = hp.w_tol * (w0_norm > 0.0 ? w0_norm : 1.0);

  WUpdateResult result;
  auto record = [&](const Matrix& w, double moved, double primal) {
    if (record_trace) {
      result.trace.push_back(
          {residual_objective(ops, w, hp.lambda), moved, primal});
    }
  };

  if (strategy == Strategy::kAgd) {
    Matrix total_gram = ops[0].gram_h;
    for (std::size_t c = 1; c < count; ++c) total_gram += ops[c].gram_h;
    const double lipschitz = spectral_norm(total_gram);
    require(lipschitz > 0.0, "run_w_update: degenerate coefficients");
    require(hp.agd_min_iters >= 1, "run_w_update: agd_min_iters must be >= 1");

    AgdState ag{state.w, state.w, state.w, 1.0, lipschitz};
    std::vector<Matrix> grads(count);
    for (int k = 1; k <= hp.max_w_iters; ++k) {
      parallel_for(num, [&](int c) {
        grads[static_cast<std::size_t>(c)] =
            partial_grad(ops[static_cast<std::size_t>(c)], ag.y);
      });
      ledger.add_collect(entries);
      AgdState next = agd_round(ag, grads, hp.lambda);
      ledger.add_broadcast(entries);
      ++ledger.agd_rounds;
      ++result.rounds;
      const double moved = (next.w - ag.w).norm();
      ag = std::move(next);
      require_finite(ag.w, "accelerated basis update");
      record(ag.w, moved, 0.0);
      if (k >= hp.agd_min_iters && moved <= stop) {
        result.converged = true;
        break;
      }
    }
    state.w = ag.w;
    return result;
  }

  if (strategy == Strategy::kAdmm) {
    require(hp.rho > 0.0, "run_w_update: rho must be positive");
    if (state.w_local.size() != count) state.w_local.assign(count, state.w);
    if (state.u_dual.size() != count) {
      state.u_dual.assign(count, Matrix::Zero(m, r));
    }
    std::vector<Eigen::LLT<Matrix>> llts(count);
    parallel_for(num, [&](int ci) {
      const auto c = static_cast<std::size_t>(ci);
      llts[c] = factor_shifted_gram(ops[c].gram_h, hp.rho, "run_w_update");
    });
    for (int k = 1; k <= hp.max_w_iters; ++k) {
      parallel_for(num, [&](int ci) {
        const auto c = static_cast<std::size_t>(ci);
        const Matrix b = ops[c].xht + state.u_dual[c] + hp.rho * state.w;
        state.w_local[c] = right_solve(llts[c], b);
      });
      ledger.add_collect(entries);
      Matrix next =
          admm_aggregate(state.w_local, state.u_dual, hp.rho, hp.lambda,
                         hp.weighted, hp.weighted ? &weights : nullptr);
      ledger.add_broadcast(entries);
      ++ledger.admm_rounds;
      ++result.rounds;
      parallel_for(num, [&](int ci) {
        const auto c = static_cast<std::size_t>(ci);
        state.u_dual[c] =
            admm_dual_update(state.u_dual[c], next, state.w_local[c], hp.rho);
      });
      const double moved = (next - state.w).norm();
      state.w = std::move(next);
      require_finite(state.w, "consensus basis update");
      if (record_trace) {
        double primal = 0.0;
        for (std::size_t c = 0; c < count; ++c) {
          primal += (state.w - state.w_local[c]).norm();
        }
        record(state.w, moved, primal);
      }
      if (moved <= stop) {
        result.converged = true;
        break;
      }
    }
    return result;
  }

  // Surrogate-loss strategy.
  require(hp.gamma >= 0.0, "run_w_update: gamma must be >= 0");
  if (state.w_local.size() != count) state.w_local.assign(count, state.w);
  const double lambda_share = hp.lambda / static_cast<double>(count);
  std::vector<Eigen::LLT<Matrix>> llts;
  std::vector<double> local_lipschitz(count, 0.0);
  if (hp.lambda == 0.0) {
    llts.resize(count);
    parallel_for(num, [&](int ci) {
      const auto c = static_cast<std::size_t>(ci);
      llts[c] = factor_shifted_gram(ops[c].gram_h, hp.gamma, "run_w_update");
    });
  } else {
    parallel_for(num, [&](int ci) {
      const auto c = static_cast<std::size_t>(ci);
      local_lipschitz[c] = spectral_norm(ops[c].gram_h) + hp.gamma;
    });
  }
  std::vector<Matrix> grads(count);
  for (int k = 1; k <= hp.max_w_iters; ++k) {
    parallel_for(num, [&](int ci) {
      const auto c = static_cast<std::size_t>(ci);
      grads[c] = partial_grad(ops[c], state.w);
    });
    ledger.add_collect(entries);
    const Matrix pooled = cease_grad_aggregate(grads, weights, hp.weighted);
    ledger.add_broadcast(entries);
    parallel_for(num, [&](int ci) {
      const auto c = static_cast<std::size_t>(ci);
      const Matrix rhs =
          ops[c].xht + (grads[c] - pooled) + hp.gamma * state.w;
      if (hp.lambda == 0.0) {
        state.w_local[c] = right_solve(llts[c], rhs);
      } else {
        const Matrix& gram_h = ops[c].gram_h;
        const double gamma = hp.gamma;
        const GradFn grad = [&gram_h, gamma, &rhs](const Matrix& w) {
          return w * gram_h + gamma * w - rhs;
        };
        state.w_local[c] = fista_prox_solve(grad, local_lipschitz[c],
                                            lambda_share, state.w, 1e-6, 500);
      }
    });
    ledger.add_collect(entries);
    Matrix next = cease_aggregate(state.w_local, weights, hp.weighted);
    ledger.add_broadcast(entries);
    ++ledger.cease_rounds;
    ++result.rounds;
    const double moved = (next - state.w).norm();
    state.w = std::move(next);
    require_finite(state.w, "surrogate basis update");
    record(state.w, moved, 0.0);
    if (moved <= stop) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace dbmd
