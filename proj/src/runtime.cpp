#include "dbmd/runtime.hpp"

#include <chrono>
#include <cmath>

#include <json.hpp>

#include "dbmd/datagen.hpp"
#include "dbmd/h_solver.hpp"
#include "dbmd/noise.hpp"
#include "dbmd/rng.hpp"
#include "dbmd/threads.hpp"
#include "dbmd/w_solvers.hpp"

namespace dbmd {

std::vector<DataShard> partition(const Matrix& x, int workers,
                                 PartitionScheme scheme) {
  require(workers >= 1, "partition: workers must be >= 1");
  require(x.cols() >= workers,
          "partition: need at least one column per worker");
  const Eigen::Index n = x.cols();
  std::vector<DataShard> shards(static_cast<std::size_t>(workers));
  if (scheme == PartitionScheme::kContiguous) {
    const Eigen::Index chunk = (n + workers - 1) / workers;
    Eigen::Index start = 0;
    for (int c = 0; c < workers; ++c) {
      const Eigen::Index width = std::min(chunk, n - start);
      shards[static_cast<std::size_t>(c)].x = x.middleCols(start, width);
      start += width;
    }
  } else {
    for (int c = 0; c < workers; ++c) {
      const Eigen::Index width = (n - c + workers - 1) / workers;
      Matrix block(x.rows(), width);
      Eigen::Index out = 0;
      for (Eigen::Index j = c; j < n; j += workers) {
        block.col(out++) = x.col(j);
      }
      shards[static_cast<std::size_t>(c)].x = std::move(block);
    }
  }
  return shards;
}

std::string FitReport::to_json_string(const RunConfig& cfg) const {
  nlohmann::json doc;
  doc["schema"] = "dbmd/1";
  doc["solver"] = to_string(cfg.strategy);
  doc["workers"] = cfg.workers;
  doc["weighted"] = cfg.hp.weighted;
  doc["rank"] = cfg.hp.rank;
  doc["lambda"] = cfg.hp.lambda;
  doc["seed"] = cfg.hp.seed;
  doc["restarts"] = cfg.hp.restarts;
  doc["converged"] = converged;
  doc["wall_time_s"] = wall_time_s;
  std::vector<double> objectives{initial_objective};
  std::vector<double> objectives_sigma;
  std::vector<int> w_rounds;
  for (const auto& round : rounds) {
    objectives.push_back(round.objective);
    objectives_sigma.push_back(round.objective_sigma);
    w_rounds.push_back(round.w_rounds);
  }
  doc["objective"] = objectives;
  doc["objective_sigma"] = objectives_sigma;
  doc["w_rounds"] = w_rounds;
  if (!rounds.empty()) {
    doc["sigma2"] = rounds.back().sigma2;
    doc["final_objective"] = rounds.back().objective;
  }
  doc["comm"] = {{"broadcast_entries", comm.broadcast_entries},
                 {"collect_entries", comm.collect_entries},
                 {"total_entries", comm.total_entries()},
                 {"agd_rounds", comm.agd_rounds},
                 {"admm_rounds", comm.admm_rounds},
                 {"cease_rounds", comm.cease_rounds}};
  return doc.dump(2);
}

namespace {

// One alternating run from the streams keyed by `seed`.
std::pair<ModelState, FitReport> fit_once(const std::vector<DataShard>& shards,
                                          const RunConfig& cfg,
                                          std::uint64_t seed) {
  const std::size_t count = shards.size();
  const Hyperparams& hp = cfg.hp;
  const Eigen::Index m = shards[0].rows();

  ModelState state;
  CounterRng w_rng(CounterRng::derive(seed, kStreamWInit));
  state.w.resize(m, hp.rank);
  for (Eigen::Index j = 0; j < state.w.cols(); ++j) {
    for (Eigen::Index i = 0; i < state.w.rows(); ++i) {
      state.w(i, j) = w_rng.next_gaussian();
    }
  }
  state.h.resize(count);
  const Vector ones = Vector::Ones(hp.rank);
  const double eps = hp.epsilon_h;
  for (std::size_t c = 0; c < count; ++c) {
    Matrix h = gen_h_dirichlet(hp.rank, static_cast<int>(shards[c].cols()),
                               ones, CounterRng::derive(seed, kStreamHInit, c));
    // Fold initial columns into the feasible interior.
    state.h[c] = (h.array() * (1.0 - hp.rank * eps) + eps).matrix();
  }
  state.w_local.assign(count, state.w);
  state.u_dual.assign(count, Matrix::Zero(m, hp.rank));
  state.sigma2.resize(count);
  for (std::size_t c = 0; c < count; ++c) state.sigma2[c] = shards[c].sigma2;

  FitReport report;
  const auto t0 = std::chrono::steady_clock::now();
  report.initial_objective = objective_full(state, shards, hp, false);
  double prev = report.initial_objective;
  const int num = static_cast<int>(count);

  for (int outer = 0; outer < hp.max_outer; ++outer) {
    const auto w_result = run_w_update(cfg.strategy, state, shards, hp,
                                       report.comm, false);
    parallel_for(num, [&](int ci) {
      const auto c = static_cast<std::size_t>(ci);
      state.h[c] = update_h(shards[c], state.w, state.h[c], hp);
    });
    parallel_for(num, [&](int ci) {
      const auto c = static_cast<std::size_t>(ci);
      const Matrix& w_ref =
          cfg.strategy == Strategy::kAgd ? state.w : state.w_local[c];
      state.sigma2[c] = estimate_sigma2(shards[c], w_ref, state.h[c]);
    });

    OuterRound round;
    round.objective = objective_full(state, shards, hp, false);
    round.objective_sigma = objective_full(state, shards, hp, true);
    round.w_rounds = w_result.rounds;
    round.w_converged = w_result.converged;
    round.sigma2 = state.sigma2;
    report.rounds.push_back(std::move(round));

    const double current = report.rounds.back().objective;
    if (std::abs(current - prev) <= hp.outer_tol * std::max(1.0, std::abs(prev))) {
      report.converged = true;
      break;
    }
    prev = current;
  }

  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return {std::move(state), std::move(report)};
}

double final_objective(const FitReport& report) {
  return report.rounds.empty() ? report.initial_objective
                               : report.rounds.back().objective;
}

}  // namespace

std::pair<ModelState, FitReport> fit(const std::vector<DataShard>& shards,
                                     const RunConfig& cfg) {
  const std::size_t count = shards.size();
  require(count >= 1, "fit: no shards");
  require(cfg.workers == static_cast<int>(count),
          "fit: worker count must match the number of shards");
  cfg.hp.validate();
  const Eigen::Index m = shards[0].rows();
  for (const auto& shard : shards) {
    require(shard.rows() == m, "fit: shard row mismatch");
    require(shard.cols() >= 1, "fit: empty shard");
    require_finite(shard.x, "fit input");
  }

  // Multi-start: each restart reruns the whole alternation from freshly
  // derived initialization streams; the run with the lowest final objective
  // is kept. The reported ledger and wall time cover every start, the
  // trajectory is the winner's.
  std::pair<ModelState, FitReport> best;
  CommLedger total_comm;
  double total_wall = 0.0;
  for (int r = 0; r < cfg.hp.restarts; ++r) {
    const std::uint64_t seed =
        r == 0 ? cfg.hp.seed
               : CounterRng::derive(cfg.hp.seed, kStreamRestart,
                                    static_cast<std::uint64_t>(r));
    auto run = fit_once(shards, cfg, seed);
    total_comm.broadcast_entries += run.second.comm.broadcast_entries;
    total_comm.collect_entries += run.second.comm.collect_entries;
    total_comm.agd_rounds += run.second.comm.agd_rounds;
    total_comm.admm_rounds += run.second.comm.admm_rounds;
    total_comm.cease_rounds += run.second.comm.cease_rounds;
    total_wall += run.second.wall_time_s;
    if (r == 0 || final_objective(run.second) < final_objective(best.second)) {
      best = std::move(run);
    }
  }
  best.second.comm = total_comm;
  best.second.wall_time_s = total_wall;
  return best;
}

}  // namespace dbmd
