#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dbmd/comm.hpp"
#include "dbmd/model.hpp"

namespace dbmd {

// Column partitions: contiguous blocks of ceil(n / workers) columns, or
// round-robin by column index.
enum class PartitionScheme { kContiguous, kStrided };

std::vector<DataShard> partition(const Matrix& x, int workers,
                                 PartitionScheme scheme);

struct RunConfig {
  Strategy strategy = Strategy::kAdmm;
  int workers = 1;
  Hyperparams hp;
};

struct OuterRound {
  double objective = 0.0;        // unit-variance form
  double objective_sigma = 0.0;  // with the live noise estimates
  int w_rounds = 0;
  bool w_converged = false;
  std::vector<double> sigma2;
};

struct FitReport {
  bool converged = false;
  double initial_objective = 0.0;
  double wall_time_s = 0.0;
  std::vector<OuterRound> rounds;
  CommLedger comm;

  // Metrics document, schema "dbmd/1".
  std::string to_json_string(const RunConfig& cfg) const;
};

// Alternating estimation driven by a simulated coordinator: one basis update
// with the configured strategy, a coefficient pass on every shard, then a
// noise re-estimate per shard (against the worker's own basis for the
// consensus and surrogate strategies, the shared one otherwise). Stops when
// the unit-variance objective changes by at most
// outer_tol * max(1, |previous|).
std::pair<ModelState, FitReport> fit(const std::vector<DataShard>& shards,
                                     const RunConfig& cfg);

}  // namespace dbmd
