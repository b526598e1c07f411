#pragma once

#include <cstdint>
#include <vector>

#include "dbmd/model.hpp"

namespace dbmd {

// Banded sparse basis: rank columns of constant value, each with `support`
// consecutive nonzero rows, consecutive columns overlapping in `overlap`
// rows. Row count is support + (rank - 1) * (support - overlap).
Matrix gen_basis(double value, int support, int overlap, int rank);

// Bernoulli(p) indicator columns normalized to the simplex; an all-zero draw
// gets its last entry set before normalizing. Draws run column by column,
// rows ascending.
Matrix gen_h_bernoulli(int rank, int cols, double p, std::uint64_t seed);

// Dirichlet(alpha0) columns via normalized gamma draws.
Matrix gen_h_dirichlet(int rank, int cols, const Vector& alpha0,
                       std::uint64_t seed);

// Per-worker observations X_c = W H_c + E_c with i.i.d. Gaussian noise of
// standard deviation sigma[c]; each shard's sigma2 field records the drawn
// variance (floored at 1e-12). Noise streams are forked per shard, so shard
// c's draw does not depend on the other shards.
std::vector<DataShard> gen_observations(const Matrix& w,
                                        const std::vector<Matrix>& h_blocks,
                                        const std::vector<double>& sigma,
                                        std::uint64_t seed);

}  // namespace dbmd
