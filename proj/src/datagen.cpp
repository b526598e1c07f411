#include "dbmd/datagen.hpp"

#include "dbmd/rng.hpp"

namespace dbmd {

Matrix gen_basis(double value, int support, int overlap, int rank) {
  require(rank >= 1, "gen_basis: rank must be >= 1");
  require(support >= 1, "gen_basis: support must be >= 1");
  require(overlap >= 0 && overlap < support,
          "gen_basis: overlap must lie in [0, support)");
  const int rows = support + (rank - 1) * (support - overlap);
  Matrix w = Matrix::Zero(rows, rank);
  for (int k = 0; k < rank; ++k) {
    const int start = k * (support - overlap);
    w.block(start, k, support, 1).setConstant(value);
  }
  return w;
}

Matrix gen_h_bernoulli(int rank, int cols, double p, std::uint64_t seed) {
  require(rank >= 1, "gen_h_bernoulli: rank must be >= 1");
  require(cols >= 1, "gen_h_bernoulli: cols must be >= 1");
  require(p >= 0.0 && p <= 1.0, "gen_h_bernoulli: p must lie in [0, 1]");
  CounterRng rng(CounterRng::derive(seed, kStreamBernoulli));
  Matrix h(rank, cols);
  for (int j = 0; j < cols; ++j) {
    for (int k = 0; k < rank; ++k) {
      h(k, j) = rng.next_open01() < p ? 1.0 : 0.0;
    }
    double total = h.col(j).sum();
    if (total == 0.0) {
      h(rank - 1, j) = 1.0;
      total = 1.0;
    }
    h.col(j) /= total;
  }
  return h;
}

Matrix gen_h_dirichlet(int rank, int cols, const Vector& alpha0,
                       std::uint64_t seed) {
  require(rank >= 1, "gen_h_dirichlet: rank must be >= 1");
  require(cols >= 1, "gen_h_dirichlet: cols must be >= 1");
  require(alpha0.size() == rank,
          "gen_h_dirichlet: alpha0 must have one entry per rank");
  require(alpha0.minCoeff() > 0.0,
          "gen_h_dirichlet: alpha0 entries must be positive");
  CounterRng rng(CounterRng::derive(seed, kStreamDirichlet));
  Matrix h(rank, cols);
  for (int j = 0; j < cols; ++j) {
    double total = 0.0;
    for (int k = 0; k < rank; ++k) {
      h(k, j) = rng.next_gamma(alpha0(k));
      total += h(k, j);
    }
    if (total <= 0.0) {
      h.col(j).setConstant(1.0 / rank);
    } else {
      h.col(j) /= total;
    }
  }
  return h;
}

std::vector<DataShard> gen_observations(const Matrix& w,
                                        const std::vector<Matrix>& h_blocks,
                                        const std::vector<double>& sigma,
                                        std::uint64_t seed) {
  require(!h_blocks.empty(), "gen_observations: no coefficient blocks");
  require(sigma.size() == h_blocks.size(),
          "gen_observations: one sigma per shard required");
  std::vector<DataShard> shards(h_blocks.size());
  for (std::size_t c = 0; c < h_blocks.size(); ++c) {
    require(h_blocks[c].rows() == w.cols(),
            "gen_observations: coefficient block rank mismatch");
    require(sigma[c] >= 0.0, "gen_observations: sigma must be >= 0");
    CounterRng rng(CounterRng::derive(seed, kStreamNoise, c));
    Matrix x = w * h_blocks[c];
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        x(i, j) += sigma[c] * rng.next_gaussian();
      }
    }
    shards[c].x = std::move(x);
    shards[c].sigma2 = std::max(sigma[c] * sigma[c], 1e-12);
  }
  return shards;
}

}  // namespace dbmd
