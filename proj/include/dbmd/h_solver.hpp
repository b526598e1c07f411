#pragma once

#include <vector>

#include "dbmd/model.hpp"

namespace dbmd {

// Multiplicative-update pass over one shard's coefficients. Each column
// minimizes 0.5 ||x_j - W h||^2 - sum_k alpha_k ln h_k over probability
// vectors floored at epsilon_h, by exponentiated-gradient steps with a
// backtracking step size; accepted steps never increase the column value.
// Columns of h0 must already be feasible.
Matrix update_h(const DataShard& shard, const Matrix& w, const Matrix& h0,
                const Hyperparams& hp);

// Row index of the largest coefficient per column; ties take the smallest
// index.
std::vector<int> assign_clusters(const Matrix& h);

}  // namespace dbmd
