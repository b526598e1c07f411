#pragma once

#include <vector>

#include "dbmd/matrix.hpp"

namespace dbmd {

// Maximum-weight perfect assignment on a square weight matrix (shortest
// augmenting path, O(n^3)). Returns the column assigned to each row.
std::vector<int> hungarian_assignment(const Matrix& weight);

// Fraction of samples whose predicted cluster maps onto their true class
// under the best one-to-one relabeling. The contingency table is zero-padded
// to a square of side max(k_pred, k_true).
double hungarian_accuracy(const std::vector<int>& pred,
                          const std::vector<int>& truth, int k_pred,
                          int k_true);

// Same, inferring each class count as max(label) + 1.
double hungarian_accuracy(const std::vector<int>& pred,
                          const std::vector<int>& truth);

}  // namespace dbmd
