#include "dbmd/clustering.hpp"

#include <limits>

namespace dbmd {

namespace {

// Shortest-augmenting-path solver for the min-cost square assignment, with
// dual potentials on both sides. Indices are offset by one so column 0 can
// serve as the sentinel start of each augmenting path.
std::vector<int> min_cost_assignment(const Matrix& cost) {
  const int n = static_cast<int>(cost.rows());
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<int> matched_row(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> previous(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    matched_row[0] = i;
    int j0 = 0;
    std::vector<double> min_reduced(static_cast<std::size_t>(n) + 1, kInf);
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = matched_row[static_cast<std::size_t>(j0)];
      double delta = kInf;
      int j1 = -1;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double reduced =
            cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
            v[static_cast<std::size_t>(j)];
        if (reduced < min_reduced[static_cast<std::size_t>(j)]) {
          min_reduced[static_cast<std::size_t>(j)] = reduced;
          previous[static_cast<std::size_t>(j)] = j0;
        }
        if (min_reduced[static_cast<std::size_t>(j)] < delta) {
          delta = min_reduced[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(
              matched_row[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          min_reduced[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (matched_row[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = previous[static_cast<std::size_t>(j0)];
      matched_row[static_cast<std::size_t>(j0)] =
          matched_row[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j) {
    const int i = matched_row[static_cast<std::size_t>(j)];
    if (i > 0) row_to_col[static_cast<std::size_t>(i - 1)] = j - 1;
  }
  return row_to_col;
}

}  // namespace

std::vector<int> hungarian_assignment(const Matrix& weight) {
  require(weight.rows() == weight.cols(),
          "hungarian_assignment: matrix must be square");
  require(weight.rows() >= 1, "hungarian_assignment: empty matrix");
  require(weight.allFinite(), "hungarian_assignment: non-finite weights");
  return min_cost_assignment(-weight);
}

double hungarian_accuracy(const std::vector<int>& pred,
                          const std::vector<int>& truth, int k_pred,
                          int k_true) {
  require(!pred.empty(), "hungarian_accuracy: no samples");
  require(pred.size() == truth.size(),
          "hungarian_accuracy: label vectors differ in length");
  require(k_pred >= 1 && k_true >= 1,
          "hungarian_accuracy: class counts must be >= 1");
  const int k = std::max(k_pred, k_true);
  Matrix weight = Matrix::Zero(k, k);
  for (std::size_t s = 0; s < pred.size(); ++s) {
    require(pred[s] >= 0 && pred[s] < k_pred,
            "hungarian_accuracy: predicted label out of range");
    require(truth[s] >= 0 && truth[s] < k_true,
            "hungarian_accuracy: true label out of range");
    weight(pred[s], truth[s]) += 1.0;
  }
  const auto mapping = hungarian_assignment(weight);
  double matched = 0.0;
  for (int i = 0; i < k; ++i) matched += weight(i, mapping[static_cast<std::size_t>(i)]);
  return matched / static_cast<double>(pred.size());
}

double hungarian_accuracy(const std::vector<int>& pred,
                          const std::vector<int>& truth) {
  require(!pred.empty(), "hungarian_accuracy: no samples");
  int k_pred = 0;
  int k_true = 0;
  for (int label : pred) k_pred = std::max(k_pred, label + 1);
  for (int label : truth) k_true = std::max(k_true, label + 1);
  return hungarian_accuracy(pred, truth, k_pred, k_true);
}

}  // namespace dbmd
