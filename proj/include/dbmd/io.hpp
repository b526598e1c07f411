#pragma once

#include <string>
#include <vector>

#include "dbmd/matrix.hpp"

namespace dbmd {

// On-disk conventions. In memory a sample is a column (features x samples).
// CSV holds one sample per line, so file row i becomes matrix column i; an
// optional first line of non-numeric field names is skipped. BIN is the
// 5-byte magic "DBMD1", then rows and cols as little-endian uint64, then
// rows * cols little-endian doubles in column-major order, dimensioned as
// the in-memory matrix.
enum class MatrixFormat { kCsv, kBin };

MatrixFormat format_from_path(const std::string& path);

Matrix load_matrix(const std::string& path, MatrixFormat format);
void save_matrix(const std::string& path, const Matrix& m,
                 MatrixFormat format);

// One integer class label per line.
std::vector<int> load_labels(const std::string& path);
void save_labels(const std::string& path, const std::vector<int>& labels);

struct LabeledDataset {
  Matrix x;
  std::vector<int> labels;  // empty when unlabeled
  int classes = 0;
};

}  // namespace dbmd
