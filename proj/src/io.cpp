#include "dbmd/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

namespace dbmd {

namespace {

constexpr char kMagic[5] = {'D', 'B', 'M', 'D', '1'};

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error(path + ": " + what);
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

bool parse_double(const std::string& token, double* out) {
  const std::string t = trim(token);
  if (t.empty()) return false;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) return false;
  *out = v;
  return true;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

Matrix load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open");
  std::vector<std::vector<double>> samples;
  std::string line;
  std::size_t lineno = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    std::vector<double> row(fields.size());
    bool numeric = true;
    std::size_t bad_token = 0;
    for (std::size_t t = 0; t < fields.size(); ++t) {
      if (!parse_double(fields[t], &row[t])) {
        numeric = false;
        bad_token = t;
        break;
      }
    }
    if (!numeric) {
      if (lineno == 1 && samples.empty()) continue;  // header line
      fail(path, "line " + std::to_string(lineno) + ": field " +
                     std::to_string(bad_token + 1) + " ('" +
                     trim(fields[bad_token]) + "') is not a number");
    }
    for (double v : row) {
      if (!std::isfinite(v)) {
        fail(path, "line " + std::to_string(lineno) + ": non-finite value");
      }
    }
    if (samples.empty()) {
      width = row.size();
    } else if (row.size() != width) {
      fail(path, "line " + std::to_string(lineno) + ": expected " +
                     std::to_string(width) + " fields, got " +
                     std::to_string(row.size()));
    }
    samples.push_back(std::move(row));
  }
  if (samples.empty()) fail(path, "no numeric rows");
  Matrix m(static_cast<Eigen::Index>(width),
           static_cast<Eigen::Index>(samples.size()));
  for (std::size_t j = 0; j < samples.size(); ++j) {
    for (std::size_t i = 0; i < width; ++i) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          samples[j][i];
    }
  }
  return m;
}

void save_csv(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) fail(path, "cannot open for writing");
  char buf[40];
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
      out << buf;
      if (i + 1 < m.rows()) out << ',';
    }
    out << '\n';
  }
  if (!out) fail(path, "write failed");
}

Matrix load_bin(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open");
  char magic[5];
  in.read(magic, 5);
  if (in.gcount() != 5 || std::memcmp(magic, kMagic, 5) != 0) {
    fail(path, "bad magic (not a DBMD1 matrix file)");
  }
  std::uint64_t dims[2];
  in.read(reinterpret_cast<char*>(dims), sizeof(dims));
  if (in.gcount() != sizeof(dims)) {
    fail(path, "truncated header: expected 16 dimension bytes after magic");
  }
  const std::uint64_t rows = dims[0];
  const std::uint64_t cols = dims[1];
  if (rows == 0 || cols == 0 || rows > (1ULL << 32) || cols > (1ULL << 32)) {
    fail(path, "implausible dimensions " + std::to_string(rows) + "x" +
                   std::to_string(cols));
  }
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  const std::streamsize bytes =
      static_cast<std::streamsize>(rows * cols * sizeof(double));
  in.read(reinterpret_cast<char*>(m.data()), bytes);
  if (in.gcount() != bytes) {
    fail(path, "truncated payload at byte " +
                   std::to_string(21 + in.gcount()) + ": expected " +
                   std::to_string(bytes) + " payload bytes");
  }
  if (!m.allFinite()) fail(path, "non-finite values in payload");
  return m;
}

void save_bin(const std::string& path, const Matrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot open for writing");
  out.write(kMagic, 5);
  const std::uint64_t dims[2] = {static_cast<std::uint64_t>(m.rows()),
                                 static_cast<std::uint64_t>(m.cols())};
  out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(m.size() * sizeof(double)));
  if (!out) fail(path, "write failed");
}

}  // namespace

MatrixFormat format_from_path(const std::string& path) {
  const auto dot = path.find_last_of('.');
  const std::string ext = dot == std::string::npos ? "" : path.substr(dot);
  if (ext == ".csv") return MatrixFormat::kCsv;
  if (ext == ".bin") return MatrixFormat::kBin;
  throw std::invalid_argument(path +
                              ": unknown extension (expected .csv or .bin)");
}

Matrix load_matrix(const std::string& path, MatrixFormat format) {
  return format == MatrixFormat::kCsv ? load_csv(path) : load_bin(path);
}

void save_matrix(const std::string& path, const Matrix& m,
                 MatrixFormat format) {
  require(m.size() > 0, "save_matrix: empty matrix");
  if (format == MatrixFormat::kCsv) {
    save_csv(path, m);
  } else {
    save_bin(path, m);
  }
}

std::vector<int> load_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open");
  std::vector<int> labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    double v = 0.0;
    if (!parse_double(t, &v)) {
      if (lineno == 1 && labels.empty()) continue;  // header line
      fail(path, "line " + std::to_string(lineno) + ": '" + t +
                     "' is not an integer label");
    }
    const int label = static_cast<int>(v);
    if (static_cast<double>(label) != v || label < 0) {
      fail(path, "line " + std::to_string(lineno) +
                     ": labels must be non-negative integers");
    }
    labels.push_back(label);
  }
  if (labels.empty()) fail(path, "no labels");
  return labels;
}

void save_labels(const std::string& path, const std::vector<int>& labels) {
  require(!labels.empty(), "save_labels: no labels");
  std::ofstream out(path);
  if (!out) fail(path, "cannot open for writing");
  for (int label : labels) out << label << '\n';
  if (!out) fail(path, "write failed");
}

}  // namespace dbmd
