#include <doctest.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "dbmd/io.hpp"
#include "dbmd/rng.hpp"

using dbmd::Matrix;
using dbmd::MatrixFormat;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("dbmd_io_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols,
                     std::uint64_t key) {
  dbmd::CounterRng rng(key);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.next_gaussian();
  }
  return m;
}

void write_text(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  out << body;
}

}  // namespace

TEST_CASE("format_from_path keys on the extension") {
  CHECK(dbmd::format_from_path("data.csv") == MatrixFormat::kCsv);
  CHECK(dbmd::format_from_path("/a/b.c/data.bin") == MatrixFormat::kBin);
  CHECK_THROWS_AS(dbmd::format_from_path("data.txt"), std::invalid_argument);
  CHECK_THROWS_AS(dbmd::format_from_path("data"), std::invalid_argument);
}

TEST_CASE("csv round-trip is exact and transposes samples to columns") {
  TempDir dir;
  const Matrix m = random_matrix(5, 9, 31);
  const std::string path = dir.file("m.csv");
  dbmd::save_matrix(path, m, MatrixFormat::kCsv);
  const Matrix back = dbmd::load_matrix(path, MatrixFormat::kCsv);
  REQUIRE(back.rows() == 5);
  REQUIRE(back.cols() == 9);
  CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);

  // Each file line is one sample, so the file has cols lines of rows fields.
  std::ifstream in(path);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    ++lines;
    CHECK(std::count(line.begin(), line.end(), ',') == 4);
  }
  CHECK(lines == 9);
}

TEST_CASE("csv loader skips a header line and flags bad fields") {
  TempDir dir;
  const std::string path = dir.file("h.csv");
  write_text(path, "geneA,geneB\n1.5,2.5\n-3,4e2\n");
  const Matrix m = dbmd::load_matrix(path, MatrixFormat::kCsv);
  REQUIRE(m.rows() == 2);
  REQUIRE(m.cols() == 2);
  CHECK(m(0, 0) == 1.5);
  CHECK(m(1, 1) == 400.0);

  write_text(dir.file("bad.csv"), "1,2\n3,oops\n");
  try {
    dbmd::load_matrix(dir.file("bad.csv"), MatrixFormat::kCsv);
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(msg.find("field 2") != std::string::npos);
    CHECK(msg.find("oops") != std::string::npos);
  }

  write_text(dir.file("ragged.csv"), "1,2\n3\n");
  try {
    dbmd::load_matrix(dir.file("ragged.csv"), MatrixFormat::kCsv);
    FAIL("expected a width error");
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(msg.find("expected 2 fields") != std::string::npos);
  }

  write_text(dir.file("inf.csv"), "1,inf\n");
  CHECK_THROWS_AS(dbmd::load_matrix(dir.file("inf.csv"), MatrixFormat::kCsv),
                  std::runtime_error);
  write_text(dir.file("empty.csv"), "\n\n");
  CHECK_THROWS_AS(dbmd::load_matrix(dir.file("empty.csv"), MatrixFormat::kCsv),
                  std::runtime_error);
  CHECK_THROWS_AS(dbmd::load_matrix(dir.file("missing.csv"), MatrixFormat::kCsv),
                  std::runtime_error);
}

TEST_CASE("bin round-trip is bit-exact") {
  TempDir dir;
  const Matrix m = random_matrix(7, 3, 77);
  const std::string path = dir.file("m.bin");
  dbmd::save_matrix(path, m, MatrixFormat::kBin);
  const Matrix back = dbmd::load_matrix(path, MatrixFormat::kBin);
  REQUIRE(back.rows() == 7);
  REQUIRE(back.cols() == 3);
  CHECK((back.array() == m.array()).all());

  // 5 magic + 16 header + payload.
  CHECK(std::filesystem::file_size(path) == 5 + 16 + 7 * 3 * 8);
}

TEST_CASE("bin loader rejects malformed files") {
  TempDir dir;
  write_text(dir.file("magic.bin"), "NOPE!rest");
  try {
    dbmd::load_matrix(dir.file("magic.bin"), MatrixFormat::kBin);
    FAIL("expected a magic error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("magic") != std::string::npos);
  }

  const Matrix m = random_matrix(4, 4, 5);
  const std::string full = dir.file("full.bin");
  dbmd::save_matrix(full, m, MatrixFormat::kBin);
  {
    std::ifstream in(full, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    std::ofstream out(dir.file("cut.bin"), std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 10));
  }
  try {
    dbmd::load_matrix(dir.file("cut.bin"), MatrixFormat::kBin);
    FAIL("expected a truncation error");
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("truncated") != std::string::npos);
    CHECK(msg.find("byte") != std::string::npos);
  }

  {
    std::ofstream out(dir.file("short.bin"), std::ios::binary);
    out.write("DBMD1\x02\x00", 7);
  }
  CHECK_THROWS_AS(dbmd::load_matrix(dir.file("short.bin"), MatrixFormat::kBin),
                  std::runtime_error);
}

TEST_CASE("label files hold one integer per line") {
  TempDir dir;
  const std::vector<int> labels{0, 2, 1, 1, 3};
  const std::string path = dir.file("y.txt");
  dbmd::save_labels(path, labels);
  CHECK(dbmd::load_labels(path) == labels);

  write_text(dir.file("head.txt"), "label\n0\n1\n");
  CHECK(dbmd::load_labels(dir.file("head.txt")) == std::vector<int>{0, 1});

  write_text(dir.file("frac.txt"), "0\n1.5\n");
  try {
    dbmd::load_labels(dir.file("frac.txt"));
    FAIL("expected an integer error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }

  write_text(dir.file("neg.txt"), "-1\n");
  CHECK_THROWS_AS(dbmd::load_labels(dir.file("neg.txt")), std::runtime_error);
  CHECK_THROWS_AS(dbmd::save_labels(dir.file("out.txt"), {}),
                  std::invalid_argument);
}
