#include <doctest.h>

#include "dbmd/numerics.hpp"
#include "dbmd/rng.hpp"
#include "oracles.hpp"

using dbmd::Matrix;
using dbmd::Vector;

namespace {

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols,
                     std::uint64_t key) {
  dbmd::CounterRng rng(key);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.next_gaussian();
  }
  return m;
}

}  // namespace

TEST_CASE("soft_threshold known values") {
  Matrix x(2, 3);
  x << 3.0, -3.0, 0.5, -1.0, 0.0, 2.0;
  const Matrix y = dbmd::soft_threshold(x, 1.0);
  CHECK(y(0, 0) == doctest::Approx(2.0));
  CHECK(y(0, 1) == doctest::Approx(-2.0));
  CHECK(y(0, 2) == 0.0);
  CHECK(y(1, 0) == 0.0);
  CHECK(y(1, 1) == 0.0);
  CHECK(y(1, 2) == doctest::Approx(1.0));
}

TEST_CASE("soft_threshold properties") {
  const Matrix x = random_matrix(13, 7, 42);
  const Matrix y = dbmd::soft_threshold(x, 0.3);
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const double expect = std::max(std::abs(x(i, j)) - 0.3, 0.0);
      CHECK(std::abs(y(i, j)) == doctest::Approx(expect));
      CHECK(y(i, j) * x(i, j) >= 0.0);
    }
  }
  CHECK(dbmd::soft_threshold(x, 0.0) == x);
  CHECK_THROWS_AS(dbmd::soft_threshold(x, -0.1), std::invalid_argument);
}

TEST_CASE("spectral_norm diagonal and identity") {
  Matrix d = Matrix::Zero(3, 3);
  d.diagonal() << 1.0, 2.0, 7.0;
  CHECK(dbmd::spectral_norm(d) == doctest::Approx(7.0).epsilon(1e-7));
  CHECK(dbmd::spectral_norm(Matrix::Identity(4, 4)) ==
        doctest::Approx(1.0).epsilon(1e-10));
  CHECK(dbmd::spectral_norm(Matrix::Zero(5, 5)) == 0.0);
}

TEST_CASE("spectral_norm matches a dense eigensolver") {
  for (std::uint64_t inst = 0; inst < 20; ++inst) {
    const Eigen::Index n = 3 + static_cast<Eigen::Index>(inst % 9);
    const Matrix b = random_matrix(n, n + 4, 100 + inst);
    const Matrix a = b * b.transpose();
    const double expect = dbmd::testing::max_eig_dense(a);
    const double got = dbmd::spectral_norm(a);
    CHECK(got == doctest::Approx(expect).epsilon(1e-6));
  }
}

TEST_CASE("spectral_norm input checking") {
  CHECK_THROWS_AS(dbmd::spectral_norm(Matrix::Zero(2, 3)),
                  std::invalid_argument);
  CHECK_THROWS_AS(dbmd::spectral_norm(Matrix::Identity(2, 2), -1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(dbmd::spectral_norm(Matrix::Identity(2, 2), 1e-8, 0),
                  std::invalid_argument);
}

TEST_CASE("frob_norm") {
  Matrix x(2, 2);
  x << 3.0, 0.0, 4.0, 0.0;
  CHECK(dbmd::frob_norm(x) == doctest::Approx(5.0));
  CHECK(dbmd::frob_norm(Matrix::Zero(3, 3)) == 0.0);
}

TEST_CASE("gram matches the product and is exactly symmetric") {
  for (std::uint64_t inst = 0; inst < 10; ++inst) {
    const Matrix h = random_matrix(6, 17, 200 + inst);
    const Matrix g = dbmd::gram(h);
    CHECK((g - h * h.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(g == Matrix(g.transpose()));
    CHECK(dbmd::testing::max_eig_dense(-g) < 1e-12);
  }
}
