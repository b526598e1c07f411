#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dbmd/datagen.hpp"
#include "dbmd/rng.hpp"

namespace dbmd::testing {

double max_eig_dense(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
  return solver.eigenvalues().maxCoeff();
}

namespace {

double soft(double x, double t) {
  const double mag = std::abs(x) - t;
  if (mag <= 0.0) return 0.0;
  return x > 0.0 ? mag : -mag;
}

}  // namespace

Matrix quad_lasso_cd(const Matrix& a, const Matrix& b, double lambda,
                     int sweeps, Matrix w) {
  const Eigen::Index rows = w.rows();
  const Eigen::Index r = w.cols();
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index k = 0; k < r; ++k) {
        double partial = 0.0;
        for (Eigen::Index l = 0; l < r; ++l) {
          if (l != k) partial += w(i, l) * a(l, k);
        }
        w(i, k) = soft(b(i, k) - partial, lambda) / a(k, k);
      }
    }
  }
  return w;
}

double quad_lasso_value(const Matrix& a, const Matrix& b, double lambda,
                        const Matrix& w) {
  return 0.5 * (w * a).cwiseProduct(w).sum() - b.cwiseProduct(w).sum() +
         lambda * w.lpNorm<1>();
}

Matrix quad_fista(const Matrix& a, const Matrix& b, double lambda, int iters,
                  Matrix w) {
  const double lipschitz = max_eig_dense(a);
  Matrix y = w;
  double momentum = 1.0;
  for (int it = 0; it < iters; ++it) {
    const Matrix grad = y * a - b;
    Matrix next(w.rows(), w.cols());
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      for (Eigen::Index i = 0; i < w.rows(); ++i) {
        next(i, j) = soft(y(i, j) - grad(i, j) / lipschitz,
                          lambda / lipschitz);
      }
    }
    const double momentum_next =
        0.5 * (1.0 + std::sqrt(4.0 * momentum * momentum + 1.0));
    y = next + ((momentum - 1.0) / momentum_next) * (next - w);
    w = std::move(next);
    momentum = momentum_next;
  }
  return w;
}

Matrix pooled_a(const std::vector<Matrix>& hs) {
  Matrix a = hs[0] * hs[0].transpose();
  for (std::size_t c = 1; c < hs.size(); ++c) {
    a += hs[c] * hs[c].transpose();
  }
  return a;
}

Matrix pooled_b(const std::vector<Matrix>& xs, const std::vector<Matrix>& hs) {
  Matrix b = xs[0] * hs[0].transpose();
  for (std::size_t c = 1; c < xs.size(); ++c) {
    b += xs[c] * hs[c].transpose();
  }
  return b;
}

double resid_objective(const std::vector<Matrix>& xs,
                       const std::vector<Matrix>& hs, const Matrix& w,
                       double lambda) {
  double total = lambda * w.lpNorm<1>();
  for (std::size_t c = 0; c < xs.size(); ++c) {
    total += 0.5 * (xs[c] - w * hs[c]).squaredNorm();
  }
  return total;
}

Vector project_floor_simplex(const Vector& v, double eps) {
  const Eigen::Index r = v.size();
  const double mass = 1.0 - static_cast<double>(r) * eps;
  Vector p = v.array() - eps;
  std::vector<double> sorted(p.data(), p.data() + r);
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double running = 0.0;
  double theta = 0.0;
  for (Eigen::Index k = 0; k < r; ++k) {
    running += sorted[static_cast<std::size_t>(k)];
    const double candidate =
        (running - mass) / static_cast<double>(k + 1);
    if (sorted[static_cast<std::size_t>(k)] - candidate > 0.0) {
      theta = candidate;
    }
  }
  Vector out(r);
  for (Eigen::Index k = 0; k < r; ++k) {
    out(k) = std::max(p(k) - theta, 0.0) + eps;
  }
  return out;
}

double column_value_ref(const Vector& h, const Matrix& wtw, const Vector& wtx,
                        double x_sq, const Vector& alpha) {
  double value = 0.5 * (x_sq - 2.0 * h.dot(wtx) + h.dot(wtw * h));
  for (Eigen::Index k = 0; k < h.size(); ++k) {
    if (alpha(k) != 0.0) value -= alpha(k) * std::log(h(k));
  }
  return value;
}

Vector simplex_pg(const Matrix& wtw, const Vector& wtx, double x_sq,
                  const Vector& alpha, double eps, int iters) {
  const Eigen::Index r = wtw.rows();
  Vector h = Vector::Constant(r, 1.0 / static_cast<double>(r));
  double value = column_value_ref(h, wtw, wtx, x_sq, alpha);
  double eta = 1.0;
  for (int it = 0; it < iters; ++it) {
    Vector g = wtw * h - wtx;
    for (Eigen::Index k = 0; k < r; ++k) {
      if (alpha(k) != 0.0) g(k) -= alpha(k) / h(k);
    }
    eta *= 1.5;
    bool accepted = false;
    for (int bt = 0; bt < 80; ++bt) {
      const Vector cand = project_floor_simplex(h - eta * g, eps);
      const double cand_value =
          column_value_ref(cand, wtw, wtx, x_sq, alpha);
      if (cand_value <= value) {
        h = cand;
        value = cand_value;
        accepted = true;
        break;
      }
      eta *= 0.5;
    }
    if (!accepted) break;
  }
  return h;
}

Vector grid_min_r2(const Matrix& wtw, const Vector& wtx, double x_sq,
                   const Vector& alpha, double eps, double step) {
  Vector best(2);
  double best_value = std::numeric_limits<double>::infinity();
  for (double t = eps; t <= 1.0 - eps + 1e-15; t += step) {
    Vector h(2);
    h << t, 1.0 - t;
    const double value = column_value_ref(h, wtw, wtx, x_sq, alpha);
    if (value < best_value) {
      best_value = value;
      best = h;
    }
  }
  return best;
}

double brute_accuracy(const std::vector<int>& pred,
                      const std::vector<int>& truth, int k) {
  std::vector<int> mapping(static_cast<std::size_t>(k));
  std::iota(mapping.begin(), mapping.end(), 0);
  std::size_t best = 0;
  do {
    std::size_t matched = 0;
    for (std::size_t s = 0; s < pred.size(); ++s) {
      if (mapping[static_cast<std::size_t>(pred[s])] == truth[s]) ++matched;
    }
    best = std::max(best, matched);
  } while (std::next_permutation(mapping.begin(), mapping.end()));
  return static_cast<double>(best) / static_cast<double>(pred.size());
}

Matrix fd_grad(const std::function<double(const Matrix&)>& f, const Matrix& w,
               double step) {
  Matrix g(w.rows(), w.cols());
  Matrix probe = w;
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      const double saved = probe(i, j);
      probe(i, j) = saved + step;
      const double up = f(probe);
      probe(i, j) = saved - step;
      const double down = f(probe);
      probe(i, j) = saved;
      g(i, j) = (up - down) / (2.0 * step);
    }
  }
  return g;
}

namespace {

Vector eg_column_ref(const Vector& start, const Matrix& wtw,
                     const Vector& wtx, double x_sq, const Vector& alpha,
                     double eps) {
  const Eigen::Index r = start.size();
  Vector h = start;
  double value = column_value_ref(h, wtw, wtx, x_sq, alpha);
  double eta = 1.0;
  for (int it = 0; it < 200; ++it) {
    Vector g = wtw * h - wtx;
    for (Eigen::Index k = 0; k < r; ++k) {
      if (alpha(k) != 0.0) g(k) -= alpha(k) / h(k);
    }
    eta = std::min(eta * 2.0, 1e12);
    bool accepted = false;
    Vector cand(r);
    double cand_value = value;
    for (int bt = 0; bt < 60; ++bt) {
      Vector s(r);
      for (Eigen::Index k = 0; k < r; ++k) {
        s(k) = std::log(h(k)) - eta * g(k);
      }
      const double shift = s.maxCoeff();
      Vector v(r);
      for (Eigen::Index k = 0; k < r; ++k) v(k) = std::exp(s(k) - shift);
      const double total = v.sum();
      for (Eigen::Index k = 0; k < r; ++k) {
        cand(k) = eps + (1.0 - static_cast<double>(r) * eps) * v(k) / total;
      }
      cand_value = column_value_ref(cand, wtw, wtx, x_sq, alpha);
      if (cand_value <= value) {
        accepted = true;
        break;
      }
      eta *= 0.5;
    }
    if (!accepted) break;
    const double drop = value - cand_value;
    const double scale = std::max(std::abs(value), 1e-8);
    h = cand;
    value = cand_value;
    if (drop <= 1e-8 * scale) break;
  }
  return h;
}

}  // namespace

AltResult reference_alternating(const Matrix& x, int rank, double lambda,
                                double alpha0, double epsilon_h,
                                std::uint64_t seed, int max_outer,
                                double outer_tol) {
  const Eigen::Index m = x.rows();
  const Eigen::Index n = x.cols();
  const Vector alpha = Vector::Constant(rank, alpha0 - 1.0);

  CounterRng w_rng(CounterRng::derive(seed, kStreamWInit));
  Matrix w(m, rank);
  for (Eigen::Index j = 0; j < rank; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) w(i, j) = w_rng.next_gaussian();
  }
  Matrix h = gen_h_dirichlet(rank, static_cast<int>(n),
                             Vector::Ones(rank),
                             CounterRng::derive(seed, kStreamHInit, 0));
  h = (h.array() * (1.0 - rank * epsilon_h) + epsilon_h).matrix();

  auto full_value = [&](const Matrix& wv, const Matrix& hv) {
    double value = 0.5 * (x - wv * hv).squaredNorm() + lambda * wv.lpNorm<1>();
    for (Eigen::Index k = 0; k < rank; ++k) {
      if (alpha(k) != 0.0) {
        value -= alpha(k) * hv.row(k).array().log().sum();
      }
    }
    return value;
  };

  AltResult out;
  double prev = full_value(w, h);
  for (int outer = 0; outer < max_outer; ++outer) {
    w = quad_fista(h * h.transpose(), x * h.transpose(), lambda, 2000, w);
    const Matrix wtw = w.transpose() * w;
    const Matrix wtx = w.transpose() * x;
    for (Eigen::Index j = 0; j < n; ++j) {
      h.col(j) = eg_column_ref(h.col(j), wtw, wtx.col(j),
                               x.col(j).squaredNorm(), alpha, epsilon_h);
    }
    const double value = full_value(w, h);
    ++out.outer_rounds;
    if (std::abs(value - prev) <= outer_tol * std::max(1.0, std::abs(prev))) {
      prev = value;
      break;
    }
    prev = value;
  }
  out.w = std::move(w);
  out.h = std::move(h);
  out.objective = prev;
  return out;
}

}  // namespace dbmd::testing
