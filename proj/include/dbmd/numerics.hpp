#pragma once

#include "dbmd/matrix.hpp"

namespace dbmd {

// Entrywise sign(x) * max(|x| - t, 0). t must be >= 0.
Matrix soft_threshold(const Matrix& x, double t);

// Largest eigenvalue of a symmetric PSD matrix by power iteration started
// from the normalized all-ones vector, so repeated calls are deterministic.
// Stops when the Rayleigh quotient changes by at most tol (relative).
double spectral_norm(const Matrix& a, double tol = 1e-8, int max_iters = 10000);

double frob_norm(const Matrix& x);

// H * H^T accumulated through a rank update, so the result is exactly
// symmetric.
Matrix gram(const Matrix& h);

}  // namespace dbmd
