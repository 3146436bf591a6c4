#pragma once

#include "jacoest/network.hpp"

namespace jacoest {

/// Moore-Penrose pseudo-inverse by SVD. Singular values at or below
/// max(rows, cols) * eps * sigma_max are treated as zero.
Matrix pinv(const Matrix& m);

/// Numerical rank under the same tolerance as pinv.
int numerical_rank(const Matrix& m);

/// Dense LU with partial pivoting. Returns false if any pivot magnitude is
/// below pivot_tol, leaving x untouched.
bool lu_solve(const Matrix& a, const Vector& b, Vector& x, double pivot_tol = 1e-12);

/// 2-norm condition number, +inf for singular input.
double condition_number(const Matrix& m);

double relative_frobenius(const Matrix& estimate, const Matrix& reference);

}  // namespace jacoest
