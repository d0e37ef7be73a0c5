#pragma once

#include <vector>

#include "modecoupler/types.hpp"

namespace modecoupler::linalg {

// Solves A x = b by LU decomposition with partial pivoting.  Throws
// NumericalError when a pivot is smaller than 1e-14 times the largest
// entry of A (numerically singular system).
std::vector<Complex> lu_solve(CMatrix a, std::vector<Complex> b);

// Determinant via the same LU factorization.  A singular matrix yields 0
// rather than an error.
Complex determinant(CMatrix a);

// Coefficients of the monic characteristic polynomial det(lambda*I - A),
// descending powers: p[0] = 1, p[k] multiplies lambda^(n-k).
// Faddeev-LeVerrier recursion; exact in O(n^4) flops for the tiny n used here.
std::vector<Complex> characteristic_polynomial(const CMatrix& a);

// All roots of the polynomial with descending coefficients (coeffs[0] != 0)
// by Aberth-Ehrlich simultaneous iteration.  Converges when every correction
// falls below tol relative to the root magnitude, or when every residual is
// at evaluation-noise level (handles multiple roots).  Throws NumericalError
// carrying the worst residual after max_iter iterations without convergence.
std::vector<Complex> polynomial_roots(const std::vector<Complex>& coeffs,
                                      double tol = 1e-13, int max_iter = 200);

// Horner evaluation of a polynomial with descending coefficients.
Complex polynomial_eval(const std::vector<Complex>& coeffs, Complex z);

}  // namespace modecoupler::linalg
